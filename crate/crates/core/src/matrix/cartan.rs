use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Cartan projection `(kappa_1 >= ... >= kappa_d)` in natural-log units.
///
/// For p-adic matrices the exact integer coordinates (in units of `ln p`)
/// are kept alongside, so sums and differences can be compared exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanVector {
    kappas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    padic_units: Option<(u64, Vec<i64>)>,
}

impl CartanVector {
    pub fn from_real(kappas: Vec<f64>) -> Self {
        CartanVector {
            kappas,
            padic_units: None,
        }
    }

    pub fn from_units(p: u64, units: Vec<i64>) -> Self {
        let lp = (p as f64).ln();
        CartanVector {
            kappas: units.iter().map(|&u| u as f64 * lp).collect(),
            padic_units: Some((p, units)),
        }
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn dim(&self) -> usize {
        self.kappas.len()
    }

    /// Exact coordinates in units of `ln p`, for p-adic matrices.
    pub fn units(&self) -> Option<&[i64]> {
        self.padic_units.as_ref().map(|(_, u)| u.as_slice())
    }

    /// `kappa_1 + ... + kappa_k = log ||wedge^k g||`; zero for `k = 0`.
    pub fn kappa_bar(&self, k: usize) -> f64 {
        if let Some((p, u)) = &self.padic_units {
            return u[..k].iter().sum::<i64>() as f64 * (*p as f64).ln();
        }
        self.kappas[..k].iter().sum()
    }

    pub fn kappa_bar_units(&self, k: usize) -> Option<i64> {
        self.units().map(|u| u[..k].iter().sum())
    }

    /// `kappa_1 - kappa_d`, which equals `kappa(g) + kappa(g^-1)`.
    pub fn spread(&self) -> f64 {
        self.kappas[0] - self.kappas[self.kappas.len() - 1]
    }

    pub fn is_non_increasing(&self, tol: f64) -> bool {
        if let Some(u) = self.units() {
            return u.windows(2).all(|w| w[0] >= w[1]);
        }
        self.kappas.windows(2).all(|w| w[0] >= w[1] - tol)
    }

    /// Cartan projection of the inverse: `(-kappa_d, ..., -kappa_1)`.
    pub fn of_inverse(&self) -> CartanVector {
        match &self.padic_units {
            Some((p, u)) => CartanVector::from_units(*p, u.iter().rev().map(|x| -x).collect()),
            None => CartanVector::from_real(self.kappas.iter().rev().map(|x| -x).collect()),
        }
    }

    /// Coordinate-wise difference `self - other`.
    pub fn minus(&self, other: &CartanVector) -> Result<CartanVector> {
        if self.dim() != other.dim() {
            return Err(Error::usage("Cartan vectors of different dimensions"));
        }
        match (&self.padic_units, &other.padic_units) {
            (Some((p, a)), Some((q, b))) if p == q => Ok(CartanVector::from_units(
                *p,
                a.iter().zip(b).map(|(x, y)| x - y).collect(),
            )),
            _ => Ok(CartanVector::from_real(
                self.kappas
                    .iter()
                    .zip(&other.kappas)
                    .map(|(x, y)| x - y)
                    .collect(),
            )),
        }
    }
}

impl Matrix {
    /// Cartan projection. Real: `log` of singular values. p-adic: differences
    /// of `log ||wedge^k g||` computed from exact minors.
    pub fn cartan(&self) -> Result<CartanVector> {
        match self.field {
            FieldSpec::Real => {
                let sv = self.singular_values()?;
                Ok(CartanVector::from_real(sv.iter().map(|s| s.ln()).collect()))
            }
            FieldSpec::Padic { p } => {
                let bars = self.kappa_bar_units_all()?;
                let mut units = Vec::with_capacity(self.dim);
                let mut prev = 0;
                for b in bars {
                    units.push(b - prev);
                    prev = b;
                }
                Ok(CartanVector::from_units(p, units))
            }
        }
    }

    /// Cartan projection computed from the norms of the exterior powers:
    /// `kappa_i = log(||wedge^i g|| / ||wedge^(i-1) g||)`.
    pub fn cartan_via_exterior(&self) -> Result<CartanVector> {
        if !self.field.is_real() {
            return self.cartan();
        }
        let mut kappas = Vec::with_capacity(self.dim);
        let mut prev = 0.0;
        for k in 1..=self.dim {
            let bar = self.exterior_power(k)?.kappa()?;
            kappas.push(bar - prev);
            prev = bar;
        }
        Ok(CartanVector::from_real(kappas))
    }

    /// `log ||wedge^k g||`.
    pub fn kappa_bar(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        self.exterior_power(k)?.kappa()
    }

    /// p-adic `log ||wedge^k g||` in units of `ln p`, for `k = 1..=d`.
    fn kappa_bar_units_all(&self) -> Result<Vec<i64>> {
        (1..=self.dim)
            .map(|k| {
                self.exterior_power(k)?
                    .kappa_units()
                    .ok_or_else(|| Error::domain("singular matrix has no finite Cartan projection"))
            })
            .collect()
    }
}
