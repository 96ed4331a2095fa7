//! High-dynamic-range real matrices for long random products.
//!
//! A product of a few thousand heavy-tailed steps has log-norm far beyond
//! the `f64` exponent range, and its small singular values are lost to
//! rounding long before that. An [`ExteriorTower`] keeps each exterior
//! power `wedge^k g` (for `k = 1..=depth`) separately, each as
//! `exp(log_scale) * mantissa` with the mantissa renormalized to unit
//! max-entry after every product. Since `wedge^k (gh) = wedge^k g wedge^k h`,
//! every `kappa_bar_k = log ||wedge^k g||` is obtained from a top singular
//! value, which products preserve to relative precision.

use super::exterior::colex_subsets;
use super::{real_matmul, singular_values_of, CartanVector, Matrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledBlock {
    size: usize,
    log_scale: f64,
    mantissa: Vec<f64>,
}

impl ScaledBlock {
    pub fn new(size: usize, log_scale: f64, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), size * size);
        let mut b = ScaledBlock {
            size,
            log_scale,
            mantissa: data,
        };
        b.normalize();
        b
    }

    fn identity(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        ScaledBlock {
            size,
            log_scale: 0.0,
            mantissa: data,
        }
    }

    fn normalize(&mut self) {
        let m = self.mantissa.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if m == 0.0 || !m.is_finite() {
            if m == 0.0 {
                self.log_scale = f64::NEG_INFINITY;
            }
            return;
        }
        // power-of-two rescale is exact on the mantissa
        let e = m.log2().floor() as i32;
        if e != 0 {
            let f = 2f64.powi(-e);
            self.mantissa.iter_mut().for_each(|x| *x *= f);
            self.log_scale += e as f64 * std::f64::consts::LN_2;
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn mantissa(&self) -> &[f64] {
        &self.mantissa
    }

    pub fn mul(&self, rhs: &ScaledBlock) -> ScaledBlock {
        assert_eq!(self.size, rhs.size);
        let mut out = ScaledBlock {
            size: self.size,
            log_scale: self.log_scale + rhs.log_scale,
            mantissa: real_matmul(self.size, &self.mantissa, &rhs.mantissa),
        };
        out.normalize();
        out
    }

    /// Log of the operator norm; `-inf` for the zero block.
    pub fn log_norm(&self) -> Result<f64> {
        if self.log_scale == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let s = singular_values_of(self.size, self.size, &self.mantissa)?[0];
        Ok(self.log_scale + s.ln())
    }
}

/// `(wedge^1 g, ..., wedge^depth g)` in scaled form.
#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorTower {
    dim: usize,
    levels: Vec<ScaledBlock>,
}

impl ExteriorTower {
    pub fn identity(dim: usize, depth: usize) -> Self {
        let depth = depth.clamp(1, dim);
        ExteriorTower {
            dim,
            levels: (1..=depth)
                .map(|k| ScaledBlock::identity(super::binomial(dim, k)))
                .collect(),
        }
    }

    pub fn from_matrix(g: &Matrix, depth: usize) -> Result<Self> {
        if !g.field().is_real() {
            return Err(Error::usage("exterior towers are for real matrices"));
        }
        let dim = g.dim();
        let depth = depth.clamp(1, dim);
        let levels = (1..=depth)
            .map(|k| {
                let w = g.exterior_power(k)?;
                Ok(ScaledBlock::new(
                    w.dim(),
                    0.0,
                    w.as_real_slice().unwrap().to_vec(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExteriorTower { dim, levels })
    }

    /// `diag(exp(x_1), ..., exp(x_d))` built directly in log form, so
    /// arbitrarily large exponents are representable.
    pub fn diagonal(log_diag: &[f64], depth: usize) -> Self {
        let dim = log_diag.len();
        let depth = depth.clamp(1, dim);
        let levels = (1..=depth)
            .map(|k| {
                let logs: Vec<f64> = colex_subsets(dim, k)
                    .iter()
                    .map(|s| s.iter().map(|&i| log_diag[i]).sum())
                    .collect();
                let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let m = logs.len();
                let mut data = vec![0.0; m * m];
                for (i, l) in logs.iter().enumerate() {
                    data[i * m + i] = (l - top).exp();
                }
                ScaledBlock::new(m, top, data)
            })
            .collect();
        ExteriorTower { dim, levels }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> Option<&ScaledBlock> {
        k.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    /// Product; the result keeps the smaller of the two depths.
    pub fn mul(&self, rhs: &ExteriorTower) -> Result<ExteriorTower> {
        if self.dim != rhs.dim {
            return Err(Error::usage(format!(
                "dimension mismatch: {} vs {}",
                self.dim, rhs.dim
            )));
        }
        Ok(ExteriorTower {
            dim: self.dim,
            levels: self
                .levels
                .iter()
                .zip(&rhs.levels)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    pub fn kappa_bar(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        self.level(k)
            .ok_or_else(|| {
                Error::usage(format!("tower of depth {} has no level {k}", self.depth()))
            })?
            .log_norm()
    }

    pub fn kappa(&self) -> Result<f64> {
        self.kappa_bar(1)
    }

    fn require_full(&self) -> Result<()> {
        if self.depth() < self.dim {
            return Err(Error::usage(format!(
                "need a full tower (depth {}), have depth {}",
                self.dim,
                self.depth()
            )));
        }
        Ok(())
    }

    pub fn cartan(&self) -> Result<CartanVector> {
        self.require_full()?;
        let mut kappas = Vec::with_capacity(self.dim);
        let mut prev = 0.0;
        for k in 1..=self.dim {
            let bar = self.kappa_bar(k)?;
            kappas.push(bar - prev);
            prev = bar;
        }
        Ok(CartanVector::from_real(kappas))
    }

    /// `kappa_1 - kappa_d = kappa(g) + kappa(g^-1)`.
    pub fn big_n(&self) -> Result<f64> {
        self.require_full()?;
        let d = self.dim;
        let k1 = self.kappa_bar(1)?;
        let kd = self.kappa_bar(d)? - self.kappa_bar(d - 1)?;
        Ok(k1 - kd)
    }

    /// Dense form of `g`, when its entries fit in `f64`.
    pub fn to_matrix(&self) -> Result<Matrix> {
        let b = &self.levels[0];
        let f = b.log_scale.exp();
        if !f.is_finite() && b.log_scale != f64::NEG_INFINITY {
            return Err(Error::domain("matrix entries overflow f64"));
        }
        Matrix::real(self.dim, b.mantissa.iter().map(|x| x * f).collect())
    }

    /// Entrywise relative comparison of the first levels.
    pub fn relative_deviation(&self, other: &ExteriorTower) -> f64 {
        let (a, b) = (&self.levels[0], &other.levels[0]);
        if a.size != b.size {
            return f64::INFINITY;
        }
        if a.log_scale == f64::NEG_INFINITY || b.log_scale == f64::NEG_INFINITY {
            return if a.log_scale == b.log_scale {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let shift = (b.log_scale - a.log_scale).exp();
        a.mantissa
            .iter()
            .zip(&b.mantissa)
            .map(|(x, y)| (x - y * shift).abs())
            .fold(0.0, f64::max)
            / 1f64.max(shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_tower_matches_dense_when_representable() {
        let t = ExteriorTower::diagonal(&[1.0, 0.5, -1.5], 3);
        let g = Matrix::diagonal_real(&[1f64.exp(), 0.5f64.exp(), (-1.5f64).exp()]).unwrap();
        let dense = ExteriorTower::from_matrix(&g, 3).unwrap();
        for k in 1..=3 {
            assert!((t.kappa_bar(k).unwrap() - dense.kappa_bar(k).unwrap()).abs() < 1e-12);
        }
        let c = t.cartan().unwrap();
        assert!((c.kappas()[0] - 1.0).abs() < 1e-12);
        assert!((c.kappas()[2] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn huge_exponents_survive_products() {
        let r = ExteriorTower::from_matrix(&Matrix::rotation(1.0), 2).unwrap();
        let step = r
            .mul(&ExteriorTower::diagonal(&[900.0, -900.0], 2))
            .unwrap();
        let prod = step.mul(&step).unwrap();
        let k = prod.kappa().unwrap();
        // top direction loses log|cos 1| at the junction
        assert!((k - (1800.0 + 1f64.cos().abs().ln())).abs() < 1e-9, "{k}");
        assert!(prod.kappa_bar(2).unwrap().abs() < 1e-9);
        assert!((prod.big_n().unwrap() - 2.0 * k).abs() < 1e-9);
    }

    #[test]
    fn partial_depth_refuses_cartan() {
        let t = ExteriorTower::identity(3, 1);
        assert!(t.cartan().is_err());
        assert_eq!(t.kappa().unwrap(), 0.0);
    }
}
