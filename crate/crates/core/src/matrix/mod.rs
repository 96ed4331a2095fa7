//! Square matrices over a local field and the functionals built on their norms.
//!
//! Operator norms: Euclidean for `Real`, max-norm on the standard lattice
//! `Z_p^d` for `Padic` (so `||g|| = max |g_ij|_p`).
//!
//! * `kappa(g) = log ||g||`
//! * `big_n(g) = kappa(g) + kappa(g^-1)`
//! * `cartan(g) = (kappa_1, ..., kappa_d)` with `kappa_1 + ... + kappa_k = log ||wedge^k g||`

mod cartan;
mod element;
mod exterior;
pub mod format;
mod svd;
mod tower;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{log_abs, valuation_unchecked, FieldSpec, Scalar, Valuation};

pub use cartan::CartanVector;
pub use element::WalkElement;
pub use exterior::{binomial, colex_subsets};
pub use svd::{singular_values_of, symmetric_eigen, SymmetricEigen, JACOBI_MAX_SWEEPS, JACOBI_TOL};
pub use tower::{ExteriorTower, ScaledBlock};

#[derive(Clone, Debug, PartialEq)]
enum Entries {
    Real(Vec<f64>),
    Rational(Vec<BigRational>),
}

/// `dim x dim` matrix, row-major, all entries in `field`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    field: FieldSpec,
    dim: usize,
    entries: Entries,
}

impl Matrix {
    pub fn real(dim: usize, data: Vec<f64>) -> Result<Self> {
        check_len(dim, data.len())?;
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::usage("non-finite real entry"));
        }
        Ok(Matrix {
            field: FieldSpec::Real,
            dim,
            entries: Entries::Real(data),
        })
    }

    pub fn rational(field: FieldSpec, dim: usize, data: Vec<BigRational>) -> Result<Self> {
        if field.is_real() {
            return Err(Error::usage("rational entries need a p-adic field"));
        }
        check_len(dim, data.len())?;
        Ok(Matrix {
            field,
            dim,
            entries: Entries::Rational(data),
        })
    }

    /// Convenience constructor from small integer fractions `(num, den)`.
    pub fn padic_from_fractions(p: u64, dim: usize, data: &[(i64, i64)]) -> Result<Self> {
        let field = FieldSpec::padic(p)?;
        let data = data
            .iter()
            .map(|&(n, d)| {
                if d == 0 {
                    Err(Error::Arithmetic("zero denominator".into()))
                } else {
                    Ok(BigRational::new(n.into(), d.into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::rational(field, dim, data)
    }

    pub fn from_scalars(field: FieldSpec, dim: usize, data: Vec<Scalar>) -> Result<Self> {
        check_len(dim, data.len())?;
        if let Some(bad) = data.iter().find(|s| !s.belongs_to(field)) {
            return Err(Error::usage(format!(
                "entry {bad} does not belong to {field}"
            )));
        }
        match field {
            FieldSpec::Real => {
                Matrix::real(dim, data.iter().map(|s| s.as_real().unwrap()).collect())
            }
            FieldSpec::Padic { .. } => Matrix::rational(
                field,
                dim,
                data.into_iter()
                    .map(|s| match s {
                        Scalar::Rational(q) => q,
                        Scalar::Real(_) => unreachable!(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn identity(field: FieldSpec, dim: usize) -> Self {
        Self::diagonal_scalars(field, &vec![field.one(); dim])
    }

    pub fn zeros(field: FieldSpec, dim: usize) -> Self {
        match field {
            FieldSpec::Real => Matrix {
                field,
                dim,
                entries: Entries::Real(vec![0.0; dim * dim]),
            },
            FieldSpec::Padic { .. } => Matrix {
                field,
                dim,
                entries: Entries::Rational(vec![BigRational::zero(); dim * dim]),
            },
        }
    }

    pub fn diagonal_real(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut data = vec![0.0; d * d];
        for (i, x) in diag.iter().enumerate() {
            data[i * d + i] = *x;
        }
        Matrix::real(d, data)
    }

    fn diagonal_scalars(field: FieldSpec, diag: &[Scalar]) -> Self {
        let d = diag.len();
        let mut m = Matrix::zeros(field, d);
        for (i, x) in diag.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    /// Planar rotation by `theta` radians.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Matrix::real(2, vec![c, -s, s, c]).expect("finite rotation")
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        let k = i * self.dim + j;
        match &self.entries {
            Entries::Real(v) => Scalar::Real(v[k]),
            Entries::Rational(v) => Scalar::Rational(v[k].clone()),
        }
    }

    fn set(&mut self, i: usize, j: usize, x: Scalar) {
        let k = i * self.dim + j;
        match (&mut self.entries, x) {
            (Entries::Real(v), Scalar::Real(x)) => v[k] = x,
            (Entries::Rational(v), Scalar::Rational(x)) => v[k] = x,
            _ => panic!("field mismatch in set"),
        }
    }

    pub fn as_real_slice(&self) -> Option<&[f64]> {
        match &self.entries {
            Entries::Real(v) => Some(v),
            Entries::Rational(_) => None,
        }
    }

    pub fn as_rational_slice(&self) -> Option<&[BigRational]> {
        match &self.entries {
            Entries::Rational(v) => Some(v),
            Entries::Real(_) => None,
        }
    }

    fn check_compatible(&self, rhs: &Matrix) -> Result<()> {
        if self.field != rhs.field {
            return Err(Error::usage(format!(
                "field mismatch: {} vs {}",
                self.field, rhs.field
            )));
        }
        if self.dim != rhs.dim {
            return Err(Error::usage(format!(
                "dimension mismatch: {} vs {}",
                self.dim, rhs.dim
            )));
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_compatible(rhs)?;
        let d = self.dim;
        let entries = match (&self.entries, &rhs.entries) {
            (Entries::Real(a), Entries::Real(b)) => Entries::Real(real_matmul(d, a, b)),
            (Entries::Rational(a), Entries::Rational(b)) => {
                let mut out = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = BigRational::zero();
                        for k in 0..d {
                            let (x, y) = (&a[i * d + k], &b[k * d + j]);
                            if !x.is_zero() && !y.is_zero() {
                                acc += x * y;
                            }
                        }
                        out.push(acc);
                    }
                }
                Entries::Rational(out)
            }
            _ => unreachable!("checked field"),
        };
        Ok(Matrix {
            field: self.field,
            dim: d,
            entries,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.entry(j, i));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        match &self.entries {
            Entries::Real(v) => v.iter().all(|x| *x == 0.0),
            Entries::Rational(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn determinant(&self) -> Scalar {
        match &self.entries {
            Entries::Real(v) => Scalar::Real(real_det(self.dim, v)),
            Entries::Rational(v) => Scalar::Rational(rational_det(self.dim, v.clone())),
        }
    }

    /// Exact inverse over Q, partial-pivoting Gauss-Jordan over R.
    pub fn inverse(&self) -> Result<Matrix> {
        let d = self.dim;
        let entries = match &self.entries {
            Entries::Real(v) => Entries::Real(real_inverse(d, v)?),
            Entries::Rational(v) => Entries::Rational(rational_inverse(d, v)?),
        };
        Ok(Matrix {
            field: self.field,
            dim: d,
            entries,
        })
    }

    /// Smallest valuation among the entries (`Infinite` for the zero matrix).
    pub fn min_valuation(&self) -> Option<Valuation> {
        let p = self.field.prime()?;
        let v = self.as_rational_slice()?;
        Some(
            v.iter()
                .map(|x| valuation_unchecked(x, p))
                .min()
                .unwrap_or(Valuation::Infinite),
        )
    }

    /// `log ||g||`; `-inf` for the zero matrix.
    pub fn kappa(&self) -> Result<f64> {
        match &self.entries {
            Entries::Real(v) => {
                if v.iter().all(|x| *x == 0.0) {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok(singular_values_of(self.dim, self.dim, v)?[0].ln())
            }
            Entries::Rational(_) => Ok(match self.kappa_units() {
                Some(u) => u as f64 * self.field.log_unit().unwrap(),
                None => f64::NEG_INFINITY,
            }),
        }
    }

    /// p-adic log-norm in units of `ln p`; `None` for real matrices and for zero.
    pub fn kappa_units(&self) -> Option<i64> {
        self.min_valuation()?.finite().map(|v| -v)
    }

    /// `kappa(g) + kappa(g^-1)`; domain error when `g` is singular.
    pub fn big_n(&self) -> Result<f64> {
        match self.field {
            FieldSpec::Real => {
                let inv = self.inverse()?;
                Ok(self.kappa()? + inv.kappa()?)
            }
            FieldSpec::Padic { .. } => {
                let units = self.big_n_units()?;
                Ok(units as f64 * self.field.log_unit().unwrap())
            }
        }
    }

    /// p-adic `N(g)` in units of `ln p`.
    pub fn big_n_units(&self) -> Result<i64> {
        if self.field.is_real() {
            return Err(Error::usage("big_n_units needs a p-adic matrix"));
        }
        let inv = self.inverse()?;
        let a = self
            .kappa_units()
            .ok_or_else(|| Error::domain("zero matrix"))?;
        let b = inv
            .kappa_units()
            .ok_or_else(|| Error::domain("zero inverse"))?;
        Ok(a + b)
    }

    /// Descending singular values (real field only).
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        match &self.entries {
            Entries::Real(v) => singular_values_of(self.dim, self.dim, v),
            Entries::Rational(_) => Err(Error::usage("singular values need the real field")),
        }
    }

    /// `log |f g v|`, `-inf` when the coefficient vanishes.
    pub fn log_coefficient(&self, f: &[Scalar], v: &[Scalar]) -> Result<f64> {
        let d = self.dim;
        if f.len() != d || v.len() != d {
            return Err(Error::usage(format!(
                "vector lengths {} and {} do not match dimension {d}",
                f.len(),
                v.len()
            )));
        }
        if f.iter().chain(v).any(|s| !s.belongs_to(self.field)) {
            return Err(Error::usage(format!(
                "vector entries must belong to {}",
                self.field
            )));
        }
        if f.iter().all(Scalar::is_zero) || v.iter().all(Scalar::is_zero) {
            return Err(Error::usage("covector and vector must be nonzero"));
        }
        let mut acc = self.field.zero();
        for i in 0..d {
            if f[i].is_zero() {
                continue;
            }
            for j in 0..d {
                let term = f[i].mul(&self.entry(i, j))?.mul(&v[j])?;
                acc = acc.add(&term)?;
            }
        }
        log_abs(&acc, self.field)
    }

    /// Largest entrywise relative deviation, or `None` when fields/dims differ.
    /// p-adic matrices compare exactly (0 or infinity).
    pub fn max_relative_deviation(&self, other: &Matrix) -> Option<f64> {
        if self.check_compatible(other).is_err() {
            return None;
        }
        match (&self.entries, &other.entries) {
            (Entries::Real(a), Entries::Real(b)) => {
                let scale = a
                    .iter()
                    .chain(b.iter())
                    .fold(0.0f64, |m, x| m.max(x.abs()))
                    .max(f64::MIN_POSITIVE);
                Some(
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (x - y).abs() / scale)
                        .fold(0.0, f64::max),
                )
            }
            (Entries::Rational(a), Entries::Rational(b)) => {
                Some(if a == b { 0.0 } else { f64::INFINITY })
            }
            _ => None,
        }
    }
}

fn check_len(dim: usize, len: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::usage("dimension must be at least 1"));
    }
    if len != dim * dim {
        return Err(Error::usage(format!(
            "expected {} entries for dimension {dim}, got {len}",
            dim * dim
        )));
    }
    Ok(())
}

pub(crate) fn real_matmul(d: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[k * d + j];
            }
        }
    }
    out
}

pub(crate) fn real_det(d: usize, v: &[f64]) -> f64 {
    let mut a = v.to_vec();
    let mut det = 1.0;
    for c in 0..d {
        let piv = (c..d)
            .max_by(|&i, &j| a[i * d + c].abs().total_cmp(&a[j * d + c].abs()))
            .unwrap();
        if a[piv * d + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for j in 0..d {
                a.swap(piv * d + j, c * d + j);
            }
            det = -det;
        }
        let p = a[c * d + c];
        det *= p;
        for r in c + 1..d {
            let f = a[r * d + c] / p;
            if f != 0.0 {
                for j in c..d {
                    a[r * d + j] -= f * a[c * d + j];
                }
            }
        }
    }
    det
}

fn real_inverse(d: usize, v: &[f64]) -> Result<Vec<f64>> {
    let mut a = v.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    for c in 0..d {
        let piv = (c..d)
            .max_by(|&i, &j| a[i * d + c].abs().total_cmp(&a[j * d + c].abs()))
            .unwrap();
        if a[piv * d + c] == 0.0 {
            return Err(Error::domain("singular matrix"));
        }
        if piv != c {
            for j in 0..d {
                a.swap(piv * d + j, c * d + j);
                inv.swap(piv * d + j, c * d + j);
            }
        }
        let p = a[c * d + c];
        for j in 0..d {
            a[c * d + j] /= p;
            inv[c * d + j] /= p;
        }
        for r in 0..d {
            if r == c {
                continue;
            }
            let f = a[r * d + c];
            if f != 0.0 {
                for j in 0..d {
                    a[r * d + j] -= f * a[c * d + j];
                    inv[r * d + j] -= f * inv[c * d + j];
                }
            }
        }
    }
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(
            "inverse overflowed: matrix numerically singular",
        ));
    }
    Ok(inv)
}

pub(crate) fn rational_det(d: usize, mut a: Vec<BigRational>) -> BigRational {
    let mut det = BigRational::one();
    for c in 0..d {
        let Some(piv) = (c..d).find(|&r| !a[r * d + c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            for j in 0..d {
                a.swap(piv * d + j, c * d + j);
            }
            det = -det;
        }
        let p = a[c * d + c].clone();
        det *= &p;
        for r in c + 1..d {
            if a[r * d + c].is_zero() {
                continue;
            }
            let f = &a[r * d + c] / &p;
            for j in c..d {
                let t = &f * &a[c * d + j];
                a[r * d + j] -= t;
            }
        }
    }
    det
}

fn rational_inverse(d: usize, v: &[BigRational]) -> Result<Vec<BigRational>> {
    let mut a = v.to_vec();
    let mut inv = vec![BigRational::zero(); d * d];
    for i in 0..d {
        inv[i * d + i] = BigRational::one();
    }
    for c in 0..d {
        let piv = (c..d)
            .find(|&r| !a[r * d + c].is_zero())
            .ok_or_else(|| Error::domain("singular matrix"))?;
        if piv != c {
            for j in 0..d {
                a.swap(piv * d + j, c * d + j);
                inv.swap(piv * d + j, c * d + j);
            }
        }
        let p = a[c * d + c].recip();
        for j in 0..d {
            a[c * d + j] *= &p;
            inv[c * d + j] *= &p;
        }
        for r in 0..d {
            if r == c || a[r * d + c].is_zero() {
                continue;
            }
            let f = a[r * d + c].clone();
            for j in 0..d {
                let t = &f * &a[c * d + j];
                a[r * d + j] -= t;
                let t = &f * &inv[c * d + j];
                inv[r * d + j] -= t;
            }
        }
    }
    Ok(inv)
}

/// Frobenius norm of a real matrix slice.
pub fn frobenius(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests;
