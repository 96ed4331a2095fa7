//! Statistical functionals: fractional variance, 1-d Wasserstein distance,
//! covariance square roots, empirical characteristic functions and KS
//! distances, and the right-hand side of the norm-cancellation tail bound.
//!
//! Matrices are row-major `d x d` slices.

mod suites;
mod summary;

pub use suites::{
    cov_var_independent_suite, cov_var_suite, integral_square_suite, minkowski_suite,
    qge1_corrected_suite, qge1_suite, qle1_suite, superadditivity_suite,
    superadditivity_symmetric_suite, SuiteReport,
};
pub use summary::{SampleSummary, SummaryJson};

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::symmetric_eigen;

fn mean_of<P: AsRef<[f64]>>(sample: &[P]) -> Result<Vec<f64>> {
    let first = sample.first().ok_or_else(|| Error::usage("empty sample"))?;
    let d = first.as_ref().len();
    let mut m = vec![0.0; d];
    for x in sample {
        let x = x.as_ref();
        if x.len() != d {
            return Err(Error::usage("points of different dimensions"));
        }
        for (mi, xi) in m.iter_mut().zip(x) {
            *mi += xi;
        }
    }
    let n = sample.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    Ok(m)
}

/// `mean ||x - mean(x)||^q` over the sample.
pub fn var_q<P: AsRef<[f64]>>(sample: &[P], q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::usage(format!("exponent q = {q} must be positive")));
    }
    let m = mean_of(sample)?;
    let total: f64 = sample
        .iter()
        .map(|x| {
            x.as_ref()
                .iter()
                .zip(&m)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .powf(q / 2.0)
        })
        .sum();
    Ok(total / sample.len() as f64)
}

/// [`var_q`] for a real sample.
pub fn var_q_1d(sample: &[f64], q: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::usage("empty sample"));
    }
    if !(q > 0.0) {
        return Err(Error::usage(format!("exponent q = {q} must be positive")));
    }
    let m = sample.iter().sum::<f64>() / sample.len() as f64;
    Ok(sample.iter().map(|x| (x - m).abs().powf(q)).sum::<f64>() / sample.len() as f64)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `(mean_i |A_(i) - B_(i)|^q)^min(1, 1/q)` under the sorted coupling.
///
/// When the sizes differ the larger sample is subsampled without
/// replacement to the smaller size, using a ChaCha8 stream seeded by `seed`.
pub fn wasserstein_q_1d(a: &[f64], b: &[f64], q: f64, seed: u64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::usage("empty sample"));
    }
    if !(q > 0.0) {
        return Err(Error::usage(format!("exponent q = {q} must be positive")));
    }
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    if x.len() != y.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (big, small) = if x.len() > y.len() {
            (&mut x, y.len())
        } else {
            (&mut y, x.len())
        };
        let idx = sample_indices(&mut rng, big.len(), small);
        *big = idx.iter().map(|i| big[i]).collect();
    }
    let (x, y) = (sorted(&x), sorted(&y));
    let s: f64 = x
        .iter()
        .zip(&y)
        .map(|(u, v)| (u - v).abs().powf(q))
        .sum::<f64>()
        / x.len() as f64;
    Ok(s.powf(q.recip().min(1.0)))
}

pub fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symmetric PSD square root through a Jacobi eigendecomposition.
///
/// Eigenvalues down to `-1e-10` (relative to the largest entry) are clamped to 0.
pub fn sqrt_psd(d: usize, m: &[f64]) -> Result<Vec<f64>> {
    if m.len() != d * d {
        return Err(Error::usage(format!(
            "expected {} entries, got {}",
            d * d,
            m.len()
        )));
    }
    let scale = m.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    for i in 0..d {
        for j in 0..i {
            if (m[i * d + j] - m[j * d + i]).abs() > 1e-10 * scale {
                return Err(Error::usage(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    let eig = symmetric_eigen(d, m)?;
    let mut s = vec![0.0; d * d];
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda < -1e-10 * scale {
            return Err(Error::usage(format!("negative eigenvalue {lambda}")));
        }
        let r = lambda.max(0.0).sqrt();
        for i in 0..d {
            for j in 0..d {
                s[i * d + j] += r * eig.vectors[i * d + k] * eig.vectors[j * d + k];
            }
        }
    }
    Ok(s)
}

/// Biased covariance of a sample of vectors, row-major.
pub fn covariance<P: AsRef<[f64]>>(sample: &[P]) -> Result<Vec<f64>> {
    let m = mean_of(sample)?;
    let d = m.len();
    let mut c = vec![0.0; d * d];
    for x in sample {
        let x = x.as_ref();
        for i in 0..d {
            for j in 0..=i {
                c[i * d + j] += (x[i] - m[i]) * (x[j] - m[j]);
            }
        }
    }
    let n = sample.len() as f64;
    for i in 0..d {
        for j in 0..=i {
            c[i * d + j] /= n;
            c[j * d + i] = c[i * d + j];
        }
    }
    Ok(c)
}

pub fn empirical_cf(sample: &[f64], thetas: &[f64]) -> Vec<Complex64> {
    let n = sample.len() as f64;
    thetas
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let (mut re, mut im) = (0.0, 0.0);
            for x in sample {
                let (s, c) = (t * x).sin_cos();
                re += c;
                im += s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::usage("empty sample"));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
pub fn ks_distance_cdf(a: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::usage("empty sample"));
    }
    let a = sorted(a);
    let n = a.len() as f64;
    Ok(a.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs())
    }))
}

/// Right-continuous empirical survival function `s -> #{x > s} / n`.
#[derive(Clone, Debug)]
pub struct EmpiricalSurvival {
    sorted: Vec<f64>,
}

impl EmpiricalSurvival {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::usage("empty sample"));
        }
        Ok(EmpiricalSurvival {
            sorted: sorted(sample),
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let k = self.sorted.partition_point(|x| *x <= s);
        (self.sorted.len() - k) as f64 / self.sorted.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBound {
    /// `sum_{k=1}^{k_max} C e^(-beta k) P(N > t / k)^2`.
    pub partial: f64,
    /// `C e^(-beta k_max) / (1 - e^(-beta))`, a bound on the omitted terms.
    pub remainder: f64,
    /// `partial + remainder`.
    pub value: f64,
}

/// `sum_k C e^(-beta k) P(N > t / k)^2`, truncated at `k_max` with an explicit remainder.
pub fn tail_bound_rhs(
    t: f64,
    c: f64,
    beta: f64,
    tail: impl Fn(f64) -> f64,
    k_max: usize,
) -> Result<TailBound> {
    if !(beta > 0.0) {
        return Err(Error::usage(format!(
            "decay rate beta = {beta} must be positive"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::usage(format!("constant C = {c} must be positive")));
    }
    if t < 0.0 {
        return Err(Error::usage("t must be non-negative"));
    }
    let partial: f64 = (1..=k_max)
        .map(|k| {
            let p = tail(t / k as f64).clamp(0.0, 1.0);
            c * (-beta * k as f64).exp() * p * p
        })
        .sum();
    let remainder = c * (-beta * k_max as f64).exp() / (1.0 - (-beta).exp());
    Ok(TailBound {
        partial,
        remainder,
        value: partial + remainder,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralSquare {
    /// `int_0^inf q t^(q-1) P(x > t)^2 dt` for the empirical law.
    pub lhs: f64,
    /// `2 E(x^(q/2))^2`.
    pub rhs: f64,
    pub ok: bool,
}

/// Both sides of `int q t^(q-1) P(x > t)^2 dt <= 2 E(x^(q/2))^2` for the
/// empirical law of a non-negative sample.
///
/// The survival function is constant between order statistics, so the
/// integral is the exact sum of `S^2 (x_(i+1)^q - x_(i)^q)`.
pub fn integral_square_check(sample: &[f64], q: f64) -> Result<IntegralSquare> {
    if sample.is_empty() {
        return Err(Error::usage("empty sample"));
    }
    if !(q > 0.0) {
        return Err(Error::usage(format!("exponent q = {q} must be positive")));
    }
    if sample.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::usage("sample must be non-negative"));
    }
    let xs = sorted(sample);
    let n = xs.len() as f64;
    let mut lhs = 0.0;
    let mut prev = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let surv = (xs.len() - i) as f64 / n;
        lhs += surv * surv * (x.powf(q) - prev.powf(q));
        prev = x;
    }
    let m = xs.iter().map(|x| x.powf(q / 2.0)).sum::<f64>() / n;
    let rhs = 2.0 * m * m;
    Ok(IntegralSquare {
        lhs,
        rhs,
        ok: lhs <= rhs * 1.05,
    })
}

#[cfg(test)]
mod tests;
