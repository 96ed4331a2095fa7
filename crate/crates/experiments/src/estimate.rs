//! Small estimators with Monte Carlo standard errors.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn se_mean(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Batch-means standard error of `stat`: the sample is cut into `groups`
/// contiguous batches, and the spread of the batch values over
/// `sqrt(groups)` estimates the error of the full-sample value.
pub fn batch_se<T>(xs: &[T], groups: usize, stat: impl Fn(&[T]) -> f64) -> f64 {
    let groups = groups.min(xs.len());
    if groups < 2 {
        return 0.0;
    }
    let size = xs.len() / groups;
    let vals: Vec<f64> = (0..groups)
        .map(|g| stat(&xs[g * size..(g + 1) * size]))
        .collect();
    (variance(&vals) / groups as f64).sqrt()
}

/// Least-squares slope and intercept of `y` on `x`, with `R^2`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, my - slope * mx, r2)
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Standard normal quantiles at the plotting positions `(i + 1/2) / m`.
pub fn gaussian_grid(m: usize) -> Vec<f64> {
    let z = Normal::new(0.0, 1.0).expect("standard normal");
    (0..m)
        .map(|i| z.inverse_cdf((i as f64 + 0.5) / m as f64))
        .collect()
}

/// `(x - mean) / sd`; all zeros when the sample is constant.
pub fn standardize(xs: &[f64]) -> Vec<f64> {
    let m = mean(xs);
    let s = variance(xs).sqrt();
    xs.iter()
        .map(|x| if s > 0.0 { (x - m) / s } else { 0.0 })
        .collect()
}

/// Quantile-coupled `W_q` of two samples of the same size.
pub fn wasserstein_sorted(a: &[f64], b: &[f64], q: f64) -> f64 {
    let a = sorted(a);
    let b = sorted(b);
    assert_eq!(a.len(), b.len());
    let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs().powf(q)).sum();
    (s / a.len() as f64).powf(1.0 / q)
}
