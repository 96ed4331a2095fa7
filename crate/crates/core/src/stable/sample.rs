//! Samplers: Chambers-Mallows-Stuck transform and the Poisson series.
//!
//! Series representation. With `tbar_k` the arrival times of a unit-rate
//! Poisson process and `y_k` i.i.d. directions from the harmonic measure,
//!
//! ```text
//! X = a sum_{k>=1} (tbar_k^(-1/alpha) y_k - c_k E(y)),   c_k = int_k^{k+1} t^(-1/alpha) dt  (alpha >= 1)
//! ```
//!
//! (`c_k = 0` for `alpha < 1`). Its points `a tbar^(-1/alpha) y` form a
//! Poisson process with Levy measure `alpha a^alpha r^(-alpha-1) dr x beta_hat`,
//! compensated on `r < a`. Relative to the centred law of the
//! characteristic-function parametrization this shifts the location by
//! `a E(y) alpha / (alpha - 1)` for `alpha > 1` and by `a E(y) (1 - gamma_E)`
//! for `alpha = 1`; [`sample_series`] subtracts that constant and adds `b`.
//! In dimension 1 the harmonic measure `((1 + s) / 2, (1 - s) / 2)` on
//! `{+1, -1}` produces `beta = s` for `alpha != 1` and `beta = pi s / 2` at
//! `alpha = 1`.
//!
//! Truncation after `K` terms leaves the points with `tbar > T = tbar_{K+1}`.
//! Their contribution has mean `a E(y) (int_T^inf - int_{K+1}^inf) t^(-1/alpha) dt`
//! (the second integral only when compensating) and covariance
//! `a^2 E(y y^T) T^(1 - 2/alpha) / (2/alpha - 1)`. [`SeriesRemainder::Gaussian`]
//! adds the mean and a Gaussian with that covariance; [`SeriesRemainder::Drop`]
//! leaves the plain truncated series, whose error has root-mean-square size
//! about [`series_remainder_sd`].

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{c_alpha, StableParams};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Draws from `L(p)` by the Chambers-Mallows-Stuck transform.
pub fn sample_with<R: Rng + ?Sized>(p: &StableParams, rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| draw(p, rng)).collect()
}

/// `n` draws from `L(p)` with a ChaCha8 stream seeded by `seed`.
pub fn sample(p: &StableParams, seed: u64, n: usize) -> Vec<f64> {
    sample_with(p, &mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn draw<R: Rng + ?Sized>(p: &StableParams, rng: &mut R) -> f64 {
    let alpha = p.alpha();
    if alpha == 2.0 {
        let z: f64 = rng.sample(StandardNormal);
        return p.b() + p.a() * std::f64::consts::SQRT_2 * z;
    }
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    let c = c_alpha(alpha).unwrap();
    if alpha == 1.0 {
        // textbook S_1(sigma, beta1, mu) with beta1 = 2 beta / pi
        let sigma = c * p.a();
        let beta1 = 2.0 * p.beta() / PI;
        let mu = p.b() - 2.0 * p.beta() * p.a() * p.a().ln() / PI;
        let h = FRAC_PI_2 + beta1 * v;
        let x = (h * v.tan() - beta1 * ((FRAC_PI_2 * w * v.cos()) / h).ln()) / FRAC_PI_2;
        return sigma * x + 2.0 / PI * beta1 * sigma * sigma.ln() + mu;
    }
    let sigma = (c * p.a().powf(alpha)).powf(alpha.recip());
    let t = p.beta() * (PI * alpha / 2.0).tan();
    let b0 = t.atan() / alpha;
    let s = (1.0 + t * t).powf(1.0 / (2.0 * alpha));
    let x = s * (alpha * (v + b0)).sin() / v.cos().powf(alpha.recip())
        * ((v - alpha * (v + b0)).cos() / w).powf((1.0 - alpha) / alpha);
    sigma * x + p.b()
}

/// Law of the directions `y_k`.
#[derive(Clone, Debug)]
pub enum HarmonicMeasure {
    /// Finitely many unit vectors with weights summing to 1.
    Atoms {
        directions: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    /// Uniform law on the unit sphere of `R^d`.
    UniformSphere { dim: usize },
}

impl HarmonicMeasure {
    pub fn atoms(directions: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if directions.is_empty() || directions.len() != weights.len() {
            return Err(Error::usage(
                "need as many weights as directions, at least one",
            ));
        }
        let d = directions[0].len();
        if d == 0 || directions.iter().any(|v| v.len() != d) {
            return Err(Error::usage("directions must share a positive dimension"));
        }
        for v in &directions {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::usage(format!(
                    "direction {v:?} is not a unit vector"
                )));
            }
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::usage("weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::usage(format!("weights sum to {total}, not 1")));
        }
        Ok(HarmonicMeasure::Atoms {
            directions,
            weights,
        })
    }

    /// `{+1, -1}` with weights `((1 + s) / 2, (1 - s) / 2)`.
    pub fn two_point(s: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::usage(format!("skewness {s} outside [-1, 1]")));
        }
        HarmonicMeasure::atoms(
            vec![vec![1.0], vec![-1.0]],
            vec![(1.0 + s) / 2.0, (1.0 - s) / 2.0],
        )
    }

    /// The two-point measure whose series has the skewness `beta` of `p`.
    pub fn matching(p: &StableParams) -> Result<Self> {
        let s = if p.alpha() == 1.0 {
            2.0 * p.beta() / PI
        } else {
            p.beta()
        };
        HarmonicMeasure::two_point(s)
    }

    /// Parses lines `x_1 ... x_d weight`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number `{s}`", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if nums.len() < 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected a direction and a weight",
                    i + 1
                )));
            }
            weights.push(nums[nums.len() - 1]);
            dirs.push(nums[..nums.len() - 1].to_vec());
        }
        HarmonicMeasure::atoms(dirs, weights)
    }

    pub fn dim(&self) -> usize {
        match self {
            HarmonicMeasure::Atoms { directions, .. } => directions[0].len(),
            HarmonicMeasure::UniformSphere { dim } => *dim,
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            HarmonicMeasure::Atoms {
                directions,
                weights,
            } => {
                let mut m = vec![0.0; self.dim()];
                for (v, w) in directions.iter().zip(weights) {
                    for (mi, vi) in m.iter_mut().zip(v) {
                        *mi += w * vi;
                    }
                }
                m
            }
            HarmonicMeasure::UniformSphere { dim } => vec![0.0; *dim],
        }
    }

    /// `E(y y^T)`, row-major.
    pub fn second_moment(&self) -> Vec<f64> {
        let d = self.dim();
        let mut m = vec![0.0; d * d];
        match self {
            HarmonicMeasure::Atoms {
                directions,
                weights,
            } => {
                for (v, w) in directions.iter().zip(weights) {
                    for i in 0..d {
                        for j in 0..d {
                            m[i * d + j] += w * v[i] * v[j];
                        }
                    }
                }
            }
            HarmonicMeasure::UniformSphere { .. } => {
                for i in 0..d {
                    m[i * d + i] = 1.0 / d as f64;
                }
            }
        }
        m
    }
}

enum DirectionSampler<'a> {
    Atoms(&'a [Vec<f64>], WeightedIndex<f64>),
    Sphere(usize),
}

impl DirectionSampler<'_> {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            DirectionSampler::Atoms(dirs, idx) => out.copy_from_slice(&dirs[idx.sample(rng)]),
            DirectionSampler::Sphere(d) => loop {
                for o in out.iter_mut().take(*d) {
                    *o = rng.sample(StandardNormal);
                }
                let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    out.iter_mut().for_each(|x| *x /= norm);
                    break;
                }
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesRemainder {
    /// Plain truncation after `K` terms.
    Drop,
    /// Add the exact mean and a Gaussian with the exact covariance of the tail.
    Gaussian,
}

/// Root-mean-square size of the terms dropped after `K` terms, for unit scale
/// and unit-length directions: `sqrt(K^(1 - 2/alpha) / (2/alpha - 1))`.
pub fn series_remainder_sd(alpha: f64, k: usize) -> f64 {
    let e = 2.0 / alpha - 1.0;
    ((k as f64).powf(-e) / e).sqrt()
}

/// `int_lo^hi t^(-1/alpha) dt` (`hi` may be infinite when `alpha < 1`).
fn power_integral(alpha: f64, lo: f64, hi: f64) -> f64 {
    if alpha == 1.0 {
        return (hi / lo).ln();
    }
    let e = 1.0 - 1.0 / alpha;
    let top = if hi.is_infinite() { 0.0 } else { hi.powf(e) };
    (top - lo.powf(e)) / e
}

/// `n` draws of the truncated series (see module docs), each a vector of
/// the harmonic measure's dimension.
///
/// The location is set so that in dimension 1 the output law is
/// `L^{alpha,beta}_{a,b}` with `beta` determined by the harmonic measure.
/// In higher dimension `p.b()` must be 0 and `p.beta()` is not used.
pub fn sample_series<R: Rng + ?Sized>(
    p: &StableParams,
    measure: &HarmonicMeasure,
    rng: &mut R,
    n: usize,
    k_max: usize,
    remainder: SeriesRemainder,
) -> Result<Vec<Vec<f64>>> {
    let alpha = p.alpha();
    if alpha == 2.0 {
        return Err(Error::usage("series representation needs alpha < 2"));
    }
    if k_max == 0 {
        return Err(Error::usage("truncation K must be at least 1"));
    }
    let d = measure.dim();
    if d > 1 && p.b() != 0.0 {
        return Err(Error::usage("a shift b is only supported in dimension 1"));
    }
    let a = p.a();
    let mean_y = measure.mean();
    let compensate = alpha >= 1.0;
    let centring = if alpha > 1.0 {
        alpha / (alpha - 1.0)
    } else if alpha == 1.0 {
        1.0 - EULER_GAMMA
    } else {
        0.0
    };
    let comp_total = if compensate {
        power_integral(alpha, 1.0, k_max as f64 + 1.0)
    } else {
        0.0
    };
    // Cholesky factor of E(y y^T) for the Gaussian remainder
    let chol = cholesky(d, &measure.second_moment());
    let sampler = match measure {
        HarmonicMeasure::Atoms {
            directions,
            weights,
        } => DirectionSampler::Atoms(
            directions,
            WeightedIndex::new(weights).map_err(|e| Error::usage(e.to_string()))?,
        ),
        HarmonicMeasure::UniformSphere { dim } => DirectionSampler::Sphere(*dim),
    };
    let inv_alpha = alpha.recip();
    let mut y = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut acc = vec![0.0; d];
        let mut tbar = 0.0;
        for _ in 0..k_max {
            tbar += rng.sample::<f64, _>(Exp1);
            sampler.draw(rng, &mut y);
            let r = tbar.powf(-inv_alpha);
            for (s, yi) in acc.iter_mut().zip(&y) {
                *s += r * yi;
            }
        }
        for (s, m) in acc.iter_mut().zip(&mean_y) {
            *s -= comp_total * m;
        }
        if remainder == SeriesRemainder::Gaussian {
            let t = tbar + rng.sample::<f64, _>(Exp1);
            let tail_mean = if compensate {
                // int_T^inf - int_{K+1}^inf = int_T^{K+1}
                power_integral(alpha, t, k_max as f64 + 1.0)
            } else {
                power_integral(alpha, t, f64::INFINITY)
            };
            let e = 2.0 / alpha - 1.0;
            let sd = (t.powf(-e) / e).sqrt();
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            for i in 0..d {
                let g: f64 = (0..=i).map(|j| chol[i * d + j] * z[j]).sum();
                acc[i] += tail_mean * mean_y[i] + sd * g;
            }
        }
        let v = acc
            .iter()
            .zip(&mean_y)
            .map(|(s, m)| a * (s - centring * m) + p.b())
            .collect();
        out.push(v);
    }
    Ok(out)
}

/// Lower Cholesky factor of a PSD matrix (zero pivots give zero columns).
fn cholesky(d: usize, m: &[f64]) -> Vec<f64> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * d + k] * l[j * d + k]).sum();
            if i == j {
                l[i * d + i] = (m[i * d + i] - s).max(0.0).sqrt();
            } else if l[j * d + j] > 0.0 {
                l[i * d + j] = (m[i * d + j] - s) / l[j * d + j];
            }
        }
    }
    l
}
