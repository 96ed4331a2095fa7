//! Randomized checks of the moment inequalities behind the almost-additive
//! limit theorems.
//!
//! Each suite draws `instances` random cases from a documented generator and
//! counts hard violations, i.e. cases with `lhs > rhs (1 + 1e-9) + 1e-300`.
//! Law-level suites evaluate both sides exactly on finitely supported laws
//! (or exact covariances), so a violation is a counterexample, not noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{frobenius, integral_square_check, sqrt_psd, var_q};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` seen.
    pub max_ratio: f64,
    /// Description of the case attaining `max_ratio`.
    pub worst: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            report: SuiteReport {
                name: name.to_string(),
                instances: 0,
                violations: 0,
                max_ratio: 0.0,
                worst: String::new(),
            },
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, case: impl FnOnce() -> String) {
        let r = &mut self.report;
        r.instances += 1;
        if lhs > rhs * (1.0 + 1e-9) + 1e-300 {
            r.violations += 1;
        }
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > r.max_ratio {
            r.max_ratio = ratio;
            r.worst = case();
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian vector with a log-normal overall scale.
fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let s = normal(rng).exp();
    (0..d).map(|_| s * normal(rng)).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// `q` uniform on `(lo, hi]`.
fn exponent(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    hi - (hi - lo) * rng.random::<f64>()
}

fn qge1_generic(
    seed: u64,
    instances: usize,
    name: &str,
    x_factor: impl Fn(f64) -> f64,
) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new(name);
    for _ in 0..instances {
        let d = rng.random_range(1..=3);
        let q = exponent(&mut rng, 1.0, 2.0);
        let x = random_vec(&mut rng, d);
        let y = random_vec(&mut rng, d);
        let ny = norm(&y);
        let lhs = norm(&add(&x, &y)).powf(q);
        let rhs = x_factor(q) * norm(&x).powf(q) + ny.powf(q) + q * ny.powf(q - 2.0) * dot(&y, &x);
        t.record(lhs, rhs, || format!("q = {q}, x = {x:?}, y = {y:?}"));
    }
    t.report
}

/// `||x + y||^q <= ||x||^q + ||y||^q + q ||y||^(q-2) <y, x>` for `q` in `(1, 2]`.
pub fn qge1_suite(seed: u64, instances: usize) -> SuiteReport {
    qge1_generic(seed, instances, "qge1", |_| 1.0)
}

/// Same with `2^(2-q) ||x||^q`, the form that holds for every pair.
pub fn qge1_corrected_suite(seed: u64, instances: usize) -> SuiteReport {
    qge1_generic(seed, instances, "qge1 with 2^(2-q)", |q| 2f64.powf(2.0 - q))
}

/// `||x + y||^q <= ||x||^q + ||y||^q` for `q` in `(0, 1]`.
pub fn qle1_suite(seed: u64, instances: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("qle1");
    for _ in 0..instances {
        let d = rng.random_range(1..=3);
        let q = exponent(&mut rng, 0.0, 1.0);
        let x = random_vec(&mut rng, d);
        let y = random_vec(&mut rng, d);
        let lhs = norm(&add(&x, &y)).powf(q);
        let rhs = norm(&x).powf(q) + norm(&y).powf(q);
        t.record(lhs, rhs, || format!("q = {q}, x = {x:?}, y = {y:?}"));
    }
    t.report
}

/// `Var_q(A + B)^(1/q) <= Var_q(A)^(1/q) + Var_q(B)^(1/q)` on paired samples
/// of 2 to 16 points, with `B` partly correlated with `A`.
pub fn minkowski_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("Var_q Minkowski");
    for _ in 0..instances {
        let d = rng.random_range(1..=3);
        let m = rng.random_range(2..=16);
        let q = 1.0 + rng.random::<f64>();
        let c = normal(&mut rng);
        let a: Vec<Vec<f64>> = (0..m).map(|_| random_vec(&mut rng, d)).collect();
        let b: Vec<Vec<f64>> = a
            .iter()
            .map(|x| {
                let noise = random_vec(&mut rng, d);
                x.iter().zip(&noise).map(|(u, v)| c * u + v).collect()
            })
            .collect();
        let s: Vec<Vec<f64>> = a.iter().zip(&b).map(|(x, y)| add(x, y)).collect();
        let lhs = var_q(&s, q)?.powf(q.recip());
        let rhs = var_q(&a, q)?.powf(q.recip()) + var_q(&b, q)?.powf(q.recip());
        t.record(lhs, rhs, || format!("q = {q}, m = {m}, d = {d}"));
    }
    Ok(t.report)
}

/// A law on `k` atoms given by positions and weights.
struct FiniteLaw {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl FiniteLaw {
    fn random(rng: &mut ChaCha8Rng, d: usize) -> Self {
        let k = rng.random_range(2..=4);
        let atoms = (0..k).map(|_| random_vec(rng, d)).collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        FiniteLaw {
            atoms,
            weights: raw.iter().map(|w| w / total).collect(),
        }
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> Self {
        let k = rng.random_range(1..=2);
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        for w in raw {
            let v = random_vec(rng, d);
            atoms.push(v.iter().map(|x| -x).collect());
            atoms.push(v);
            weights.extend([w / (2.0 * total); 2]);
        }
        FiniteLaw { atoms, weights }
    }

    fn centred(mut self) -> Self {
        let d = self.atoms[0].len();
        let mut m = vec![0.0; d];
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            for (mi, ai) in m.iter_mut().zip(a) {
                *mi += w * ai;
            }
        }
        for a in &mut self.atoms {
            for (ai, mi) in a.iter_mut().zip(&m) {
                *ai -= mi;
            }
        }
        self
    }

    /// `E ||x||^q`; the law is already centred.
    fn moment(&self, q: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w * norm(a).powf(q))
            .sum()
    }

    fn independent_sum(&self, other: &FiniteLaw) -> FiniteLaw {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (a, wa) in self.atoms.iter().zip(&self.weights) {
            for (b, wb) in other.atoms.iter().zip(&other.weights) {
                atoms.push(add(a, b));
                weights.push(wa * wb);
            }
        }
        FiniteLaw { atoms, weights }
    }
}

fn superadditivity_generic(
    seed: u64,
    instances: usize,
    name: &str,
    gen: impl Fn(&mut ChaCha8Rng, usize) -> FiniteLaw,
) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new(name);
    for _ in 0..instances {
        let d = rng.random_range(1..=3);
        let q = 1.0 + rng.random::<f64>();
        let x = gen(&mut rng, d).centred();
        let y = gen(&mut rng, d).centred();
        let lhs = x.independent_sum(&y).moment(q);
        let rhs = x.moment(q) + y.moment(q);
        t.record(lhs, rhs, || {
            format!(
                "q = {q}, x = {:?} w {:?}, y = {:?} w {:?}",
                x.atoms, x.weights, y.atoms, y.weights
            )
        });
    }
    t.report
}

/// `Var_q(x + y) <= Var_q(x) + Var_q(y)` for independent `x`, `y`, evaluated
/// exactly on random laws with 2 to 4 atoms, `q` in `[1, 2)`.
pub fn superadditivity_suite(seed: u64, instances: usize) -> SuiteReport {
    superadditivity_generic(seed, instances, "Var_q superadditivity", FiniteLaw::random)
}

/// The same on symmetric laws.
pub fn superadditivity_symmetric_suite(seed: u64, instances: usize) -> SuiteReport {
    superadditivity_generic(
        seed,
        instances,
        "Var_q superadditivity, symmetric laws",
        FiniteLaw::random_symmetric,
    )
}

fn gram(d: usize, m: usize, a: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = (0..m).map(|k| a[i * m + k] * a[j * m + k]).sum();
        }
    }
    g
}

fn random_factor(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Vec<f64> {
    let s = normal(rng).exp();
    (0..d * m).map(|_| s * normal(rng)).collect()
}

fn sqrt_gap(d: usize, big: &[f64], small: &[f64]) -> Result<f64> {
    let s1 = sqrt_psd(d, big)?;
    let s0 = sqrt_psd(d, small)?;
    Ok(frobenius(
        &s1.iter().zip(&s0).map(|(a, b)| a - b).collect::<Vec<_>>(),
    ))
}

/// `||sqrt Cov(x + y) - sqrt Cov(x)||_F <= sqrt Var(y)` for `x = A z`,
/// `y = B z` with a common standard Gaussian `z`, covariances computed exactly.
pub fn cov_var_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("sqrt Cov contraction");
    for _ in 0..instances {
        let d = rng.random_range(2..=3);
        let m = rng.random_range(d..=d + 2);
        let a = random_factor(&mut rng, d, m);
        let b = random_factor(&mut rng, d, m);
        let ab: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
        let lhs = sqrt_gap(d, &gram(d, m, &ab), &gram(d, m, &a))?;
        let rhs = frobenius(&b);
        t.record(lhs, rhs, || format!("d = {d}, A = {a:?}, B = {b:?}"));
    }
    Ok(t.report)
}

/// The same with `x`, `y` independent: `Cov(x + y) = A A^T + B B^T`.
pub fn cov_var_independent_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("sqrt Cov contraction, independent");
    for _ in 0..instances {
        let d = rng.random_range(2..=3);
        let m = rng.random_range(d..=d + 2);
        let a = random_factor(&mut rng, d, m);
        let b = random_factor(&mut rng, d, m);
        let ga = gram(d, m, &a);
        let sum: Vec<f64> = ga.iter().zip(gram(d, m, &b)).map(|(u, v)| u + v).collect();
        let lhs = sqrt_gap(d, &sum, &ga)?;
        let rhs = frobenius(&b);
        t.record(lhs, rhs, || format!("d = {d}, A = {a:?}, B = {b:?}"));
    }
    Ok(t.report)
}

/// The integral-square inequality on empirical laws of 1 to 64 points drawn
/// from exponential, Pareto, uniform, two-point and point-mass laws.
pub fn integral_square_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("integral square");
    for _ in 0..instances {
        let n = rng.random_range(1..=64);
        let q = exponent(&mut rng, 0.0, 4.0);
        let family = rng.random_range(0..5);
        let alpha = 0.5 + 2.5 * rng.random::<f64>();
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let u = 1.0 - rng.random::<f64>();
                match family {
                    0 => -u.ln(),
                    1 => u.powf(-1.0 / alpha),
                    2 => u,
                    3 => {
                        if u < 0.1 {
                            10.0
                        } else {
                            0.0
                        }
                    }
                    _ => 1.0,
                }
            })
            .collect();
        let r = integral_square_check(&xs, q)?;
        t.record(r.lhs, r.rhs, || {
            format!("family {family}, q = {q}, n = {n}")
        });
    }
    Ok(t.report)
}
