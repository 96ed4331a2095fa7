use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// What the normalizing sequences need to know about a one-dimensional law.
#[derive(Clone)]
pub struct TailSpec {
    /// Tail index in `(0, 2]`; 2 means finite variance.
    pub alpha: f64,
    /// `alpha < 2`: constant `c` with `P(|X| > t) ~ c t^-alpha`.
    /// `alpha = 2`: the standard deviation.
    pub scale: f64,
    /// `E(X)`, needed when `alpha > 1`.
    pub mean: Option<f64>,
    /// `t -> E(X 1{|X| <= t})`, needed when `alpha = 1`.
    pub truncated_mean: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl std::fmt::Debug for TailSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TailSpec")
            .field("alpha", &self.alpha)
            .field("scale", &self.scale)
            .field("mean", &self.mean)
            .field("truncated_mean", &self.truncated_mean.is_some())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSeq {
    pub n: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// `a_n = (c n)^(1/alpha)` (or `sigma sqrt(n)` at `alpha = 2`), and
/// `b_n = 0` (`alpha < 1`), `n E(X)` (`alpha > 1`) or
/// `n E(X 1{|X| <= a_n})` (`alpha = 1`).
///
/// With this `a_n`, partial sums of a law with tail `P(X > t) ~ c_+ t^-alpha`,
/// `P(X < -t) ~ c_- t^-alpha` converge to a law of scale `a = 1`.
pub fn normalizing_sequences(spec: &TailSpec, grid: &[usize]) -> Result<NormSeq> {
    let alpha = spec.alpha;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::usage(format!("tail index {alpha} outside (0, 2]")));
    }
    if !(spec.scale > 0.0) {
        return Err(Error::usage("tail scale must be positive"));
    }
    if grid.contains(&0) {
        return Err(Error::usage("grid entries must be positive"));
    }
    let mut a = Vec::with_capacity(grid.len());
    let mut b = Vec::with_capacity(grid.len());
    for &n in grid {
        let nf = n as f64;
        let an = if alpha == 2.0 {
            spec.scale * nf.sqrt()
        } else {
            (spec.scale * nf).powf(alpha.recip())
        };
        let bn = if alpha < 1.0 {
            0.0
        } else if alpha == 1.0 {
            let tm = spec
                .truncated_mean
                .as_ref()
                .ok_or_else(|| Error::usage("alpha = 1 needs the truncated mean"))?;
            nf * tm(an)
        } else {
            nf * spec
                .mean
                .ok_or_else(|| Error::usage("alpha > 1 needs the mean"))?
        };
        a.push(an);
        b.push(bn);
    }
    if a.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::usage("grid must be non-decreasing"));
    }
    Ok(NormSeq {
        n: grid.to_vec(),
        a,
        b,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoaTable {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    /// `ratios[i][j] = U(r_j t_i) / U(t_i)` with `U(t) = E(X^2 1{|X| <= t})`.
    pub ratios: Vec<Vec<f64>>,
    /// `max |ratio - r^(2 - alpha)|`.
    pub sup_distance: f64,
}

/// Truncated second moments `U(rt) / U(t)` against `r^(2 - alpha)`.
pub fn doa_diagnostic(sample: &[f64], alpha: f64, r: &[f64], t: &[f64]) -> Result<DoaTable> {
    let mut sq: Vec<f64> = sample.iter().map(|x| x * x).collect();
    sq.sort_by(f64::total_cmp);
    let mut prefix = Vec::with_capacity(sq.len() + 1);
    prefix.push(0.0);
    for v in &sq {
        prefix.push(prefix.last().unwrap() + v);
    }
    let u = |level: f64| {
        let cut = level * level;
        let k = sq.partition_point(|v| *v <= cut);
        prefix[k]
    };
    let mut ratios = Vec::with_capacity(t.len());
    let mut sup: f64 = 0.0;
    for &ti in t {
        let base = u(ti);
        if base <= 0.0 {
            return Err(Error::domain(format!(
                "insufficient tail data below t = {ti}"
            )));
        }
        let row: Vec<f64> = r.iter().map(|&rj| u(rj * ti) / base).collect();
        for (rj, ratio) in r.iter().zip(&row) {
            sup = sup.max((ratio - rj.powf(2.0 - alpha)).abs());
        }
        ratios.push(row);
    }
    Ok(DoaTable {
        r: r.to_vec(),
        t: t.to_vec(),
        ratios,
        sup_distance: sup,
    })
}

/// Hill estimator on the top `k` order statistics:
/// `k / sum_{i<=k} log(x_(i) / x_(k+1))`.
pub fn hill_tail_index(sample: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k >= sample.len() {
        return Err(Error::usage(format!(
            "k = {k} must lie in 1..{}",
            sample.len()
        )));
    }
    let mut s = sample.to_vec();
    let (_, kth, top) = s.select_nth_unstable_by(sample.len() - k - 1, |a, b| a.total_cmp(b));
    let threshold = *kth;
    if !(threshold > 0.0) {
        return Err(Error::usage("order statistics in range must be positive"));
    }
    let sum: f64 = top.iter().map(|x| (x / threshold).ln()).sum();
    if sum <= 0.0 {
        return Err(Error::usage(
            "degenerate sample: top order statistics are equal",
        ));
    }
    Ok(k as f64 / sum)
}
