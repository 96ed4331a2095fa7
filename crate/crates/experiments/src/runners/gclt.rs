use mwl_core::stable::{normalizing_sequences, sample, StableParams};
use mwl_core::stats::ks_distance;
use mwl_core::{Error, Result};

use super::{col, groups, simulate_for};
use crate::config::Config;
use crate::estimate::{batch_se, mean, median, ols, se_mean, wasserstein_sorted};
use crate::report::{Curve, RunReport};
use crate::steplaw::Hypothesis;

/// Compares `(kappa(gbar_n) - b_n + n b) / a_n`, `(sum kappa(g_k) - b_n) / a_n`
/// and the totally skewed stable limit `L^{alpha,1}_{1,0}`.
///
/// `b = -delta` for `alpha >= 1` and 0 otherwise, with `delta` estimated at
/// the largest `n`.
pub fn run(cfg: &Config) -> Result<RunReport> {
    let mut sim = simulate_for(
        "gclt",
        cfg,
        &[
            Hypothesis::Proximal,
            Hypothesis::StronglyIrreducible,
            Hypothesis::InSl,
        ],
        false,
    )?;
    let tail = sim.law.kappa_tail().ok_or_else(|| {
        Error::Usage("gclt needs a step law with a known kappa tail (kind rot-heavy-diag)".into())
    })?;
    let alpha = tail.alpha;
    if alpha >= 2.0 {
        return Err(Error::Usage(
            "gclt needs a tail index below 2; use clt".into(),
        ));
    }
    let qs: Vec<f64> = cfg.stats.q.iter().copied().filter(|q| *q < alpha).collect();
    let q = *qs
        .first()
        .ok_or_else(|| Error::Usage(format!("gclt needs some stats.q below alpha = {alpha}")))?;
    let ns = normalizing_sequences(&tail, &sim.grid)?;
    let paths = &sim.paths;
    let g = groups(paths.len());
    let last = sim.grid.len() - 1;
    let n_max = sim.grid[last] as f64;
    let del = col(paths, |p| p.delta[last] / n_max);
    let (delta, delta_se) = (mean(&del), se_mean(&del));
    let b = if alpha >= 1.0 { -delta } else { 0.0 };
    let oracle_params = StableParams::new(alpha, 1.0, 1.0, 0.0)?;
    let oracle = sample(
        &oracle_params,
        cfg.grid.seed ^ 0x5eed_0f57_ab1e,
        cfg.stats.oracle_size,
    );

    let mut curve = Curve::new(
        "gclt",
        &[
            "a_n",
            "b_n",
            "w_q",
            "w_q_se",
            "ks_matrix",
            "ks_matrix_se",
            "ks_sum",
            "median_gap",
            "median_gap_se",
        ],
    );
    let mut max_wq = 0.0f64;
    for (i, &n) in sim.grid.iter().enumerate() {
        let nf = n as f64;
        let (an, bn) = (ns.a[i], ns.b[i]);
        let x = col(paths, |p| (p.kappa[i] - bn + nf * b) / an);
        let y = col(paths, |p| (p.kappa_sum[i] - bn) / an);
        let gap = col(paths, |p| (p.delta[i] + nf * b).abs() / an);
        let wq = wasserstein_sorted(&x, &y, q);
        max_wq = max_wq.max(wq);
        let pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        let wq_se = batch_se(&pairs, g, |s| {
            let (a, b): (Vec<f64>, Vec<f64>) = s.iter().copied().unzip();
            wasserstein_sorted(&a, &b, q)
        });
        let ks = ks_distance(&x, &oracle)?;
        let ks_se = batch_se(&x, g, |s| ks_distance(s, &oracle).unwrap_or(f64::NAN));
        let ks_sum = ks_distance(&y, &oracle)?;
        let med = median(&gap);
        let med_se = batch_se(&gap, g, median);
        curve.push(n, vec![an, bn, wq, wq_se, ks, ks_se, ks_sum, med, med_se]);
    }
    let ks = curve.column("ks_matrix").unwrap();
    let med = curve.column("median_gap").unwrap();
    let an_last = ns.a[last];
    let r = &mut sim.report;
    r.value("delta", delta);
    r.value("delta_se", delta_se);
    r.value("b", b);
    r.value("median_gap", med[last]);
    r.value("ks_matrix", ks[last]);
    r.value("q", q);

    if sim.law.flags.commuting == Some(true) {
        r.check(
            "commuting_wq_zero",
            max_wq <= 1e-9,
            format!("max W_{q} = {max_wq:.3e}"),
        );
    }
    // error of b propagated to the median at n_max
    let slack = n_max * delta_se / an_last;
    let limit = cfg.stats.thresholds.median_max + 3.0 * slack;
    r.check(
        "median_gap",
        med[last] <= limit,
        format!(
            "median |delta_kappa + n b| / a_n = {:.4} (max {limit:.4})",
            med[last]
        ),
    );
    let k = 4.min(ks.len());
    let xs: Vec<f64> = sim.grid[sim.grid.len() - k..]
        .iter()
        .map(|n| (*n as f64).ln())
        .collect();
    let (slope, _, _) = ols(&xs, &ks[ks.len() - k..]);
    r.value("ks_slope", slope);
    r.check(
        "ks_decreasing",
        slope < 0.0,
        format!(
            "OLS slope of KS vs ln n over last {k} = {slope:.4e}; KS = {:?}",
            ks[ks.len() - k..]
                .iter()
                .map(|v| (v * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
    );
    r.curves.push(curve);
    Ok(sim.report)
}
