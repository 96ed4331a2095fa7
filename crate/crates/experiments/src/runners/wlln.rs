use mwl_core::Result;

use super::{abs_moment, col, decreasing_tail, simulate_for};
use crate::config::Config;
use crate::estimate::{mean, se_mean};
use crate::report::{Curve, RunReport};
use crate::sampling::PathRecord;
use crate::steplaw::Hypothesis;

/// `C_q` estimate: the largest `E|dS|^q` over the stored dyadic levels,
/// returned with the standard error of that level.
pub(crate) fn c_q(paths: &[PathRecord], q: f64) -> (f64, f64) {
    let levels = paths[0].defects.len();
    let mut best = (0.0, 0.0);
    for j in 0..levels {
        let xs: Vec<f64> = paths
            .iter()
            .flat_map(|p| p.defects[j].iter().copied())
            .collect();
        if xs.is_empty() {
            continue;
        }
        let m = abs_moment(&xs, q);
        if m.0 > best.0 {
            best = m;
        }
    }
    best
}

/// `E|delta_kappa(gamma~_{0,n}) - n delta|^q / n` (centred only when `q >= 1`),
/// next to the dominating bound `n C_q + floor(log2 n) C_q` divided by `n`.
pub fn run(cfg: &Config) -> Result<RunReport> {
    let mut sim = simulate_for(
        "wlln",
        cfg,
        &[Hypothesis::Proximal, Hypothesis::StronglyIrreducible],
        false,
    )?;
    let paths = &sim.paths;
    let last = sim.grid.len() - 1;
    let n_max = sim.grid[last] as f64;
    let del = col(paths, |p| p.delta[last] / n_max);
    let (delta, delta_se) = (mean(&del), se_mean(&del));
    sim.report.value("delta", delta);
    sim.report.value("delta_se", delta_se);

    for &q in &cfg.stats.q {
        if q >= 2.0 {
            sim.report.note(format!(
                "q = {q}: the doubled-exponent law needs q < 2, skipped"
            ));
            continue;
        }
        let drift = if q >= 1.0 { delta } else { 0.0 };
        let (cq, cq_se) = c_q(paths, q);
        let name = format!("wlln_q{q}");
        let mut curve = Curve::new(&name, &["moment", "moment_se", "dom_q_over_n", "c_q"]);
        let mut bound_ok = true;
        for (i, &n) in sim.grid.iter().enumerate() {
            let nf = n as f64;
            let xs: Vec<f64> = paths.iter().map(|p| p.delta[i] - nf * drift).collect();
            let (m, se) = abs_moment(&xs, q);
            let bound = (nf * cq + nf.log2().floor() * cq) / nf;
            if q < 1.0 {
                let bound_se = (nf + nf.log2().floor()) * cq_se / nf;
                bound_ok &= m / nf - 3.0 * se / nf <= bound + 3.0 * bound_se;
            }
            curve.push(n, vec![m / nf, se / nf, bound, cq]);
        }
        let v = curve.column("moment").unwrap();
        let se = curve.column("moment_se").unwrap();
        let r = &mut sim.report;
        r.value(&format!("{name}_final"), v[last]);
        r.value(&format!("{name}_final_se"), se[last]);
        r.value(&format!("{name}_c_q"), cq);
        if sim.law.is_deterministic() || v.iter().all(|x| *x == 0.0) {
            let worst = v.iter().cloned().fold(0.0, f64::max);
            r.check(
                &format!("{name}:identically_zero"),
                worst <= 1e-9,
                format!("max {worst:.3e}"),
            );
        } else {
            let (ok, detail) = decreasing_tail(&v, &se, 4);
            r.check(&format!("{name}:decreasing"), ok, detail);
            if !sim.law.is_heavy_tailed() {
                // at n = 1 there is no cancellation, so the uncentred moment starts at 0
                let first = v.iter().position(|x| *x > 0.0).unwrap_or(0);
                let ratio = v[last] / v[first];
                r.check(
                    &format!("{name}:final_over_initial"),
                    ratio <= cfg.stats.thresholds.max_final_ratio,
                    format!("{ratio:.4} (max {})", cfg.stats.thresholds.max_final_ratio),
                );
            }
        }
        if q < 1.0 {
            r.check(
                &format!("{name}:dom_q"),
                bound_ok,
                format!("C_q = {cq:.4e} +- {cq_se:.1e}"),
            );
        }
        r.curves.push(curve);
    }
    Ok(sim.report)
}
