use mwl_core::{Error, Result};

use super::{col, groups, simulate_for};
use crate::config::Config;
use crate::estimate::{batch_se, gaussian_grid, mean, standardize, variance, wasserstein_sorted};
use crate::report::{Curve, RunReport};
use crate::steplaw::Hypothesis;

/// `W_2` of the standardized sample against standard normal quantiles; 0 for
/// a constant sample (whose matched Gaussian is a point mass).
fn w2_gaussian(xs: &[f64]) -> f64 {
    if constant(xs) {
        return 0.0;
    }
    wasserstein_sorted(&standardize(xs), &gaussian_grid(xs.len()), 2.0)
}

fn constant(xs: &[f64]) -> bool {
    xs.iter().all(|x| *x == xs[0])
}

/// `Var(kappa(gbar_n)) / n` and the Gaussian fit of `kappa(gbar_n)`.
pub fn run(cfg: &Config) -> Result<RunReport> {
    let mut sim = simulate_for(
        "clt",
        cfg,
        &[Hypothesis::Proximal, Hypothesis::StronglyIrreducible],
        false,
    )?;
    if sim.law.is_heavy_tailed() {
        return Err(Error::Usage(format!(
            "clt needs E kappa^2 < inf; `{}` is heavy-tailed, use gclt",
            sim.law.name
        )));
    }
    let paths = &sim.paths;
    let g = groups(paths.len());
    let mut curve = Curve::new(
        "clt",
        &["var_rate", "var_rate_se", "mean_rate", "w2", "w2_se"],
    );
    let mut degenerate = true;
    for (i, &n) in sim.grid.iter().enumerate() {
        let nf = n as f64;
        let xs = col(paths, |p| p.kappa[i]);
        degenerate &= constant(&xs);
        let rate = if constant(&xs) {
            0.0
        } else {
            variance(&xs) / nf
        };
        let rate_se = batch_se(&xs, g, |b| variance(b) / nf);
        let w2 = w2_gaussian(&xs);
        let w2_se = batch_se(&xs, g, w2_gaussian);
        curve.push(n, vec![rate, rate_se, mean(&xs) / nf, w2, w2_se]);
    }
    let rate = curve.column("var_rate").unwrap();
    let rate_se = curve.column("var_rate_se").unwrap();
    let w2 = curve.column("w2").unwrap();
    let last = rate.len() - 1;
    let r = &mut sim.report;
    r.value("var_rate", rate[last]);
    r.value("var_rate_se", rate_se[last]);
    r.value("w2", w2[last]);
    if sim.law.is_deterministic() || degenerate {
        // p-adic balls can give the same kappa on every path as well
        r.check(
            "degenerate_zero",
            rate.iter().all(|v| *v == 0.0) && w2.iter().all(|v| *v == 0.0),
            "every path has the same kappa: variance rate and W_2 vanish",
        );
    } else if last >= 2 {
        let ratio = rate[last - 1] / rate[last - 2];
        r.value("rate_ratio", ratio);
        r.check(
            "rate_stable",
            (ratio - 1.0).abs() <= cfg.stats.thresholds.rate_tol,
            format!(
                "rate({}) / rate({}) = {ratio:.4} (tol {})",
                sim.grid[last - 1],
                sim.grid[last - 2],
                cfg.stats.thresholds.rate_tol
            ),
        );
        r.check(
            "w2_gaussian",
            w2[last] <= cfg.stats.thresholds.w2_max,
            format!(
                "W_2 = {:.4} at n = {} (max {})",
                w2[last], sim.grid[last], cfg.stats.thresholds.w2_max
            ),
        );
    }
    r.curves.push(curve);
    Ok(sim.report)
}
