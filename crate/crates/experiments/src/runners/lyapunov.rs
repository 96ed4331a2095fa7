use mwl_core::Result;

use super::{col, simulate_for};
use crate::config::Config;
use crate::estimate::{mean, se_mean};
use crate::report::{Curve, RunReport};
use crate::sampling::DELTA_SLACK;

/// `lambda(n) = mean kappa(gbar_n) / n`, `delta(n) = mean delta_kappa(gamma~_{0,n}) / n`
/// and the residual `lambda - (E kappa(g_0) + delta)`.
pub fn run(cfg: &Config) -> Result<RunReport> {
    let mut sim = simulate_for("lyapunov", cfg, &[], false)?;
    let paths = &sim.paths;
    let mut curve = Curve::new(
        "lyapunov",
        &[
            "lambda",
            "lambda_se",
            "delta",
            "delta_se",
            "mean_kappa",
            "mean_kappa_se",
            "residual",
        ],
    );
    let mut worst_positive = f64::NEG_INFINITY;
    let mut worst_residual = 0.0f64;
    for (i, &n) in sim.grid.iter().enumerate() {
        let nf = n as f64;
        let lam = col(paths, |p| p.kappa[i] / nf);
        let del = col(paths, |p| p.delta[i] / nf);
        let kap = col(paths, |p| p.kappa_sum[i] / nf);
        let residual = mean(&lam) - (mean(&kap) + mean(&del));
        worst_residual = worst_residual.max(residual.abs());
        for p in paths {
            let scale = p.kappa_sum[i].abs().max(p.kappa[i].abs()).max(1.0);
            worst_positive = worst_positive.max(p.delta[i] / scale);
        }
        curve.push(
            n,
            vec![
                mean(&lam),
                se_mean(&lam),
                mean(&del),
                se_mean(&del),
                mean(&kap),
                se_mean(&kap),
                residual,
            ],
        );
    }
    let last = curve.rows.last().unwrap().clone();
    let r = &mut sim.report;
    r.value("lambda", last[0]);
    r.value("lambda_se", last[1]);
    r.value("delta", last[2]);
    r.value("delta_se", last[3]);
    r.value("mean_kappa", last[4]);
    r.value("mean_kappa_se", last[5]);
    r.value("residual", last[6]);

    r.check(
        "cancellation_nonpositive",
        worst_positive <= DELTA_SLACK,
        format!("max delta_kappa / scale = {worst_positive:.3e}"),
    );
    r.check(
        "residual",
        worst_residual <= 1e-9 * last[0].abs().max(1.0),
        format!("max |lambda - (E kappa + delta)| = {worst_residual:.3e}"),
    );
    if sim.law.is_deterministic() {
        let lam = col(paths, |p| p.kappa[p.kappa.len() - 1]);
        let spread = lam.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - lam.iter().cloned().fold(f64::INFINITY, f64::min);
        r.check(
            "deterministic_exact",
            spread == 0.0 && last[1].abs() <= 1e-12 * last[0].abs().max(1.0),
            format!(
                "lambda = {:.17e}, delta = {:.1e}, spread {spread:.1e}",
                last[0], last[1]
            ),
        );
    }
    if sim.law.field().prime().is_some() {
        let all_zero = paths.iter().all(|p| p.delta.iter().all(|d| *d == 0.0));
        r.check(
            "padic_delta_zero",
            all_zero,
            format!("delta = {:.3e} (exact arithmetic)", last[2]),
        );
    }
    if !sim.law.is_deterministic() && sim.law.field().prime().is_none() {
        r.check(
            "lambda_positive",
            last[0] > 3.0 * last[1],
            format!("lambda = {:.6} +- {:.2e}", last[0], last[1]),
        );
    }
    r.curves.push(curve);
    Ok(sim.report)
}
