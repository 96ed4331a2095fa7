use mwl_core::stats::{covariance, frobenius};
use mwl_core::Result;

use super::{groups, simulate_for};
use crate::config::Config;
use crate::estimate::{batch_se, mean, se_mean};
use crate::report::{Curve, RunReport};
use crate::sampling::snap;
use crate::steplaw::Hypothesis;

/// Rounding allowance of the Weyl-chamber check, relative to `|kappa_1|`.
const WEYL_TOL: f64 = 1e-9;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Vector analogues: `delta-kappa-dot(gamma~_{0,n}) = kappa-dot(gbar_n) - sum kappa-dot(g_k)`.
pub fn run(cfg: &Config) -> Result<RunReport> {
    let mut sim = simulate_for(
        "higher",
        cfg,
        &[
            Hypothesis::Proximal,
            Hypothesis::StronglyIrreducible,
            Hypothesis::TotallyIrreducible,
        ],
        true,
    )?;
    let paths = &sim.paths;
    let d = sim.law.dim();
    let g = groups(paths.len());
    let last = sim.grid.len() - 1;
    let n_max = sim.grid[last] as f64;

    let dk = |i: usize| -> Vec<Vec<f64>> {
        paths
            .iter()
            .map(|p| {
                p.cartan[i]
                    .iter()
                    .zip(&p.cartan_sum[i])
                    .map(|(a, b)| snap(a - b, a.abs() + b.abs()))
                    .collect()
            })
            .collect()
    };
    // b = -E(delta-kappa-dot) / n at n_max
    let last_dk = dk(last);
    let b: Vec<f64> = (0..d)
        .map(|c| -mean(&last_dk.iter().map(|v| v[c]).collect::<Vec<_>>()) / n_max)
        .collect();
    let b_se: Vec<f64> = (0..d)
        .map(|c| se_mean(&last_dk.iter().map(|v| v[c]).collect::<Vec<_>>()) / n_max)
        .collect();

    let mut weyl_violations = 0usize;
    for p in paths {
        for c in &p.cartan {
            let scale = c[0].abs().max(1.0);
            if c.windows(2).any(|w| w[1] > w[0] + WEYL_TOL * scale) {
                weyl_violations += 1;
            }
        }
    }

    let mut cov_cols: Vec<String> = vec!["cov_rate_frob".into(), "cov_rate_frob_se".into()];
    for i in 0..d {
        for j in i..d {
            cov_cols.push(format!("cov_{}{}", i + 1, j + 1));
        }
    }
    cov_cols.push("delta_cov_rate_frob".into());
    let cov_refs: Vec<&str> = cov_cols.iter().map(String::as_str).collect();
    let mut cov_curve = Curve::new("higher_cov", &cov_refs);
    for (i, &n) in sim.grid.iter().enumerate() {
        let nf = n as f64;
        let pts: Vec<Vec<f64>> = paths.iter().map(|p| p.cartan[i].clone()).collect();
        let cov = covariance(&pts)?;
        let frob = frobenius(&cov) / nf;
        let frob_se = batch_se(&pts, g, |s| {
            covariance(s)
                .map(|c| frobenius(&c) / nf)
                .unwrap_or(f64::NAN)
        });
        let mut row = vec![frob, frob_se];
        for a in 0..d {
            for c in a..d {
                row.push(cov[a * d + c] / nf);
            }
        }
        row.push(frobenius(&covariance(&dk(i))?) / nf);
        cov_curve.push(n, row);
    }

    let r = &mut sim.report;
    r.value("weyl_violations", weyl_violations as f64);
    for c in 0..d {
        r.value(&format!("b_{}", c + 1), b[c]);
        r.value(&format!("b_{}_se", c + 1), b_se[c]);
    }
    r.check(
        "weyl_chamber",
        weyl_violations == 0,
        format!("{weyl_violations} Cartan vectors out of order"),
    );

    for &q in &cfg.stats.q {
        let drift: Vec<f64> = if q >= 1.0 { b.clone() } else { vec![0.0; d] };
        let name = format!("higher_wlln_q{q}");
        let mut curve = Curve::new(&name, &["moment", "moment_se"]);
        for (i, &n) in sim.grid.iter().enumerate() {
            let nf = n as f64;
            let xs: Vec<f64> = dk(i)
                .iter()
                .map(|v| {
                    let shifted: Vec<f64> = v.iter().zip(&drift).map(|(x, b)| x + nf * b).collect();
                    norm(&shifted).powf(q)
                })
                .collect();
            curve.push(n, vec![mean(&xs) / nf, se_mean(&xs) / nf]);
        }
        let v = curve.column("moment").unwrap();
        if sim.law.is_deterministic() || v.iter().all(|x| *x == 0.0) {
            let worst = v.iter().cloned().fold(0.0, f64::max);
            r.check(
                &format!("{name}:identically_zero"),
                worst <= 1e-9,
                format!("max {worst:.3e}"),
            );
        } else {
            let ratio = v[last] / v[0];
            r.check(
                &format!("{name}:final_over_initial"),
                ratio <= cfg.stats.thresholds.max_final_ratio,
                format!("{ratio:.4} (max {})", cfg.stats.thresholds.max_final_ratio),
            );
        }
        r.value(&format!("{name}_final"), v[last]);
        r.curves.push(curve);
    }

    let frob = cov_curve.column("cov_rate_frob").unwrap();
    if sim.law.is_deterministic() {
        let worst = frob.iter().cloned().fold(0.0, f64::max);
        r.check(
            "cov_identically_zero",
            worst <= 1e-9,
            format!("max {worst:.3e}"),
        );
    } else if sim.law.is_heavy_tailed() {
        r.note("heavy-tailed step law: Cov(kappa-dot)/n diverges, the rate check is skipped");
    } else if last >= 2 {
        let change = frob[last - 1] / frob[last - 2] - 1.0;
        r.value("cov_rate_change", change);
        r.check(
            "cov_rate_stable",
            change.abs() <= cfg.stats.thresholds.cov_rate_tol,
            format!(
                "|Cov|/n at {} vs {}: relative change {change:.4} (tol {})",
                sim.grid[last - 1],
                sim.grid[last - 2],
                cfg.stats.thresholds.cov_rate_tol
            ),
        );
    }
    r.curves.push(cov_curve);
    Ok(sim.report)
}
