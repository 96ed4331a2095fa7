use mwl_core::stats::var_q_1d;
use mwl_core::Result;

use super::{abs_moment, groups, simulate_for};
use crate::config::{Config, ProcessKind};
use crate::estimate::batch_se;
use crate::report::{Curve, RunReport};
use crate::sampling::PathRecord;
use crate::steplaw::Hypothesis;

fn total(p: &PathRecord, kind: ProcessKind, i: usize) -> f64 {
    match kind {
        ProcessKind::DeltaKappa => p.delta[i],
        ProcessKind::Kappa => p.kappa[i],
        ProcessKind::Additive => p.kappa_sum[i],
    }
}

/// One-step values `S_k = S_{k,k+1}`.
fn steps(paths: &[PathRecord], kind: ProcessKind) -> Vec<f64> {
    match kind {
        ProcessKind::DeltaKappa => paths
            .iter()
            .flat_map(|p| p.letter_kappa.iter().map(|_| 0.0))
            .collect(),
        _ => paths
            .iter()
            .flat_map(|p| p.letter_kappa.iter().copied())
            .collect(),
    }
}

/// Aligned triangle defects per dyadic level; all zero for the additive process.
fn defects(paths: &[PathRecord], kind: ProcessKind) -> Vec<Vec<f64>> {
    let levels = paths[0].defects.len();
    (0..levels)
        .map(|j| {
            paths
                .iter()
                .flat_map(|p| p.defects[j].iter())
                .map(|d| {
                    if kind == ProcessKind::Additive {
                        0.0
                    } else {
                        *d
                    }
                })
                .collect()
        })
        .collect()
}

/// Largest per-level statistic with its batch standard error.
fn level_max(levels: &[Vec<f64>], stat: impl Fn(&[f64]) -> f64 + Copy) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for xs in levels.iter().filter(|x| x.len() >= 2) {
        let v = stat(xs);
        if v > best.0 {
            best = (v, batch_se(xs, groups(xs.len()), stat));
        }
    }
    best
}

fn var_q(xs: &[f64], q: f64) -> f64 {
    var_q_1d(xs, q).unwrap_or(f64::NAN)
}

/// Evaluates the almost-additive bounds on `S_{m,n}`:
///
/// - `q < 1`: `E|S_n|^q <= n (E|S_0|^q + C_q) + floor(log2 n) C_q`;
/// - `1 <= q < 2`: `Var_q(S_n)^(1/q) <= n^(1/q) (Var_q(S_0)^(1/q) + V_q^(1/q) / (2^(1/q) - 1)) + floor(log2 n) V_q^(1/q)`;
/// - `q = 2`: `sd(S_n) <= sqrt(n Var S_0) + sqrt(C_2) (log2 n + sqrt(n) / (sqrt 2 - 1))`.
///
/// `C_q` is the largest `E|dS|^q` and `V_q` the largest `Var_q(dS)` over
/// the sampled dyadic triples. A check fails only when the left side exceeds
/// the right side by more than 3 standard errors of each.
pub fn run(cfg: &Config) -> Result<RunReport> {
    let mut sim = simulate_for(
        "aa-bounds",
        cfg,
        &[Hypothesis::Proximal, Hypothesis::StronglyIrreducible],
        false,
    )?;
    let kind = cfg.stats.process;
    let paths = &sim.paths;
    let g = groups(paths.len());
    let s0 = steps(paths, kind);
    let levels = defects(paths, kind);
    sim.report.note(format!("process: {kind:?}"));
    for &q in &cfg.stats.q {
        let name = format!("aa_q{q}");
        let (form, cq, cq_se) = if q < 1.0 {
            let (c, s) = level_max(&levels, |x| abs_moment(x, q).0);
            ("dom-q", c, s)
        } else if q < 2.0 {
            let (c, s) = level_max(&levels, |x| var_q(x, q));
            ("dom-var-q", c, s)
        } else {
            let (c, s) = level_max(&levels, |x| abs_moment(x, 2.0).0);
            ("dom-var", c, s)
        };
        let s0_stat = |x: &[f64]| match form {
            "dom-q" => abs_moment(x, q).0,
            "dom-var-q" => var_q(x, q),
            _ => var_q(x, 2.0),
        };
        let s0_v = s0_stat(&s0);
        let s0_se = batch_se(&s0, groups(s0.len()), s0_stat);
        let rhs_of = |n: f64, s0: f64, c: f64| -> f64 {
            let l = n.log2().floor();
            match form {
                "dom-q" => n * (s0 + c) + l * c,
                "dom-var-q" => {
                    n.powf(1.0 / q)
                        * (s0.powf(1.0 / q) + c.powf(1.0 / q) / (2f64.powf(1.0 / q) - 1.0))
                        + l * c.powf(1.0 / q)
                }
                _ => (n * s0).sqrt() + c.sqrt() * (n.log2() + n.sqrt() / (2f64.sqrt() - 1.0)),
            }
        };
        let lhs_of = |x: &[f64]| match form {
            "dom-q" => abs_moment(x, q).0,
            "dom-var-q" => var_q(x, q).powf(1.0 / q),
            _ => var_q(x, 2.0).sqrt(),
        };
        let mut curve = Curve::new(&name, &["lhs", "lhs_se", "rhs", "rhs_se", "c"]);
        let mut ok = true;
        let mut worst = f64::NEG_INFINITY;
        for (i, &n) in sim.grid.iter().enumerate() {
            let nf = n as f64;
            let xs: Vec<f64> = paths.iter().map(|p| total(p, kind, i)).collect();
            let lhs = lhs_of(&xs);
            let lhs_se = batch_se(&xs, g, lhs_of);
            let rhs = rhs_of(nf, s0_v, cq);
            // first-order propagation of the two estimated inputs
            let h = 1e-6;
            let d_c = (rhs_of(nf, s0_v, cq * (1.0 + h) + h) - rhs) / (cq * h + h);
            let d_s = (rhs_of(nf, s0_v * (1.0 + h) + h, cq) - rhs) / (s0_v * h + h);
            let rhs_se = ((d_c * cq_se).powi(2) + (d_s * s0_se).powi(2)).sqrt();
            ok &= lhs - 3.0 * lhs_se <= rhs + 3.0 * rhs_se;
            worst = worst.max(lhs / rhs);
            curve.push(n, vec![lhs, lhs_se, rhs, rhs_se, cq]);
        }
        let r = &mut sim.report;
        r.value(&format!("{name}_c"), cq);
        r.value(&format!("{name}_c_se"), cq_se);
        r.value(&format!("{name}_max_ratio"), worst);
        r.check(
            &format!("{name}:{form}"),
            ok,
            format!("C = {cq:.4e} +- {cq_se:.1e}; max lhs/rhs = {worst:.4}"),
        );
        r.curves.push(curve);
    }
    Ok(sim.report)
}
