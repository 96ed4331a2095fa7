//! Experiment runners. Each one simulates (or computes) its statistics,
//! records per-n curves with Monte Carlo standard errors, and evaluates the
//! checks of its theorem at desk scale.

mod aa_bounds;
mod clt;
mod delta_tail;
mod dichotomy;
mod gclt;
mod higher;
mod lyapunov;
mod selftest;
mod wlln;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use mwl_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::estimate;
use crate::report::RunReport;
use crate::sampling::{simulate, PathRecord, PathSpec};
use crate::steplaw::{Hypothesis, StepLaw};

pub use dichotomy::run_dichotomy;
pub use selftest::run_selftest;

pub const RUNNERS: &[&str] = &[
    "lyapunov",
    "wlln",
    "clt",
    "gclt",
    "higher",
    "delta-tail",
    "aa-bounds",
    "dichotomy-verify",
    "stable-selftest",
];

/// Runs `name` on `cfg`. `dichotomy-verify` and `stable-selftest` ignore
/// the step law.
pub fn run(name: &str, cfg: &Config) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = match name {
        "lyapunov" => lyapunov::run(cfg)?,
        "wlln" => wlln::run(cfg)?,
        "clt" => clt::run(cfg)?,
        "gclt" => gclt::run(cfg)?,
        "higher" => higher::run(cfg)?,
        "delta-tail" => delta_tail::run(cfg)?,
        "aa-bounds" => aa_bounds::run(cfg)?,
        "dichotomy-verify" => run_dichotomy(cfg.grid.seed, cfg.grid.replicas)?,
        "stable-selftest" => run_selftest(cfg.grid.seed)?,
        other => {
            return Err(Error::Usage(format!(
                "unknown runner `{other}`; known: {}",
                RUNNERS.join(", ")
            )))
        }
    };
    report.config_hash = cfg.hash();
    if let Some(g) = &cfg.stats.golden {
        let path = cfg
            .resolve(g)
            .join(format!("{}-{}.json", report.runner, report.steplaw));
        if path.exists() {
            apply_golden(&mut report, &path)?;
        } else {
            report.note(format!("no pilot fixture at {}", path.display()));
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Simulated paths plus the report they feed.
pub(crate) struct Sim {
    pub law: StepLaw,
    pub grid: Vec<usize>,
    pub paths: Vec<PathRecord>,
    pub report: RunReport,
}

pub(crate) fn simulate_for(
    runner: &str,
    cfg: &Config,
    hyps: &[Hypothesis],
    cartan: bool,
) -> Result<Sim> {
    let law = cfg.step_law()?;
    let notes = law.flags.require(hyps)?;
    let grid = cfg.grid.grid();
    let spec = PathSpec {
        grid: grid.clone(),
        cartan,
        pairs_per_path: cfg.grid.pairs_per_path,
        letters: cfg.grid.letters,
    };
    let paths = simulate(
        &law,
        &spec,
        cfg.grid.seed,
        cfg.grid.replicas,
        cfg.grid.blocks,
    )?;
    let mut report = RunReport::new(runner, &law.name, "", cfg.grid.seed);
    report.replicas = cfg.grid.replicas;
    report.paths = paths.len();
    report.grid = grid.clone();
    for n in notes {
        report.note(n);
    }
    Ok(Sim {
        law,
        grid,
        paths,
        report,
    })
}

/// Batches for batch-means standard errors.
pub(crate) fn groups(len: usize) -> usize {
    16.min(len / 2)
}

pub(crate) fn col(paths: &[PathRecord], f: impl Fn(&PathRecord) -> f64) -> Vec<f64> {
    paths.iter().map(f).collect()
}

/// `mean |x|^q` with its standard error.
pub(crate) fn abs_moment(xs: &[f64], q: f64) -> (f64, f64) {
    let p: Vec<f64> = xs.iter().map(|x| x.abs().powf(q)).collect();
    (estimate::mean(&p), estimate::se_mean(&p))
}

/// Over the last `k` points: every step goes down or stays within two
/// standard errors, and the last value is below the first.
pub(crate) fn decreasing_tail(v: &[f64], se: &[f64], k: usize) -> (bool, String) {
    let k = k.min(v.len());
    let s = v.len() - k;
    let mut ok = v[v.len() - 1] < v[s];
    for i in s..v.len() - 1 {
        let tol = 2.0 * (se[i] * se[i] + se[i + 1] * se[i + 1]).sqrt();
        ok &= v[i + 1] <= v[i] + tol;
    }
    let shown: Vec<String> = v[s..].iter().map(|x| format!("{x:.4e}")).collect();
    (ok, format!("last {k}: [{}]", shown.join(", ")))
}

/// Pilot values recorded with seed 0 and R = 64.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Golden {
    pub runner: String,
    pub steplaw: String,
    pub seed: u64,
    pub replicas: usize,
    pub values: BTreeMap<String, f64>,
    /// Keys compared on every run: `|v - g| <= 3 sqrt(se_v^2 + se_g^2)` with
    /// the standard errors read from `<key>_se`.
    pub check: Vec<String>,
}

impl Golden {
    pub fn from_report(r: &RunReport, check: &[&str]) -> Golden {
        Golden {
            runner: r.runner.clone(),
            steplaw: r.steplaw.clone(),
            seed: r.seed,
            replicas: r.replicas,
            values: r
                .values
                .iter()
                .filter_map(|(k, v)| Some((k.clone(), v.as_f64()?)))
                .collect(),
            check: check.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Golden> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Usage(format!(
                "cannot read golden fixture {}: {e}",
                path.display()
            ))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("golden fixture {}: {e}", path.display())))
    }
}

pub fn apply_golden(report: &mut RunReport, path: &Path) -> Result<()> {
    let g = Golden::load(path)?;
    if g.runner != report.runner || g.steplaw != report.steplaw {
        return Err(Error::Usage(format!(
            "golden fixture is for {} on {}, not {} on {}",
            g.runner, g.steplaw, report.runner, report.steplaw
        )));
    }
    report.golden = Some(path.display().to_string());
    for key in &g.check {
        let (Some(v), Some(gv)) = (report.get(key), g.values.get(key)) else {
            report.check(&format!("golden:{key}"), false, "value missing");
            continue;
        };
        let se = report.get(&format!("{key}_se")).unwrap_or(0.0);
        let gse = g.values.get(&format!("{key}_se")).copied().unwrap_or(0.0);
        let tol = 3.0 * (se * se + gse * gse).sqrt();
        let tol = if tol > 0.0 {
            tol
        } else {
            1e-12 * gv.abs().max(1.0)
        };
        report.check(
            &format!("golden:{key}"),
            (v - gv).abs() <= tol,
            format!("{v:.6e} vs pilot {gv:.6e} (tolerance {tol:.3e})"),
        );
    }
    Ok(())
}
