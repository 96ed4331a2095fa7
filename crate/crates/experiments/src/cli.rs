//! `mwl <runner> [--config PATH] [--seed U64] [--out DIR] [--replicas R]`
//!
//! Exit codes: 0 when every check passes, 2 when some check fails, 1 on
//! usage or runtime errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mwl_core::{Error, Result};

use crate::config::Config;
use crate::runners;

#[derive(Debug, Parser)]
#[command(name = "mwl", about = "Random matrix product experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Experiment config (TOML with [steplaw], [grid], [stats]).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides grid.seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for report.json and the CSV files.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides grid.replicas (table count for dichotomy-verify).
    #[arg(long)]
    pub replicas: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lyapunov exponent and average norm-cancellation.
    Lyapunov(Common),
    /// Weak law of large numbers for the norm-cancellation.
    Wlln(Common),
    /// Central limit theorem for kappa(gbar_n).
    Clt(Common),
    /// Stable limits for heavy-tailed step laws.
    Gclt(Common),
    /// Cartan-vector versions of the limit theorems.
    Higher(Common),
    /// Tail of the pair cancellation against the squared-probability bound.
    DeltaTail(Common),
    /// Dominating bounds for almost additive processes.
    AaBounds(Common),
    /// Exact dyadic reconstruction on random process tables.
    DichotomyVerify(Common),
    /// Stable sampler self-test.
    StableSelftest(Common),
}

impl Command {
    fn split(self) -> (&'static str, Common) {
        match self {
            Command::Lyapunov(c) => ("lyapunov", c),
            Command::Wlln(c) => ("wlln", c),
            Command::Clt(c) => ("clt", c),
            Command::Gclt(c) => ("gclt", c),
            Command::Higher(c) => ("higher", c),
            Command::DeltaTail(c) => ("delta-tail", c),
            Command::AaBounds(c) => ("aa-bounds", c),
            Command::DichotomyVerify(c) => ("dichotomy-verify", c),
            Command::StableSelftest(c) => ("stable-selftest", c),
        }
    }
}

/// Loads the config and applies the command-line overrides.
pub fn effective_config(runner: &str, common: &Common) -> Result<Config> {
    let standalone = matches!(runner, "dichotomy-verify" | "stable-selftest");
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None if standalone => Config::default(),
        None => return Err(Error::Usage(format!("`{runner}` needs --config PATH"))),
    };
    if runner == "dichotomy-verify" {
        cfg.grid.replicas = common.replicas.unwrap_or(200);
    } else if let Some(r) = common.replicas {
        cfg.grid.replicas = r;
    }
    if let Some(s) = common.seed {
        cfg.grid.seed = s;
    }
    if !standalone {
        cfg.validate()?;
    }
    Ok(cfg)
}

fn execute(runner: &str, common: &Common, out: &mut dyn Write) -> Result<bool> {
    let cfg = effective_config(runner, common)?;
    let report = runners::run(runner, &cfg)?;
    let files = report.write(&common.out)?;
    let _ = write!(out, "{}", report.summary());
    for f in files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(report.passed)
}

/// Entry point with explicit argument list and streams; returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let (runner, common) = cli.command.split();
    match execute(runner, &common, out) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
