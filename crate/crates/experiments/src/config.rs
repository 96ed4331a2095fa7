//! Experiment configuration: a TOML file with `[steplaw]`, `[grid]` and
//! `[stats]` sections. Unknown keys are errors.
//!
//! ```toml
//! [steplaw]
//! zoo = "sl2-pair"            # or kind = "finite-support" | "rot-heavy-diag"
//!                             #        | "padic-haar-ball" | "custom"
//!
//! [grid]
//! n_max = 4096                # power of two, at most 4096
//! replicas = 64
//! blocks = 16                 # paths per replica
//! seed = 0
//!
//! [stats]
//! q = [1.0]
//! ```
//!
//! Keys of `[steplaw]` by kind:
//!
//! - `finite-support`: `matrices` (text blocks as in fixture files), `weights`
//!   (defaults to uniform);
//! - `rot-heavy-diag`: `dim`, `alpha`, `scale` (default 1), `angle` (default 1);
//! - `padic-haar-ball`: `p`, `dim`, `digits` (default 8);
//! - `custom`: `path` (fixture file, relative to the config file), `weights`.
//!
//! `[steplaw.flags]` declares `proximal`, `strongly_irreducible`,
//! `totally_irreducible`, `in_sl`, `commuting`. For zoo entries, declared
//! flags replace the built-in ones key by key.

use std::path::{Path, PathBuf};

use mwl_core::matrix::format::parse_matrices;
use mwl_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::steplaw::{zoo, Flags, StepLaw, StepLawKind};

pub const MAX_N: usize = 4096;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepLawConfig {
    pub zoo: Option<String>,
    pub kind: Option<String>,
    pub name: Option<String>,
    pub matrices: Option<String>,
    pub weights: Option<Vec<f64>>,
    pub path: Option<PathBuf>,
    pub dim: Option<usize>,
    pub alpha: Option<f64>,
    pub scale: Option<f64>,
    pub angle: Option<f64>,
    pub p: Option<u64>,
    pub digits: Option<u32>,
    #[serde(default)]
    pub flags: Flags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub replicas: usize,
    pub blocks: usize,
    pub seed: u64,
    /// Stored triangle defects per tree level and path.
    pub pairs_per_path: usize,
    /// Stored leading letters per path (for `kappa(g_0)` and `N(g_0)` samples).
    pub letters: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_min: 1,
            n_max: MAX_N,
            replicas: 64,
            blocks: 16,
            seed: 0,
            pairs_per_path: 32,
            letters: 32,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Vec<usize> {
        (0..)
            .map(|i| 1usize << i)
            .skip_while(|&n| n < self.n_min)
            .take_while(|&n| n <= self.n_max)
            .collect()
    }

    pub fn paths(&self) -> usize {
        self.replicas * self.blocks
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    /// `S_{m,n} = delta_kappa(gamma~_{m,n})`.
    DeltaKappa,
    /// `S_{m,n} = kappa(gamma_{m,n})`.
    Kappa,
    /// `S_{m,n} = sum_{m <= k < n} kappa(g_k)`, the additive control.
    Additive,
}

/// Thresholds of the trend checks. Defaults come from the seed-0, R = 64
/// pilot run (see `fixtures/`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// wlln: curve(n_max) / curve(first n) upper bound.
    pub max_final_ratio: f64,
    /// clt: `|rate(n_max/2) / rate(n_max/4) - 1|` upper bound.
    pub rate_tol: f64,
    /// clt: W_2 of the standardized sample against N(0, 1).
    pub w2_max: f64,
    /// gclt: median `|delta_kappa + n b|/a_n` at n_max.
    pub median_max: f64,
    /// higher: relative change of `Cov(kappa-dot)/n`.
    pub cov_rate_tol: f64,
    /// delta-tail: held-out fraction of t where the fitted bound holds. The bound
    /// is a step function when N is discrete, so a few held-out points just
    /// past a step can sit above it.
    pub heldout_min: f64,
    /// delta-tail: R^2 of the exponential line for bounded laws.
    pub exp_line_r2: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            max_final_ratio: 0.5,
            rate_tol: 0.1,
            w2_max: 0.05,
            median_max: 0.1,
            cov_rate_tol: 0.15,
            heldout_min: 0.75,
            exp_line_r2: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsConfig {
    pub q: Vec<f64>,
    pub process: ProcessKind,
    /// delta-tail: pair half-lengths `n` of `(gamma_{0,n}, gamma_{n,2n})`, powers of two.
    pub pair_lengths: Vec<usize>,
    /// Hill estimator: fraction of the sample used as upper order statistics.
    pub hill_fraction: f64,
    /// stable oracle sample size (gclt).
    pub oracle_size: usize,
    pub thresholds: Thresholds,
    /// Directory of pilot fixtures `<runner>-<steplaw>.json`, relative to the
    /// config file. Runners without a fixture there are not compared.
    pub golden: Option<PathBuf>,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            q: vec![1.0],
            process: ProcessKind::DeltaKappa,
            pair_lengths: vec![1],
            hill_fraction: 0.05,
            oracle_size: 200_000,
            thresholds: Thresholds::default(),
            golden: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub steplaw: StepLawConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub stats: StatsConfig,
    /// Directory relative paths resolve against; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn merge_flags(base: Flags, over: Flags) -> Flags {
    Flags {
        proximal: over.proximal.or(base.proximal),
        strongly_irreducible: over.strongly_irreducible.or(base.strongly_irreducible),
        totally_irreducible: over.totally_irreducible.or(base.totally_irreducible),
        in_sl: over.in_sl.or(base.in_sl),
        commuting: over.commuting.or(base.commuting),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Config::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// A config for a zoo entry with default grid and stats.
    pub fn for_zoo(name: &str) -> Config {
        Config {
            steplaw: StepLawConfig {
                zoo: Some(name.to_string()),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !g.n_max.is_power_of_two() || g.n_max > MAX_N {
            return Err(Error::Usage(format!(
                "grid.n_max = {} must be a power of two at most {MAX_N}",
                g.n_max
            )));
        }
        if g.n_min == 0 || g.n_min > g.n_max {
            return Err(Error::Usage("grid.n_min must be in [1, n_max]".into()));
        }
        if g.replicas == 0 || g.blocks == 0 {
            return Err(Error::Usage(
                "grid.replicas and grid.blocks must be positive".into(),
            ));
        }
        let s = &self.stats;
        if s.q.is_empty() || s.q.iter().any(|q| !(*q > 0.0 && *q <= 2.0)) {
            return Err(Error::Usage("stats.q entries must lie in (0, 2]".into()));
        }
        if s.pair_lengths
            .iter()
            .any(|n| !n.is_power_of_two() || 2 * n > g.n_max)
        {
            return Err(Error::Usage(
                "stats.pair_lengths must be powers of two with 2n <= n_max".into(),
            ));
        }
        if !(s.hill_fraction > 0.0 && s.hill_fraction < 1.0) {
            return Err(Error::Usage(
                "stats.hill_fraction must lie in (0, 1)".into(),
            ));
        }
        match (&self.steplaw.zoo, &self.steplaw.kind) {
            (Some(_), Some(_)) => Err(Error::Usage(
                "steplaw: give `zoo` or `kind`, not both".into(),
            )),
            (None, None) => Err(Error::Usage("steplaw: `zoo` or `kind` is required".into())),
            _ => Ok(()),
        }
    }

    /// Content address: SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn step_law(&self) -> Result<StepLaw> {
        let s = &self.steplaw;
        if let Some(name) = &s.zoo {
            let mut law = zoo(name)?;
            law.flags = merge_flags(law.flags, s.flags);
            return Ok(law);
        }
        let kind = s.kind.as_deref().unwrap_or_default();
        let need = |v: Option<usize>, key: &str| {
            v.ok_or_else(|| Error::Usage(format!("steplaw.{key} is required for kind `{kind}`")))
        };
        let law_kind = match kind {
            "finite-support" | "custom" => {
                let text = if kind == "custom" {
                    let path = s.path.as_ref().ok_or_else(|| {
                        Error::Usage("steplaw.path is required for kind `custom`".into())
                    })?;
                    let path = self.resolve(path);
                    std::fs::read_to_string(&path).map_err(|e| {
                        Error::Usage(format!("cannot read fixture {}: {e}", path.display()))
                    })?
                } else {
                    s.matrices.clone().ok_or_else(|| {
                        Error::Usage(
                            "steplaw.matrices is required for kind `finite-support`".into(),
                        )
                    })?
                };
                let matrices = parse_matrices(&text)?;
                let weights = s
                    .weights
                    .clone()
                    .unwrap_or_else(|| vec![1.0 / matrices.len() as f64; matrices.len()]);
                StepLawKind::FiniteSupport { matrices, weights }
            }
            "rot-heavy-diag" => StepLawKind::RotHeavyDiag {
                dim: need(s.dim, "dim")?,
                alpha: s
                    .alpha
                    .ok_or_else(|| Error::Usage("steplaw.alpha is required".into()))?,
                scale: s.scale.unwrap_or(1.0),
                angle: s.angle.unwrap_or(1.0),
            },
            "padic-haar-ball" => StepLawKind::PadicHaarBall {
                p: s.p
                    .ok_or_else(|| Error::Usage("steplaw.p is required".into()))?,
                dim: need(s.dim, "dim")?,
                digits: s.digits.unwrap_or(8),
            },
            other => return Err(Error::Usage(format!("unknown steplaw kind `{other}`"))),
        };
        let name = s.name.clone().unwrap_or_else(|| kind.to_string());
        StepLaw::new(&name, law_kind, s.flags)
    }
}
