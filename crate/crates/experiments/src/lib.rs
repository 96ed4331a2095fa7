//! Step-law zoo, experiment runners and the `mwl` command line.
//!
//! Every runner draws `replicas * blocks` independent paths (one ChaCha8
//! stream each), multiplies them out as dyadic trees, and reports per-n
//! statistics with Monte Carlo standard errors. Results are identical for a
//! given config and seed whatever `MWL_WORKERS` is.

pub mod cli;
pub mod config;
pub mod element;
pub mod estimate;
pub mod report;
pub mod runners;
pub mod sampling;
pub mod steplaw;

pub use config::Config;
pub use element::Element;
pub use report::{Criterion, Curve, RunReport};
pub use runners::{run, Golden, RUNNERS};
pub use steplaw::{zoo, Flags, StepLaw, StepLawKind, ZOO};
