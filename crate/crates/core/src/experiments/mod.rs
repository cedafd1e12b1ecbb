//! Config-driven batch runs that write CSV/JSON artifacts and a manifest.

mod config;
mod run;

pub use config::{
    parse_config, validate_config, ConfigError, ConfigIssue, ExperimentConfig, ExperimentKind, ManifoldSpec,
    DEFAULT_PROPERTIES, DEFAULT_SEED,
};
pub use run::{
    auto_sample, distortion_sweep, run, Artifact, Assertion, RunOutcome, SweepLevel, SweepResult, MANIFEST_FILE,
};
