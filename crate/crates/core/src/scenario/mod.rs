//! Scenario configs, the built-in catalog and the runner behind the `ccl` binary.

mod build;
mod catalog;
mod config;
mod run;

use thiserror::Error;

pub use build::{build_space, cycle, detour, glued_cycles, random_tree, BuiltSpace};
pub use catalog::{builtin, catalog, CatalogEntry};
pub use config::{
    CheckSpec, CombingChoice, Growth, OutputConfig, ProbeSpec, SamplingConfig, ScenarioConfig, SpaceSpec,
};
pub use run::{run_scenario, CheckResult, RunOptions, ScenarioOutcome, ScenarioReport, SpaceSummary, Stage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("build error: {0}")]
    Build(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ScenarioError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::UnknownScenario(_) => 2,
            ScenarioError::Build(_) | ScenarioError::Io(_) => 3,
        }
    }
}

/// Seed of the named stream under a root seed (FNV-1a over the name).
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
