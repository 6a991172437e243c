//! Miniature docking workload whose scoring function needs a seven-component
//! block reduction per evaluation.

mod adadelta;
mod genotype;
pub mod geom;
mod instance;
mod scoring;
mod search;
mod validate;

pub use adadelta::{adadelta_step, AdadeltaState, DEFAULT_EPSILON, DEFAULT_RHO};
pub use genotype::{normalize_angle, Genotype};
pub use instance::{LigandAtom, LigandInstance, ReceptorSite};
pub use scoring::{
    pair_energy, score, score_block, score_reference, ScoreResult, Scorer, MIN_DISTANCE, PAIR_ENERGY_CAP,
};
pub use search::{
    lga_run, lga_run_from, local_search, DockResult, LgaSettings, LocalSearchOutcome, LocalSearchSettings, RunRecord,
};
pub use validate::{run_seed, validate_pair, EnergySummary, ValidationReport};

use crate::error::{Error, Result};

/// Names of the bundled synthetic instances.
pub const BUNDLED: [&str; 3] = ["S1", "S2", "S3"];

/// Source text of a bundled instance.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    match name {
        "S1" => Some(include_str!("../../data/s1.mdri")),
        "S2" => Some(include_str!("../../data/s2.mdri")),
        "S3" => Some(include_str!("../../data/s3.mdri")),
        _ => None,
    }
}

pub fn bundled_instance(name: &str) -> Result<LigandInstance> {
    let text = bundled_source(name).ok_or_else(|| Error::Config(format!("no bundled instance named `{name}`")))?;
    crate::io::parse_instance(text)
}
