//! Baseline, anchored-target (AFORE), residual (RESELF) and
//! self-distillation (OSDF) strategies, and recursive gap filling.

mod anchor;
mod artifact;
mod gap;
mod train;

pub use anchor::{afore_decode, afore_encode};
pub use artifact::{
    constant_artifact, predict, predict_components, Stage, StrategyArtifact, StrategyKind, ARTIFACT_FORMAT_VERSION,
};
pub use gap::{gap_fill, DEFAULT_GAP_DAYS, GAP_DAYS};
pub use train::{train_afore, train_baseline, train_osdf, train_reself, StageConfig};

/// Default self-distillation weight.
pub const DEFAULT_LAMBDA: f64 = 0.2;
