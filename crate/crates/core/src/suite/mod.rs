//! Base problems, the affine recombination suite and its shared samples.

pub mod affine;
pub mod bbob;
pub mod lhs;
pub mod manifest;
pub mod sample;

pub use affine::{AffineInstance, LOG_CLAMP};
pub use bbob::BaseInstance;
pub use lhs::lhs_sample;
pub use manifest::{generate_suite, ProblemEntry, SuiteConfig, SuiteManifest};
pub use sample::{evaluate_sample, Sample};
