//! Affine BBOB recombination suite, DE/PSO portfolios, landscape features and
//! algorithm selectors evaluated under four train/test split protocols.

pub mod analysis;
pub mod ela;
pub mod error;
pub mod featurestore;
pub mod par;
pub mod perf;
pub mod pipeline;
pub mod portfolio;
pub mod rng;
pub mod selector;
pub mod splits;
pub mod stats;
pub mod suite;
pub mod tla;

pub use error::{Error, Result};
