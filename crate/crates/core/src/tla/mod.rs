//! Topological landscape features: a fused x/y distance matrix, its
//! Vietoris–Rips persistence diagrams and their persistence images.

pub mod distance;
pub mod image;
pub mod persistence;

use serde::{Deserialize, Serialize};

pub use distance::{tla_distance, FusedDistanceMatrix, VolumeTransform, DEFAULT_ALPHA};
pub use image::{persistence_image, PersistenceImageVector, DEFAULT_RESOLUTION, DEFAULT_SIGMA};
pub use persistence::{h0_diagram, vr_persistence, Pair, PersistenceConfig, PersistenceDiagram};

use crate::error::Result;
use crate::suite::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlaConfig {
    pub alpha: f64,
    pub transform: VolumeTransform,
    pub sigma: f64,
    pub resolution: usize,
    pub persistence: PersistenceConfig,
}

impl Default for TlaConfig {
    fn default() -> Self {
        TlaConfig {
            alpha: DEFAULT_ALPHA,
            transform: VolumeTransform::default(),
            sigma: DEFAULT_SIGMA,
            resolution: DEFAULT_RESOLUTION,
            persistence: PersistenceConfig::default(),
        }
    }
}

impl TlaConfig {
    pub fn feature_names(&self) -> Vec<String> {
        let r = self.resolution;
        let mut out: Vec<String> = (0..r).map(|k| format!("h0_{k:03}")).collect();
        for dim in 1..=self.persistence.max_dim {
            for row in 0..r {
                for col in 0..r {
                    out.push(format!("h{dim}_{row:02}_{col:02}"));
                }
            }
        }
        out
    }
}

/// Concatenated persistence images in dimension order.
pub fn tla_features(sample: &Sample, config: &TlaConfig) -> Result<Vec<f64>> {
    let fused = tla_distance(sample, config.alpha, config.transform)?;
    let diagrams = vr_persistence(&fused.d, &config.persistence)?;
    Ok(diagrams
        .iter()
        .flat_map(|d| persistence_image(d, config.sigma, config.resolution).values)
        .collect())
}
