use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::suite::Sample;

pub const DEFAULT_ALPHA: f64 = 0.3;

/// Per-coordinate transform applied to the min-max scaled x-values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeTransform {
    /// Empirical CDF (average ranks mapped to [0, 1]).
    #[default]
    EmpiricalCdf,
    Identity,
}

impl VolumeTransform {
    pub fn apply(self, col: &[f64]) -> Vec<f64> {
        match self {
            VolumeTransform::Identity => col.to_vec(),
            VolumeTransform::EmpiricalCdf => {
                let n = col.len();
                if n < 2 {
                    return vec![0.5; n];
                }
                stats::ranks(col)
                    .into_iter()
                    .map(|r| (r - 1.0) / (n - 1) as f64)
                    .collect()
            }
        }
    }
}

/// Symmetric matrix of fused x/y distances, entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FusedDistanceMatrix {
    pub d: Vec<Vec<f64>>,
    pub alpha_weight: f64,
}

impl FusedDistanceMatrix {
    pub fn n(&self) -> usize {
        self.d.len()
    }
}

/// `alpha · D_x + (1 - alpha) · D_y`. x and y are min-max scaled per problem
/// (constant columns become 0.5), x is then passed through `transform`, and
/// `D_x` is divided by `sqrt(dim)` so that both parts lie in [0, 1].
pub fn tla_distance(sample: &Sample, alpha: f64, transform: VolumeTransform) -> Result<FusedDistanceMatrix> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::Usage(format!("fused distance needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Usage(format!("distance weight {alpha} outside [0, 1]")));
    }
    let dim = sample.dim();
    let cols: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let raw: Vec<f64> = sample.x.iter().map(|r| r[k]).collect();
            transform.apply(&stats::minmax_scale(&raw))
        })
        .collect();
    let y = stats::minmax_scale(&sample.y);
    let norm = (dim.max(1) as f64).sqrt();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let dx = cols
                .iter()
                .map(|c| (c[i] - c[j]).powi(2))
                .sum::<f64>()
                .sqrt()
                / norm;
            let dy = (y[i] - y[j]).abs();
            let v = alpha * dx + (1.0 - alpha) * dy;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(FusedDistanceMatrix {
        d,
        alpha_weight: alpha,
    })
}
