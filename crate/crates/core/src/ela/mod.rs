//! Classical exploratory landscape analysis features computed from a fixed
//! sample, with an optional min-max scaling of the objective values.
//!
//! Families: `ela_distr`, `ela_meta`, `ela_level`, `ic`, `disp`, `nbc`,
//! `pca`. Each family ends with a `.flag` column that is 1 when a degenerate
//! statistic was replaced by its neutral value (or the whole family failed
//! its precondition and was filled with zeros).

pub mod disp;
pub mod distr;
pub mod ic;
pub mod level;
pub mod meta;
pub mod nbc;
pub mod pca;

use crate::error::Result;
use crate::stats;
use crate::suite::Sample;

pub use disp::ela_disp;
pub use distr::ela_distr;
pub use ic::ela_ic;
pub use level::ela_level;
pub use meta::ela_meta;
pub use nbc::ela_nbc;
pub use pca::ela_pca;

/// Named values of one feature family.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl Family {
    pub fn new(names: &[&str], values: Vec<f64>) -> Self {
        Self::from_owned(names.iter().map(|s| s.to_string()).collect(), values)
    }

    pub fn from_owned(names: Vec<String>, values: Vec<f64>) -> Self {
        debug_assert_eq!(names.len(), values.len());
        Family { names, values }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    /// All-zero values with the trailing flag set.
    fn failed(names: Vec<String>) -> Self {
        let mut values = vec![0.0; names.len()];
        if let Some(last) = values.last_mut() {
            *last = 1.0;
        }
        Family { names, values }
    }
}

pub fn pairwise_distances(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = stats::euclid(&x[i], &x[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElaVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub scaled_y: bool,
}

impl ElaVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

type FamilyFn = fn(&[Vec<f64>], &[f64]) -> Result<Family>;

fn families() -> Vec<(Vec<String>, FamilyFn)> {
    let owned = |n: &[&str]| n.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        (owned(&distr::NAMES), |_, y| ela_distr(y)),
        (owned(&meta::NAMES), ela_meta),
        (level::names(), ela_level),
        (owned(&ic::NAMES), ela_ic),
        (disp::names(), ela_disp),
        (owned(&nbc::NAMES), ela_nbc),
        (owned(&pca::NAMES), ela_pca),
    ]
}

/// The fixed feature schema.
pub fn feature_names() -> Vec<String> {
    families().into_iter().flat_map(|(n, _)| n).collect()
}

/// Every family concatenated. With `scale_y` the objective values are first
/// min-max scaled to [0, 1] (a constant vector becomes all 0.5).
pub fn ela_all(sample: &Sample, scale_y: bool) -> ElaVector {
    let y = if scale_y {
        stats::minmax_scale(&sample.y)
    } else {
        sample.y.clone()
    };
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (schema, f) in families() {
        let fam = match f(&sample.x, &y) {
            Ok(fam) => fam,
            Err(e) => {
                log::debug!("{}: {e}; family filled with sentinels", sample.problem_id);
                Family::failed(schema.clone())
            }
        };
        debug_assert_eq!(fam.names, schema);
        let clean = fam
            .values
            .into_iter()
            .map(|v| if v.is_finite() { v } else { 0.0 });
        names.extend(schema);
        values.extend(clean);
    }
    ElaVector {
        names,
        values,
        scaled_y: scale_y,
    }
}
