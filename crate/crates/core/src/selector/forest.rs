use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tree::{Data, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::featurestore::FeatureMatrix;
use crate::keyed_rng;
use crate::par;
use crate::perf::PerformanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    /// ⌈sqrt(width)⌉
    Sqrt,
    All,
    #[serde(untagged)]
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, width: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (width as f64).sqrt().ceil() as usize,
            MaxFeatures::All => width,
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, width.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub min_impurity_decrease: f64,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
            min_samples_split: 2,
            min_samples_leaf: 1,
            min_impurity_decrease: 0.0,
            max_depth: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub feature_names: Vec<String>,
    pub target_names: Vec<String>,
    pub seed: u64,
    pub trees: Vec<Tree>,
    /// Normalized mean decrease in impurity.
    pub importance: Vec<f64>,
}

impl ForestModel {
    /// Fit on raw rows. Row order matters for bootstrap draws; use
    /// [`train_forest`] to get an order-independent fit.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[Vec<f64>],
        feature_names: &[String],
        target_names: &[String],
        cfg: &ForestConfig,
    ) -> Result<Self> {
        let width = feature_names.len();
        if width == 0 {
            return Err(Error::Usage("cannot train a forest on zero features".into()));
        }
        if x.len() < 2 || x.len() != y.len() {
            return Err(Error::Usage(format!(
                "forest needs at least 2 aligned rows, got {} feature rows and {} target rows",
                x.len(),
                y.len()
            )));
        }
        if cfg.n_trees == 0 || cfg.min_samples_leaf == 0 || cfg.min_samples_split < 2 {
            return Err(Error::Config(
                "forest needs n_trees >= 1, min_samples_leaf >= 1, min_samples_split >= 2".into(),
            ));
        }
        let t = target_names.len();
        if x.iter().any(|r| r.len() != width) || y.iter().any(|r| r.len() != t) {
            return Err(Error::Data("ragged forest training data".into()));
        }
        let cols: Vec<Vec<f64>> = (0..width).map(|f| x.iter().map(|r| r[f]).collect()).collect();
        let flat: Vec<f64> = y.iter().flatten().copied().collect();
        let data = Data { cols: &cols, y: &flat, t };
        let params = TreeParams {
            max_features: cfg.max_features.resolve(width),
            min_samples_split: cfg.min_samples_split,
            min_samples_leaf: cfg.min_samples_leaf,
            min_impurity_decrease: cfg.min_impurity_decrease,
            max_depth: cfg.max_depth,
        };
        let n = x.len();
        let grown = par::map_range(cfg.n_trees, |k| {
            let mut rng = keyed_rng!("forest-tree", cfg.seed, k);
            let sample: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            Tree::grow(&data, sample, &params, &mut rng)
        });
        let mut importance = vec![0.0; width];
        let mut trees = Vec::with_capacity(grown.len());
        for (tree, imp) in grown {
            let total: f64 = imp.iter().sum();
            if total > 0.0 {
                for (acc, v) in importance.iter_mut().zip(&imp) {
                    *acc += v / total;
                }
            }
            trees.push(tree);
        }
        let total: f64 = importance.iter().sum();
        if total > 0.0 {
            importance.iter_mut().for_each(|v| *v /= total);
        }
        Ok(ForestModel {
            feature_names: feature_names.to_vec(),
            target_names: target_names.to_vec(),
            seed: cfg.seed,
            trees,
            importance,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.target_names.len()];
        for tree in &self.trees {
            for (o, v) in out.iter_mut().zip(tree.predict(x)) {
                *o += v;
            }
        }
        let n = self.trees.len() as f64;
        out.iter_mut().for_each(|v| *v /= n);
        out
    }

    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    /// `(feature, importance)` pairs in feature order.
    pub fn feature_importance(&self) -> Vec<(String, f64)> {
        self.feature_names
            .iter()
            .cloned()
            .zip(self.importance.iter().copied())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Train on the rows named by `ids`. Rows are put in id order first so the
/// fit does not depend on how `ids` is ordered.
pub fn train_forest(
    features: &FeatureMatrix,
    perf: &PerformanceMatrix,
    ids: &[String],
    cfg: &ForestConfig,
) -> Result<ForestModel> {
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    let x = features.rows(&ids)?;
    let y = perf.subset(&ids)?.scores;
    ForestModel::fit(&x, &y, &features.names, &perf.algorithms, cfg)
}
