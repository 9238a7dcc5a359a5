//! Experiment file: TOML with one section per stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::portfolio::{PortfolioName, RunSettings, MIN_POP_SIZE};
use crate::selector::ForestConfig;
use crate::splits::{PairSelection, Protocol};
use crate::suite::SuiteConfig;
use crate::tla::{PersistenceConfig, TlaConfig, VolumeTransform};

pub const COMPUTED_GROUPS: [&str; 3] = ["ela", "ela_scaled", "tinytla"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub classes: Vec<u8>,
    pub instances: Vec<u32>,
    pub alphas: Vec<f64>,
    pub dim: usize,
    pub sample_seed: u64,
    /// Points per sample; 0 means 50 × dim.
    pub sample_size: usize,
}

impl Default for SuiteSection {
    fn default() -> Self {
        let full = SuiteConfig::full(2);
        SuiteSection {
            classes: full.classes,
            instances: full.instances,
            alphas: full.alphas,
            dim: full.dim,
            sample_seed: 0,
            sample_size: 0,
        }
    }
}

impl SuiteSection {
    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            classes: self.classes.clone(),
            instances: self.instances.clone(),
            alphas: self.alphas.clone(),
            dim: self.dim,
        }
    }

    pub fn points(&self) -> usize {
        if self.sample_size == 0 {
            crate::suite::lhs::default_size(self.dim)
        } else {
            self.sample_size
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PortfolioSection {
    pub names: Vec<PortfolioName>,
    pub runs: usize,
    pub budget: usize,
    pub pop_size: usize,
    pub master_seed: u64,
}

impl Default for PortfolioSection {
    fn default() -> Self {
        PortfolioSection {
            names: vec![PortfolioName::TwoDeTwoPso],
            runs: 3,
            budget: 100,
            pop_size: 20,
            master_seed: 0,
        }
    }
}

impl PortfolioSection {
    pub fn settings(&self) -> RunSettings {
        RunSettings {
            runs: self.runs,
            budget: self.budget,
            pop_size: self.pop_size,
            master_seed: self.master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportSpec {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TlaSection {
    pub alpha: f64,
    pub transform: VolumeTransform,
    pub sigma: f64,
    pub resolution: usize,
    pub max_dim: usize,
    pub allow_h2: bool,
    pub threshold: Option<f64>,
}

impl Default for TlaSection {
    fn default() -> Self {
        let d = TlaConfig::default();
        TlaSection {
            alpha: d.alpha,
            transform: d.transform,
            sigma: d.sigma,
            resolution: d.resolution,
            max_dim: d.persistence.max_dim,
            allow_h2: d.persistence.allow_h2,
            threshold: d.persistence.threshold,
        }
    }
}

impl TlaSection {
    pub fn tla_config(&self) -> TlaConfig {
        TlaConfig {
            alpha: self.alpha,
            transform: self.transform,
            sigma: self.sigma,
            resolution: self.resolution,
            persistence: PersistenceConfig {
                max_dim: self.max_dim,
                allow_h2: self.allow_h2,
                threshold: self.threshold,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesSection {
    /// Any of `ela`, `ela_scaled`, `tinytla`.
    pub groups: Vec<String>,
    pub imports: Vec<ImportSpec>,
    /// Extra selector inputs built by concatenating registered groups.
    pub combinations: Vec<Vec<String>>,
    pub tinytla: TlaSection,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        FeaturesSection {
            groups: vec!["ela".into()],
            imports: Vec::new(),
            combinations: Vec::new(),
            tinytla: TlaSection::default(),
        }
    }
}

impl FeaturesSection {
    /// Computed groups followed by imported ones.
    pub fn group_names(&self) -> Vec<String> {
        self.groups
            .iter()
            .cloned()
            .chain(self.imports.iter().map(|i| i.name.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitsSection {
    pub protocols: Vec<Protocol>,
    pub seed: u64,
    pub random_k: usize,
    pub problem_pairs: PairSelection,
}

impl Default for SplitsSection {
    fn default() -> Self {
        SplitsSection {
            protocols: Protocol::ALL.to_vec(),
            seed: 0,
            random_k: 5,
            problem_pairs: PairSelection::Disjoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub spearman: bool,
    pub cosine: bool,
    pub alignment: bool,
    pub perf_correlation: bool,
    pub pca: bool,
    pub cosine_pairs: usize,
    pub alignment_problems: usize,
    pub pca_dims: usize,
    pub seed: u64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            spearman: true,
            cosine: true,
            alignment: true,
            perf_correlation: true,
            pca: true,
            cosine_pairs: 10_000,
            alignment_problems: 1000,
            pca_dims: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Relative paths resolve against the config file's directory.
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// Write every fold's forest as JSON (large).
    pub dump_trees: bool,
    pub suite: SuiteSection,
    pub portfolio: PortfolioSection,
    pub features: FeaturesSection,
    pub splits: SplitsSection,
    pub selector: ForestConfig,
    pub analysis: AnalysisSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            output_dir: PathBuf::from("out"),
            workers: 0,
            dump_trees: false,
            suite: SuiteSection::default(),
            portfolio: PortfolioSection::default(),
            features: FeaturesSection::default(),
            splits: SplitsSection::default(),
            selector: ForestConfig::default(),
            analysis: AnalysisSection::default(),
        }
    }
}

pub fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config sections serialize");
    hex::encode(Sha256::digest(bytes))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Parse, resolve relative paths against the file's directory and validate.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        for imp in &mut cfg.features.imports {
            if imp.path.is_relative() {
                imp.path = base.join(&imp.path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Identity of the experiment: everything except where it is written
    /// and how many threads compute it.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.workers = 0;
        hash_json(&c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.suite.dim == 0 {
            return bad("suite.dim must be at least 1".into());
        }
        if self.suite.points() < 2 {
            return bad("suite.sample_size must be at least 2".into());
        }
        if self.portfolio.names.is_empty() {
            return bad("portfolio.names is empty".into());
        }
        if self.portfolio.runs == 0 || self.portfolio.budget == 0 {
            return bad("portfolio.runs and portfolio.budget must be positive".into());
        }
        if self.portfolio.pop_size < MIN_POP_SIZE {
            return bad(format!("portfolio.pop_size must be at least {MIN_POP_SIZE}"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.features.groups {
            if !COMPUTED_GROUPS.contains(&g.as_str()) {
                return bad(format!("unknown feature group {g:?}; computed groups are {COMPUTED_GROUPS:?}"));
            }
        }
        for name in self.features.group_names() {
            if !seen.insert(name.clone()) {
                return bad(format!("feature group {name:?} listed twice"));
            }
        }
        if seen.is_empty() {
            return bad("no feature groups configured".into());
        }
        for imp in &self.features.imports {
            if !imp.path.is_file() {
                return bad(format!("import {} not found at {}", imp.name, imp.path.display()));
            }
        }
        for combo in &self.features.combinations {
            if combo.len() < 2 {
                return bad("a feature combination needs at least two groups".into());
            }
            if let Some(g) = combo.iter().find(|g| !seen.contains(*g)) {
                return bad(format!("combination refers to unknown group {g:?}"));
            }
        }
        let t = &self.features.tinytla;
        if (t.max_dim > 2 || (t.max_dim == 2 && !t.allow_h2))
            && self.features.groups.iter().any(|g| g == "tinytla")
        {
            return Err(Error::Unsupported(
                "tinytla max_dim 2 needs allow_h2 = true and a threshold".into(),
            ));
        }
        if self.splits.protocols.is_empty() {
            return bad("splits.protocols is empty".into());
        }
        if self.splits.random_k < 2 {
            return bad("splits.random_k must be at least 2".into());
        }
        let f = &self.selector;
        if f.n_trees == 0 || f.min_samples_leaf == 0 || f.min_samples_split < 2 {
            return bad("selector needs n_trees >= 1, min_samples_leaf >= 1, min_samples_split >= 2".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.suite.suite_config().cardinality(), 8280);
    }

    #[test]
    fn partial_file() {
        let cfg = ExperimentConfig::from_toml(
            r#"
output_dir = "runs/a"
[suite]
classes = [1, 2, 3]
[portfolio]
names = ["5DE", "2DE+2PSO"]
[selector]
n_trees = 10
max_features = "all"
[splits]
protocols = ["instance", "problem"]
problem_pairs = "all"
"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.suite.instances, vec![1, 2, 3, 4, 5]);
        assert_eq!(cfg.portfolio.names.len(), 2);
        assert_eq!(cfg.selector.n_trees, 10);
        assert_eq!(cfg.selector.max_features, crate::selector::MaxFeatures::All);
        assert_eq!(cfg.splits.problem_pairs, PairSelection::All);
        let k = ExperimentConfig::from_toml("[selector]\nmax_features = 3\n").unwrap();
        assert_eq!(k.selector.max_features, crate::selector::MaxFeatures::Count(3));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ExperimentConfig::from_toml("[suite]\nbogus = 1\n").is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.features.groups = vec!["nope".into()];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.features.imports.push(ImportSpec {
            name: "doe2vec".into(),
            path: "/definitely/missing.csv".into(),
        });
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.features.groups.push("tinytla".into());
        cfg.features.tinytla.max_dim = 2;
        assert!(matches!(cfg.validate(), Err(Error::Unsupported(_))));
    }
}
