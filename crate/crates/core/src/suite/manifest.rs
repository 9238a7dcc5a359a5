use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::suite::affine::{affine_id, AffineInstance};
use crate::suite::bbob::NUM_CLASSES;

/// Which parents and blend weights make up a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub classes: Vec<u8>,
    pub instances: Vec<u32>,
    pub alphas: Vec<f64>,
    pub dim: usize,
}

impl SuiteConfig {
    /// Every class, the first five instances, blend weights 0.25/0.5/0.75.
    pub fn full(dim: usize) -> Self {
        SuiteConfig {
            classes: (1..=NUM_CLASSES).collect(),
            instances: (1..=5).collect(),
            alphas: vec![0.25, 0.5, 0.75],
            dim,
        }
    }

    /// Number of problems the configuration enumerates.
    pub fn cardinality(&self) -> usize {
        let c = self.classes.len();
        c * c.saturating_sub(1) * self.instances.len() * self.alphas.len()
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("suite config serializes"));
        hex::encode(h.finalize())
    }
}

/// One affine problem of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub id: String,
    pub class_i: u8,
    pub class_j: u8,
    pub instance: u32,
    pub alpha: f64,
    pub dim: usize,
}

impl ProblemEntry {
    pub fn instantiate(&self) -> Result<AffineInstance> {
        AffineInstance::from_classes(self.class_i, self.class_j, self.instance, self.alpha, self.dim)
    }

    pub fn has_parent(&self, class: u8) -> bool {
        self.class_i == class || self.class_j == class
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub config: SuiteConfig,
    pub config_hash: String,
    pub problems: Vec<ProblemEntry>,
}

impl SuiteManifest {
    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.problems.iter().map(|p| p.id.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&ProblemEntry> {
        self.problems
            .binary_search_by(|p| p.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.problems[i])
    }
}

/// Enumerate every ordered pair of distinct classes sharing an instance id,
/// for every blend weight. Sorted by id.
pub fn generate_suite(config: &SuiteConfig) -> Result<SuiteManifest> {
    if config.classes.is_empty() || config.instances.is_empty() || config.alphas.is_empty() {
        return Err(Error::Usage("suite needs at least one class, instance and alpha".into()));
    }
    if config.dim == 0 {
        return Err(Error::Usage("suite dimension must be at least 1".into()));
    }
    if let Some(c) = config.classes.iter().find(|c| !(1..=NUM_CLASSES).contains(c)) {
        return Err(Error::Usage(format!("class {c} outside 1..=24")));
    }
    if let Some(i) = config.instances.iter().find(|i| !(1..=5).contains(*i)) {
        return Err(Error::Usage(format!("instance {i} outside 1..=5")));
    }
    if let Some(a) = config.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Usage(format!("alpha {a} outside [0, 1]")));
    }
    let mut classes = config.classes.clone();
    classes.sort_unstable();
    classes.dedup();
    let mut instances = config.instances.clone();
    instances.sort_unstable();
    instances.dedup();
    let mut alphas = config.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let config = SuiteConfig {
        classes,
        instances,
        alphas,
        dim: config.dim,
    };

    let mut problems = Vec::with_capacity(config.cardinality());
    for &ci in &config.classes {
        for &cj in &config.classes {
            if ci == cj {
                continue;
            }
            for &m in &config.instances {
                for &alpha in &config.alphas {
                    problems.push(ProblemEntry {
                        id: affine_id(ci, cj, m, alpha),
                        class_i: ci,
                        class_j: cj,
                        instance: m,
                        alpha,
                        dim: config.dim,
                    });
                }
            }
        }
    }
    problems.sort_by(|a, b| a.id.cmp(&b.id));
    let before = problems.len();
    problems.dedup_by(|a, b| a.id == b.id);
    if problems.len() != before {
        return Err(Error::Usage("alphas collide after rounding to two decimals".into()));
    }
    Ok(SuiteManifest {
        config_hash: config.hash(),
        config,
        problems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(classes: Vec<u8>, instances: Vec<u32>, alphas: Vec<f64>) -> SuiteConfig {
        SuiteConfig {
            classes,
            instances,
            alphas,
            dim: 2,
        }
    }

    #[test]
    fn full_suite_size() {
        let m = generate_suite(&SuiteConfig::full(2)).unwrap();
        assert_eq!(m.len(), 8280);
        let mut ids = m.ids();
        ids.dedup();
        assert_eq!(ids.len(), 8280);
        assert!(m.problems.windows(2).all(|w| w[0].id < w[1].id));
    }

    #[test]
    fn two_classes_give_both_orders() {
        let m = generate_suite(&cfg(vec![1, 2], vec![1], vec![0.5])).unwrap();
        let pairs: Vec<(u8, u8)> = m.problems.iter().map(|p| (p.class_i, p.class_j)).collect();
        assert_eq!(pairs, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn single_class_is_empty_and_empty_config_is_error() {
        assert!(generate_suite(&cfg(vec![1], vec![1, 2], vec![0.5])).unwrap().is_empty());
        assert!(matches!(generate_suite(&cfg(vec![], vec![1], vec![0.5])), Err(Error::Usage(_))));
    }

    #[test]
    fn lookup_by_id() {
        let m = generate_suite(&cfg(vec![1, 2, 3], vec![1, 2], vec![0.25])).unwrap();
        let e = m.get("A_03_01_2_0.25").unwrap();
        assert_eq!((e.class_i, e.class_j, e.instance), (3, 1, 2));
        assert!(m.get("A_03_03_2_0.25").is_none());
    }
}
