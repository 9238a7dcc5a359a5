//! Train/test split plans over an affine suite.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyed_rng;
use crate::suite::{ProblemEntry, SuiteManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Instance,
    Random,
    ProblemCombination,
    Problem,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Instance,
        Protocol::Random,
        Protocol::ProblemCombination,
        Protocol::Problem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Instance => "instance",
            Protocol::Random => "random",
            Protocol::ProblemCombination => "problem_combination",
            Protocol::Problem => "problem",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| Error::Usage(format!("unknown split protocol {s:?}")))
    }
}

/// How problem-split folds are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelection {
    /// Every unordered pair of classes.
    All,
    /// A seeded perfect matching: disjoint pairs covering every class
    /// (one class is left out when the count is odd).
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub label: String,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub protocol: Protocol,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

fn fold_where(
    label: String,
    manifest: &SuiteManifest,
    is_test: impl Fn(&ProblemEntry) -> bool,
    is_train: impl Fn(&ProblemEntry) -> bool,
) -> Fold {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for p in &manifest.problems {
        if is_test(p) {
            test.push(p.id.clone());
        } else if is_train(p) {
            train.push(p.id.clone());
        }
    }
    Fold { label, train, test }
}

/// One fold per instance id: test on that instance, train on the rest.
pub fn instance_split(manifest: &SuiteManifest) -> SplitPlan {
    let instances: BTreeSet<u32> = manifest.problems.iter().map(|p| p.instance).collect();
    let folds = instances
        .into_iter()
        .map(|m| fold_where(m.to_string(), manifest, |p| p.instance == m, |_| true))
        .collect();
    SplitPlan {
        protocol: Protocol::Instance,
        seed: 0,
        folds,
    }
}

/// k near-equal blocks of a seeded shuffle.
pub fn random_split(manifest: &SuiteManifest, k: usize, seed: u64) -> Result<SplitPlan> {
    let n = manifest.len();
    if k < 2 || k > n {
        return Err(Error::Usage(format!("random split needs 2 <= k <= {n}, got {k}")));
    }
    let mut ids = manifest.ids();
    ids.shuffle(&mut keyed_rng!("random-split", seed, &manifest.config_hash, k));
    let folds = (0..k)
        .map(|i| {
            let (lo, hi) = (i * n / k, (i + 1) * n / k);
            let mut test = ids[lo..hi].to_vec();
            let mut train: Vec<String> = ids[..lo].iter().chain(&ids[hi..]).cloned().collect();
            test.sort();
            train.sort();
            Fold {
                label: i.to_string(),
                train,
                test,
            }
        })
        .collect();
    Ok(SplitPlan {
        protocol: Protocol::Random,
        seed,
        folds,
    })
}

fn suite_classes(manifest: &SuiteManifest) -> Vec<u8> {
    let set: BTreeSet<u8> = manifest
        .problems
        .iter()
        .flat_map(|p| [p.class_i, p.class_j])
        .collect();
    set.into_iter().collect()
}

/// One fold per class: test on every problem with that parent, train on
/// problems with neither parent equal to it.
pub fn problem_combination_split(manifest: &SuiteManifest) -> SplitPlan {
    let folds = suite_classes(manifest)
        .into_iter()
        .map(|c| fold_where(c.to_string(), manifest, |p| p.has_parent(c), |_| true))
        .collect();
    SplitPlan {
        protocol: Protocol::ProblemCombination,
        seed: 0,
        folds,
    }
}

pub fn class_pairs(manifest: &SuiteManifest, selection: PairSelection, seed: u64) -> Vec<(u8, u8)> {
    let classes = suite_classes(manifest);
    match selection {
        PairSelection::All => {
            let mut out = Vec::new();
            for (i, &a) in classes.iter().enumerate() {
                for &b in &classes[i + 1..] {
                    out.push((a, b));
                }
            }
            out
        }
        PairSelection::Disjoint => {
            let mut shuffled = classes;
            shuffled.shuffle(&mut keyed_rng!("problem-split-pairs", seed, &manifest.config_hash));
            let mut out: Vec<(u8, u8)> = shuffled
                .chunks_exact(2)
                .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
                .collect();
            out.sort_unstable();
            out
        }
    }
}

/// One fold per class pair {a, b}: test on problems whose parents are
/// exactly {a, b}; train on problems touching neither.
pub fn problem_split(manifest: &SuiteManifest, selection: PairSelection, seed: u64) -> SplitPlan {
    let folds = class_pairs(manifest, selection, seed)
        .into_iter()
        .map(|(a, b)| {
            fold_where(
                format!("{a}-{b}"),
                manifest,
                |p| p.has_parent(a) && p.has_parent(b),
                |p| !p.has_parent(a) && !p.has_parent(b),
            )
        })
        .collect();
    SplitPlan {
        protocol: Protocol::Problem,
        seed,
        folds,
    }
}

pub fn build_plan(
    manifest: &SuiteManifest,
    protocol: Protocol,
    seed: u64,
    random_k: usize,
    pairs: PairSelection,
) -> Result<SplitPlan> {
    Ok(match protocol {
        Protocol::Instance => instance_split(manifest),
        Protocol::Random => random_split(manifest, random_k, seed)?,
        Protocol::ProblemCombination => problem_combination_split(manifest),
        Protocol::Problem => problem_split(manifest, pairs, seed),
    })
}

impl SplitPlan {
    /// Disjointness, coverage and the protocol's leakage constraints.
    pub fn validate(&self, manifest: &SuiteManifest) -> Result<()> {
        let bad = |fold: &Fold, msg: String| {
            Err(Error::Invariant(format!("{} fold {}: {msg}", self.protocol, fold.label)))
        };
        for fold in &self.folds {
            if fold.test.is_empty() {
                return bad(fold, "empty test set".into());
            }
            let mut seen = BTreeSet::new();
            for id in fold.train.iter().chain(&fold.test) {
                if !seen.insert(id.as_str()) {
                    return bad(fold, format!("{id} appears twice"));
                }
                if manifest.get(id).is_none() {
                    return bad(fold, format!("{id} is not in the suite"));
                }
            }
            let entries = |ids: &[String]| -> Vec<ProblemEntry> {
                ids.iter().filter_map(|id| manifest.get(id).cloned()).collect()
            };
            let (train, test) = (entries(&fold.train), entries(&fold.test));
            match self.protocol {
                Protocol::Instance => {
                    let a: BTreeSet<u32> = train.iter().map(|p| p.instance).collect();
                    let b: BTreeSet<u32> = test.iter().map(|p| p.instance).collect();
                    if !a.is_disjoint(&b) {
                        return bad(fold, "instance ids shared between train and test".into());
                    }
                }
                Protocol::Random => {}
                Protocol::ProblemCombination | Protocol::Problem => {
                    let held: BTreeSet<u8> = test.iter().flat_map(|p| [p.class_i, p.class_j]).collect();
                    let held: BTreeSet<u8> = if self.protocol == Protocol::ProblemCombination {
                        // the held-out class is the one every test problem shares
                        held.into_iter()
                            .filter(|c| test.iter().all(|p| p.has_parent(*c)))
                            .collect()
                    } else {
                        held
                    };
                    if let Some(p) = train.iter().find(|p| held.iter().any(|c| p.has_parent(*c))) {
                        return bad(fold, format!("train problem {} shares a held-out class", p.id));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::{generate_suite, SuiteConfig};

    fn full() -> SuiteManifest {
        generate_suite(&SuiteConfig::full(2)).unwrap()
    }

    #[test]
    fn instance_fold_sizes() {
        let m = full();
        let plan = instance_split(&m);
        plan.validate(&m).unwrap();
        assert_eq!(plan.folds.len(), 5);
        for f in &plan.folds {
            assert_eq!(f.test.len(), 1656);
            assert_eq!(f.train.len(), 8280 - 1656);
        }
        assert!(plan.folds[0].test.iter().all(|id| m.get(id).unwrap().instance == 1));
        let all: BTreeSet<&String> = plan.folds.iter().flat_map(|f| &f.test).collect();
        assert_eq!(all.len(), 8280);
    }

    #[test]
    fn random_split_sizes_and_seed() {
        let m = full();
        let a = random_split(&m, 5, 7).unwrap();
        a.validate(&m).unwrap();
        assert!(a.folds.iter().all(|f| f.test.len() == 1656));
        assert_eq!(a, random_split(&m, 5, 7).unwrap());
        assert_ne!(a, random_split(&m, 5, 8).unwrap());
        let uneven = random_split(&m, 7, 0).unwrap();
        let sizes: BTreeSet<usize> = uneven.folds.iter().map(|f| f.test.len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert!(random_split(&m, 1, 0).is_err());
    }

    #[test]
    fn combination_fold_sizes() {
        let m = full();
        let plan = problem_combination_split(&m);
        plan.validate(&m).unwrap();
        assert_eq!(plan.folds.len(), 24);
        for f in &plan.folds {
            assert_eq!(f.test.len(), 690);
            assert_eq!(f.train.len(), 7590);
        }
    }

    #[test]
    fn problem_fold_sizes() {
        let m = full();
        let all = problem_split(&m, PairSelection::All, 0);
        all.validate(&m).unwrap();
        assert_eq!(all.folds.len(), 276);
        let f12 = &all.folds[0];
        assert_eq!(f12.label, "1-2");
        assert_eq!(f12.test.len(), 30);
        assert_eq!(f12.train.len(), 6930);
        let e17 = m.problems.iter().find(|p| p.class_i == 1 && p.class_j == 7).unwrap();
        assert!(!f12.test.contains(&e17.id) && !f12.train.contains(&e17.id));

        let sub = problem_split(&m, PairSelection::Disjoint, 3);
        sub.validate(&m).unwrap();
        assert_eq!(sub.folds.len(), 12);
        let covered: BTreeSet<String> = sub
            .folds
            .iter()
            .flat_map(|f| f.label.split('-').map(String::from).collect::<Vec<_>>())
            .collect();
        assert_eq!(covered.len(), 24);
    }

    #[test]
    fn validate_catches_leakage() {
        let m = full();
        let mut plan = problem_split(&m, PairSelection::All, 0);
        let leak = m.problems.iter().find(|p| p.class_i == 1 && p.class_j == 5).unwrap();
        plan.folds[0].train.push(leak.id.clone());
        assert!(plan.validate(&m).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = generate_suite(&SuiteConfig {
            classes: vec![1, 2, 3],
            instances: vec![1, 2],
            alphas: vec![0.5],
            dim: 2,
        })
        .unwrap();
        let plan = random_split(&m, 2, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("plan.json");
        plan.write_json(&p).unwrap();
        assert_eq!(SplitPlan::read_json(&p).unwrap(), plan);
        assert_eq!("problem-combination".parse::<Protocol>().unwrap(), Protocol::ProblemCombination);
    }
}
