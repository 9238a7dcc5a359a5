//! Built-in oracle suites and artifact integrity checks behind `verify`.

use std::path::{Path, PathBuf};

use rand::Rng as _;

use super::{changed_outputs, read_manifest, ExperimentConfig, Pipeline, Stage};
use crate::error::Result;
use crate::keyed_rng;
use crate::perf::{dummy_target, normalized_precision, scaled_precision};
use crate::portfolio::RunRecord;
use crate::selector::{as_performance, select, ForestConfig, ForestModel};
use crate::splits::{instance_split, problem_combination_split, problem_split, PairSelection};
use crate::suite::{generate_suite, SuiteConfig};
use crate::tla::{h0_diagram, vr_persistence, PersistenceConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}{}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) }
                )
            })
            .collect()
    }
}

fn random_points(rng: &mut crate::rng::Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()
}

fn prim_mst(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut weights = Vec::with_capacity(n.saturating_sub(1));
    best[0] = 0.0;
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("vertex left");
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] && d[u][v] < best[v] {
                best[v] = d[u][v];
            }
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

fn h0_vs_mst(trials: usize) -> Check {
    let mut rng = keyed_rng!("verify-mst");
    for t in 0..trials {
        let n = rng.random_range(2..=50);
        let pts = random_points(&mut rng, n, 3);
        let d = crate::ela::pairwise_distances(&pts);
        let mut deaths: Vec<f64> = h0_diagram(&d)
            .pairs
            .iter()
            .filter(|p| p.death.is_finite())
            .map(|p| p.death)
            .collect();
        deaths.sort_by(f64::total_cmp);
        if deaths != prim_mst(&d) {
            return Check::new("h0-equals-mst", false, format!("matrix {t} (n={n}) differs"));
        }
    }
    Check::new("h0-equals-mst", true, format!("{trials} random matrices"))
}

/// Rank over GF(2) of a set of column bitmasks.
fn gf2_rank(mut cols: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        if let Some(i) = cols.iter().position(|c| c >> bit & 1 == 1) {
            let pivot = cols.swap_remove(i);
            for c in cols.iter_mut() {
                if *c >> bit & 1 == 1 {
                    *c ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// First Betti number of the Rips complex at scale `t`.
fn betti1(d: &[Vec<f64>], t: f64) -> usize {
    let n = d.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] <= t {
                edges.push((i, j));
            }
        }
    }
    let edge_index = |a: usize, b: usize| edges.iter().position(|&e| e == (a, b));
    let d1: Vec<u64> = edges.iter().map(|&(i, j)| (1u64 << i) | (1u64 << j)).collect();
    let mut d2 = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let (Some(a), Some(b), Some(c)) = (edge_index(i, j), edge_index(i, k), edge_index(j, k)) {
                    d2.push((1u64 << a) | (1u64 << b) | (1u64 << c));
                }
            }
        }
    }
    edges.len() - gf2_rank(d1) - gf2_rank(d2)
}

fn h1_vs_bruteforce(trials: usize) -> Check {
    let mut rng = keyed_rng!("verify-h1");
    let cfg = PersistenceConfig {
        max_dim: 1,
        ..PersistenceConfig::default()
    };
    for trial in 0..trials {
        let n = rng.random_range(3..=6);
        let pts = random_points(&mut rng, n, 2);
        let d = crate::ela::pairwise_distances(&pts);
        let diagrams = match vr_persistence(&d, &cfg) {
            Ok(dg) => dg,
            Err(e) => return Check::new("h1-equals-bruteforce", false, e.to_string()),
        };
        let h1 = &diagrams[1].pairs;
        let mut scales: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| d[i][j]).collect();
        scales.sort_by(f64::total_cmp);
        for &t in &scales {
            let alive = h1.iter().filter(|p| p.birth <= t && t < p.death).count();
            let want = betti1(&d, t);
            if alive != want {
                return Check::new(
                    "h1-equals-bruteforce",
                    false,
                    format!("trial {trial}: {alive} bars alive at {t}, Betti number {want}"),
                );
            }
        }
    }
    Check::new("h1-equals-bruteforce", true, format!("{trials} point sets of 3-6 points"))
}

fn expect(fails: &mut Vec<String>, name: &str, got: f64, want: f64) {
    if (got - want).abs() > 1e-12 {
        fails.push(format!("{name}: {got} != {want}"));
    }
}

fn metric_examples() -> Check {
    let mut fails = Vec::new();
    let sp = |y, b, w| scaled_precision(y, b, w).unwrap_or(f64::NAN);
    expect(&mut fails, "s(y=b)", sp(0.3, 0.3, 2.0), 0.0);
    expect(&mut fails, "s(y=w)", sp(2.0, 0.3, 2.0), 1.0);
    expect(&mut fails, "s(5;0,10)", sp(5.0, 0.0, 10.0), 0.5);
    expect(&mut fails, "s tie", sp(1.0, 1.0, 1.0), 0.0);
    let rec = |a: &str, run, y| RunRecord {
        problem_id: "p".into(),
        algorithm: a.into(),
        run,
        best_y: y,
        budget: 1,
    };
    let algs = vec!["A".to_string(), "B".to_string()];
    match normalized_precision(&[rec("A", 0, 1.0), rec("B", 0, 3.0)], &algs) {
        Ok(m) => {
            expect(&mut fails, "S row a", m.scores[0][0], 0.0);
            expect(&mut fails, "S row b", m.scores[0][1], 1.0);
        }
        Err(e) => fails.push(e.to_string()),
    }
    match normalized_precision(
        &[rec("A", 0, 1.0), rec("B", 0, 3.0), rec("A", 1, 5.0), rec("B", 1, 3.0)],
        &algs,
    ) {
        Ok(m) => expect(&mut fails, "best then worst", m.scores[0][0], 0.5),
        Err(e) => fails.push(e.to_string()),
    }
    if let Ok(m) = crate::perf::PerformanceMatrix::new(
        vec!["p".into(), "q".into()],
        algs.clone(),
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
    ) {
        match dummy_target(&m) {
            Ok(v) => {
                expect(&mut fails, "dummy a", v[0], 0.5);
                expect(&mut fails, "dummy b", v[1], 0.5);
                expect(&mut fails, "dummy tie", select(&[v])[0] as f64, 0.0);
            }
            Err(e) => fails.push(e.to_string()),
        }
    }
    expect(&mut fails, "select", select(&[vec![0.2, 0.1, 0.9]])[0] as f64, 1.0);
    let truth = vec![vec![0.0, 1.0, 0.4], vec![1.0, 0.0, 0.3]];
    expect(&mut fails, "AS best", as_performance(&[0, 1], &truth).unwrap_or(f64::NAN), 1.0);
    expect(&mut fails, "AS worst", as_performance(&[1, 0], &truth).unwrap_or(f64::NAN), 0.0);
    expect(&mut fails, "AS single", as_performance(&[1], &[vec![0.1, 0.3]]).unwrap_or(f64::NAN), 0.8);
    Check::new("metric-examples", fails.is_empty(), fails.join("; "))
}

fn forest_memorizes() -> Check {
    let mut rng = keyed_rng!("verify-forest");
    let x = random_points(&mut rng, 10, 3);
    let y = random_points(&mut rng, 10, 2);
    let names = |p: &str, n: usize| (0..n).map(|k| format!("{p}{k}")).collect::<Vec<_>>();
    let cfg = ForestConfig {
        n_trees: 1,
        bootstrap: false,
        ..ForestConfig::default()
    };
    let ok = ForestModel::fit(&x, &y, &names("f", 3), &names("a", 2), &cfg)
        .map(|m| x.iter().zip(&y).all(|(r, t)| &m.predict(r) == t))
        .unwrap_or(false);
    Check::new("forest-memorization", ok, "")
}

fn split_cardinalities() -> Check {
    let suite = match generate_suite(&SuiteConfig::full(2)) {
        Ok(s) => s,
        Err(e) => return Check::new("split-cardinalities", false, e.to_string()),
    };
    let mut fails = Vec::new();
    if suite.len() != 8280 {
        fails.push(format!("suite has {} problems", suite.len()));
    }
    if instance_split(&suite).folds.iter().any(|f| f.test.len() != 1656) {
        fails.push("instance fold size".into());
    }
    if problem_combination_split(&suite)
        .folds
        .iter()
        .any(|f| f.test.len() != 690 || f.train.len() != 7590)
    {
        fails.push("problem-combination fold size".into());
    }
    let all = problem_split(&suite, PairSelection::All, 0);
    if all.folds.len() != 276 || all.folds.iter().any(|f| f.test.len() != 30 || f.train.len() != 6930) {
        fails.push("problem fold size".into());
    }
    Check::new("split-cardinalities", fails.is_empty(), fails.join("; "))
}

/// A small configuration that exercises every stage in seconds.
pub fn smoke_config(output_dir: PathBuf, workers: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        output_dir,
        workers,
        ..ExperimentConfig::default()
    };
    cfg.suite.classes = vec![1, 3, 8, 15, 21];
    cfg.suite.instances = vec![1, 2];
    cfg.suite.alphas = vec![0.5];
    cfg.portfolio.runs = 2;
    cfg.portfolio.budget = 10;
    cfg.portfolio.pop_size = 8;
    cfg.features.groups = vec!["ela".into(), "tinytla".into()];
    cfg.selector.n_trees = 8;
    cfg.analysis.cosine_pairs = 50;
    cfg.analysis.alignment_problems = 20;
    cfg
}

/// Every file under `dir`, relative, sorted.
pub fn list_files(dir: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        if let Ok(entries) = std::fs::read_dir(dir) {
            for e in entries.flatten() {
                let p = e.path();
                if p.is_dir() {
                    walk(root, &p, out);
                } else if let Ok(rel) = p.strip_prefix(root) {
                    out.push(rel.to_path_buf());
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

/// Paths whose bytes differ between two output trees (or exist in only one).
pub fn diff_trees(a: &Path, b: &Path) -> Vec<PathBuf> {
    let fa = list_files(a);
    let fb = list_files(b);
    let mut diff: Vec<PathBuf> = fa
        .iter()
        .filter(|rel| std::fs::read(a.join(rel)).ok() != std::fs::read(b.join(rel)).ok())
        .cloned()
        .collect();
    diff.extend(fb.iter().filter(|rel| !fa.contains(rel)).cloned());
    diff
}

fn determinism_replay(workers: usize) -> Check {
    let base = std::env::temp_dir().join(format!("asgap-verify-{}", std::process::id()));
    let run = |w: usize| -> Result<PathBuf> {
        let dir = base.join(format!("w{w}"));
        if dir.exists() {
            std::fs::remove_dir_all(&dir).map_err(|e| crate::error::Error::io(&dir, e))?;
        }
        Pipeline::new(smoke_config(dir.clone(), w), false).run_all()?;
        Ok(dir)
    };
    let result = run(1).and_then(|a| run(workers).map(|b| (a, b)));
    let check = match result {
        Ok((a, b)) => {
            let diff = diff_trees(&a, &b);
            Check::new(
                "determinism-1-vs-n-workers",
                diff.is_empty(),
                if diff.is_empty() {
                    format!("{} files identical with 1 and {workers} workers", list_files(&a).len())
                } else {
                    format!("differing files: {diff:?}")
                },
            )
        }
        Err(e) => Check::new("determinism-1-vs-n-workers", false, e.to_string()),
    };
    let _ = std::fs::remove_dir_all(&base);
    check
}

/// Recorded hashes of every stage output under `out`.
pub fn artifact_checks(out: &Path) -> Vec<Check> {
    let mut checks = Vec::new();
    for stage in Stage::ALL {
        match read_manifest(out, stage) {
            Ok(Some(m)) => {
                let changed = changed_outputs(out, &m);
                checks.push(Check::new(
                    &format!("artifacts-{stage}"),
                    changed.is_empty(),
                    if changed.is_empty() {
                        format!("{} files match recorded hashes", m.outputs.len())
                    } else {
                        format!("hash mismatch or missing: {}", changed.join(", "))
                    },
                ));
            }
            Ok(None) => {}
            Err(e) => checks.push(Check::new(&format!("artifacts-{stage}"), false, e.to_string())),
        }
    }
    checks
}

/// Run the oracle suites, then check artifacts of `output_dir` if given.
pub fn verify(output_dir: Option<&Path>, replay_workers: usize) -> VerifyReport {
    let mut checks = vec![
        h0_vs_mst(200),
        h1_vs_bruteforce(200),
        metric_examples(),
        forest_memorizes(),
        split_cardinalities(),
        determinism_replay(replay_workers.max(2)),
    ];
    if let Some(out) = output_dir {
        checks.extend(artifact_checks(out));
    }
    VerifyReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn betti_oracle_on_a_square() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let d = crate::ela::pairwise_distances(&pts);
        assert_eq!(betti1(&d, 0.5), 0);
        assert_eq!(betti1(&d, 1.0), 1);
        assert_eq!(betti1(&d, 2f64.sqrt()), 0);
    }

    #[test]
    fn oracles_pass() {
        for c in [h0_vs_mst(50), h1_vs_bruteforce(50), metric_examples(), forest_memorizes()] {
            assert!(c.passed, "{c:?}");
        }
    }
}
