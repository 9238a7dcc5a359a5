//! Per-run scaled precision, its run-average (normalized precision) and the
//! single-best-solver target. Lower is better throughout.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::portfolio::RunRecord;
use crate::suite::sample::fmt_f64;

/// `(y - best) / (worst - best)`; 0 when every algorithm tied.
pub fn scaled_precision(y: f64, best: f64, worst: f64) -> Result<f64> {
    if y < best || y > worst {
        return Err(Error::Invariant(format!(
            "value {y} outside run range [{best}, {worst}]"
        )));
    }
    if worst == best {
        return Ok(0.0);
    }
    Ok(((y - best) / (worst - best)).clamp(0.0, 1.0))
}

/// Normalized precision per (problem, algorithm).
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    pub problems: Vec<String>,
    pub algorithms: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl PerformanceMatrix {
    pub fn new(problems: Vec<String>, algorithms: Vec<String>, scores: Vec<Vec<f64>>) -> Result<Self> {
        if scores.len() != problems.len() || scores.iter().any(|r| r.len() != algorithms.len()) {
            return Err(Error::Data("performance matrix shape mismatch".into()));
        }
        Ok(PerformanceMatrix {
            problems,
            algorithms,
            scores,
        })
    }

    pub fn row_index(&self) -> BTreeMap<&str, usize> {
        self.problems
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect()
    }

    /// Rows for `ids`, in that order.
    pub fn subset(&self, ids: &[String]) -> Result<PerformanceMatrix> {
        let idx = self.row_index();
        let scores = ids
            .iter()
            .map(|id| {
                idx.get(id.as_str())
                    .map(|&i| self.scores[i].clone())
                    .ok_or_else(|| Error::Data(format!("no performance row for {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PerformanceMatrix {
            problems: ids.to_vec(),
            algorithms: self.algorithms.clone(),
            scores,
        })
    }

    pub fn column(&self, a: usize) -> Vec<f64> {
        self.scores.iter().map(|r| r[a]).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["problem_id".to_string()];
        header.extend(self.algorithms.iter().cloned());
        w.write_record(&header)?;
        for (p, row) in self.problems.iter().zip(&self.scores) {
            let mut rec = vec![p.clone()];
            rec.extend(row.iter().map(|v| fmt_f64(*v)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        let algorithms: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut problems = Vec::new();
        let mut scores = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            problems.push(rec.get(0).unwrap_or_default().to_string());
            let vals = rec
                .iter()
                .skip(1)
                .enumerate()
                .map(|(c, s)| {
                    s.parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        row: row + 1,
                        column: algorithms.get(c).cloned().unwrap_or_default(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            scores.push(vals);
        }
        PerformanceMatrix::new(problems, algorithms, scores)
    }
}

/// Scale each run against that run's best and worst algorithm, then average
/// over runs. Problems are sorted by id; algorithms keep the given order.
pub fn normalized_precision(records: &[RunRecord], algorithms: &[String]) -> Result<PerformanceMatrix> {
    if algorithms.is_empty() {
        return Err(Error::Usage("no algorithms given".into()));
    }
    let alg_index: BTreeMap<&str, usize> = algorithms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    // problem -> run -> per-algorithm best_y
    let mut table: BTreeMap<&str, BTreeMap<usize, Vec<Option<f64>>>> = BTreeMap::new();
    for r in records {
        let Some(&a) = alg_index.get(r.algorithm.as_str()) else {
            continue;
        };
        let slot = &mut table
            .entry(r.problem_id.as_str())
            .or_default()
            .entry(r.run)
            .or_insert_with(|| vec![None; algorithms.len()])[a];
        if slot.is_some() {
            return Err(Error::Data(format!(
                "duplicate record for {} / {} / run {}",
                r.problem_id, r.algorithm, r.run
            )));
        }
        *slot = Some(r.best_y);
    }

    let mut problems = Vec::with_capacity(table.len());
    let mut scores = Vec::with_capacity(table.len());
    for (pid, runs) in &table {
        let mut sums = vec![0.0; algorithms.len()];
        for (run, ys) in runs {
            let ys: Vec<f64> = ys
                .iter()
                .enumerate()
                .map(|(a, y)| {
                    y.ok_or_else(|| {
                        Error::Data(format!(
                            "missing record for {pid} / {} / run {run}",
                            algorithms[a]
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            let best = ys.iter().copied().fold(f64::INFINITY, f64::min);
            let worst = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (s, y) in sums.iter_mut().zip(&ys) {
                *s += scaled_precision(*y, best, worst)?;
            }
        }
        let n = runs.len() as f64;
        problems.push(pid.to_string());
        scores.push(sums.into_iter().map(|s| s / n).collect());
    }
    // Every problem must have the same run set.
    if let Some(first) = table.values().next() {
        let expected: Vec<usize> = first.keys().copied().collect();
        for (pid, runs) in &table {
            let got: Vec<usize> = runs.keys().copied().collect();
            if got != expected {
                return Err(Error::Data(format!(
                    "{pid} has runs {got:?}, expected {expected:?}"
                )));
            }
        }
    }
    PerformanceMatrix::new(problems, algorithms.to_vec(), scores)
}

/// Column means over the training rows. Each column is summed in sorted
/// order so the result does not depend on row order.
pub fn dummy_target(train: &PerformanceMatrix) -> Result<Vec<f64>> {
    if train.scores.is_empty() {
        return Err(Error::Usage("dummy target needs at least one training row".into()));
    }
    let n = train.scores.len() as f64;
    Ok((0..train.algorithms.len())
        .map(|a| {
            let mut col = train.column(a);
            col.sort_by(f64::total_cmp);
            col.iter().sum::<f64>() / n
        })
        .collect())
}
