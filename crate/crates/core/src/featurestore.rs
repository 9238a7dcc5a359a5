//! Feature groups keyed by problem id: computed or imported, preprocessed and
//! concatenated.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::suite::sample::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Imported,
}

/// Problems × features, rows in `problems` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub group_name: String,
    pub problems: Vec<String>,
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl FeatureMatrix {
    pub fn new(
        group_name: impl Into<String>,
        problems: Vec<String>,
        names: Vec<String>,
        values: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let group_name = group_name.into();
        if values.len() != problems.len() || values.iter().any(|r| r.len() != names.len()) {
            return Err(Error::Data(format!("{group_name}: matrix shape does not match ids/names")));
        }
        let unique: BTreeSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(Error::Data(format!("{group_name}: duplicate feature names")));
        }
        let unique: BTreeSet<&String> = problems.iter().collect();
        if unique.len() != problems.len() {
            return Err(Error::Data(format!("{group_name}: duplicate problem ids")));
        }
        if let Some((r, _)) = values
            .iter()
            .enumerate()
            .find(|(_, row)| row.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::Data(format!(
                "{group_name}: non-finite value in row {}",
                problems[r]
            )));
        }
        Ok(FeatureMatrix {
            group_name,
            problems,
            names,
            values,
            provenance,
        })
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[k]).collect()
    }

    pub fn row_index(&self) -> BTreeMap<&str, usize> {
        self.problems
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect()
    }

    /// Rows for `ids`, in that order.
    pub fn rows(&self, ids: &[String]) -> Result<Vec<Vec<f64>>> {
        let idx = self.row_index();
        ids.iter()
            .map(|id| {
                idx.get(id.as_str())
                    .map(|&i| self.values[i].clone())
                    .ok_or_else(|| Error::Data(format!("{}: no row for {id}", self.group_name)))
            })
            .collect()
    }

    /// Same group reordered to `ids` (which must be a permutation of the rows).
    pub fn reorder(&self, ids: &[String]) -> Result<Self> {
        FeatureMatrix::new(
            self.group_name.clone(),
            ids.to_vec(),
            self.names.clone(),
            self.rows(ids)?,
            self.provenance,
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["problem_id".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (p, row) in self.problems.iter().zip(&self.values) {
            let mut rec = vec![p.clone()];
            rec.extend(row.iter().map(|v| fmt_f64(*v)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Read a `problem_id,<f1>,...` CSV without coverage checks.
    pub fn read_csv(path: &Path, group_name: &str, provenance: Provenance) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        if header.get(0) != Some("problem_id") {
            return Err(Error::Data(format!(
                "{}: first column must be problem_id",
                path.display()
            )));
        }
        let names: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut problems = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::Data(format!(
                    "{}: row {} has {} fields, header has {}",
                    path.display(),
                    row + 1,
                    rec.len(),
                    header.len()
                )));
            }
            problems.push(rec[0].to_string());
            let vals = rec
                .iter()
                .skip(1)
                .enumerate()
                .map(|(c, s)| {
                    s.trim().parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        row: row + 1,
                        column: names[c].clone(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            values.push(vals);
        }
        FeatureMatrix::new(group_name, problems, names, values, provenance)
    }
}

/// Load an external feature file and check that it covers `suite_ids`.
/// Rows are returned in `suite_ids` order; extra rows are ignored.
pub fn import_features(path: &Path, group_name: &str, suite_ids: &[String]) -> Result<FeatureMatrix> {
    let m = FeatureMatrix::read_csv(path, group_name, Provenance::Imported)?;
    let have: BTreeSet<&str> = m.problems.iter().map(String::as_str).collect();
    let missing: Vec<&str> = suite_ids
        .iter()
        .map(String::as_str)
        .filter(|id| !have.contains(id))
        .collect();
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(20).copied().collect();
        return Err(Error::Data(format!(
            "{group_name}: {} suite problem(s) missing from {}: {}{}",
            missing.len(),
            path.display(),
            shown.join(", "),
            if missing.len() > shown.len() { ", ..." } else { "" }
        )));
    }
    m.reorder(suite_ids)
}

/// Remove zero-range columns; returns the reduced matrix and the dropped names.
pub fn drop_constant(features: &FeatureMatrix) -> (FeatureMatrix, Vec<String>) {
    let keep: Vec<usize> = (0..features.width())
        .filter(|&k| {
            let col = features.column(k);
            col.iter().any(|v| *v != col[0])
        })
        .collect();
    let dropped: Vec<String> = (0..features.width())
        .filter(|k| !keep.contains(k))
        .map(|k| features.names[k].clone())
        .collect();
    if keep.is_empty() && features.width() > 0 {
        log::warn!("{}: every feature is constant; group is empty after dropping", features.group_name);
    }
    let out = FeatureMatrix {
        group_name: features.group_name.clone(),
        problems: features.problems.clone(),
        names: keep.iter().map(|&k| features.names[k].clone()).collect(),
        values: features
            .values
            .iter()
            .map(|r| keep.iter().map(|&k| r[k]).collect())
            .collect(),
        provenance: features.provenance,
    };
    (out, dropped)
}

/// Scale each column to [0, 1]. Constant columns (which should have been
/// dropped first) map to 0.
pub fn minmax_columns(features: &FeatureMatrix) -> FeatureMatrix {
    let mut out = features.clone();
    for k in 0..features.width() {
        let col = features.column(k);
        let (lo, hi) = crate::stats::min_max(&col);
        let range = hi - lo;
        for (row, v) in out.values.iter_mut().zip(&col) {
            row[k] = if range > 0.0 { (v - lo) / range } else { 0.0 };
        }
    }
    out
}

/// Horizontal concatenation; names become `<group>.<feature>`.
pub fn concat_groups(groups: &[&FeatureMatrix]) -> Result<FeatureMatrix> {
    let first = groups
        .first()
        .ok_or_else(|| Error::Usage("nothing to concatenate".into()))?;
    if groups.len() == 1 {
        return Ok((*first).clone());
    }
    let ids = &first.problems;
    let id_set: BTreeSet<&String> = ids.iter().collect();
    let mut names = Vec::new();
    let mut blocks = Vec::new();
    for g in groups {
        let other: BTreeSet<&String> = g.problems.iter().collect();
        if other != id_set {
            return Err(Error::Data(format!(
                "cannot concatenate {} and {}: problem ids differ",
                first.group_name, g.group_name
            )));
        }
        names.extend(g.names.iter().map(|n| format!("{}.{n}", g.group_name)));
        blocks.push(g.rows(ids)?);
    }
    let values = (0..ids.len())
        .map(|i| blocks.iter().flat_map(|b| b[i].iter().copied()).collect())
        .collect();
    let group_name = groups
        .iter()
        .map(|g| g.group_name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let provenance = if groups.iter().all(|g| g.provenance == Provenance::Computed) {
        Provenance::Computed
    } else {
        Provenance::Imported
    };
    FeatureMatrix::new(group_name, ids.clone(), names, values, provenance)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupEntry {
    pub name: String,
    pub width: usize,
    pub provenance: Provenance,
    pub source_sha256: Option<String>,
}

/// Registered groups of one experiment. All groups share one problem id set.
#[derive(Debug, Default)]
pub struct FeatureRegistry {
    groups: BTreeMap<String, (FeatureMatrix, Option<String>)>,
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl FeatureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, group: FeatureMatrix, source_sha256: Option<String>) -> Result<()> {
        if self.groups.contains_key(&group.group_name) {
            return Err(Error::Usage(format!("group {} already registered", group.group_name)));
        }
        if let Some((existing, _)) = self.groups.values().next() {
            let a: BTreeSet<&String> = existing.problems.iter().collect();
            let b: BTreeSet<&String> = group.problems.iter().collect();
            if a != b {
                return Err(Error::Data(format!(
                    "group {} covers different problems than {}",
                    group.group_name, existing.group_name
                )));
            }
        }
        self.groups
            .insert(group.group_name.clone(), (group, source_sha256));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&FeatureMatrix> {
        self.groups.get(name).map(|(g, _)| g)
    }

    pub fn names(&self) -> Vec<String> {
        self.groups.keys().cloned().collect()
    }

    pub fn manifest(&self) -> Vec<GroupEntry> {
        self.groups
            .values()
            .map(|(g, h)| GroupEntry {
                name: g.group_name.clone(),
                width: g.width(),
                provenance: g.provenance,
                source_sha256: h.clone(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(name: &str, ids: &[&str], names: &[&str], values: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix::new(
            name,
            ids.iter().map(|s| s.to_string()).collect(),
            names.iter().map(|s| s.to_string()).collect(),
            values,
            Provenance::Computed,
        )
        .unwrap()
    }

    #[test]
    fn drop_constant_cases() {
        let m = fm(
            "g",
            &["a", "b", "c"],
            &["const", "varies", "one_off"],
            vec![vec![3.0, 1.0, 0.0], vec![3.0, 2.0, 0.0], vec![3.0, 3.0, 1.0]],
        );
        let (d, dropped) = drop_constant(&m);
        assert_eq!(dropped, vec!["const"]);
        assert_eq!(d.names, vec!["varies", "one_off"]);
        let (again, none) = drop_constant(&d);
        assert!(none.is_empty());
        assert_eq!(again, d);
    }

    #[test]
    fn minmax_cases() {
        let m = fm("g", &["a", "b", "c"], &["f"], vec![vec![0.0], vec![5.0], vec![10.0]]);
        assert_eq!(minmax_columns(&m).column(0), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn concat_cases() {
        let a = fm("a", &["p", "q"], &["x", "y"], vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = fm("b", &["q", "p"], &["z"], vec![vec![40.0], vec![20.0]]);
        let ab = concat_groups(&[&a, &b]).unwrap();
        assert_eq!(ab.width(), 3);
        assert_eq!(ab.names, vec!["a.x", "a.y", "b.z"]);
        assert_eq!(ab.values, vec![vec![1.0, 2.0, 20.0], vec![3.0, 4.0, 40.0]]);
        let ba = concat_groups(&[&b, &a]).unwrap();
        for (k, name) in ab.names.iter().enumerate() {
            let k2 = ba.names.iter().position(|n| n == name).unwrap();
            let col_ba: BTreeMap<&String, f64> =
                ba.problems.iter().zip(ba.column(k2)).collect();
            for (p, v) in ab.problems.iter().zip(ab.column(k)) {
                assert_eq!(col_ba[p], v);
            }
        }
        assert_eq!(concat_groups(&[&a]).unwrap(), a);
        let c = fm("c", &["p", "r"], &["w"], vec![vec![0.0], vec![1.0]]);
        assert!(concat_groups(&[&a, &c]).is_err());
    }

    #[test]
    fn import_checks_coverage_and_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("doe2vec.csv");
        let header: Vec<String> = (0..32).map(|k| format!("d{k}")).collect();
        let mut text = format!("problem_id,{}\n", header.join(","));
        for id in ["p1", "p2"] {
            let row: Vec<String> = (0..32).map(|k| format!("{}", k as f64 * 0.5)).collect();
            text.push_str(&format!("{id},{}\n", row.join(",")));
        }
        std::fs::write(&path, &text).unwrap();
        let ids = vec!["p2".to_string(), "p1".to_string()];
        let m = import_features(&path, "doe2vec", &ids).unwrap();
        assert_eq!(m.width(), 32);
        assert_eq!(m.problems, ids);
        assert_eq!(m.provenance, Provenance::Imported);

        let err = import_features(&path, "doe2vec", &["p1".into(), "p3".into()]).unwrap_err();
        assert!(err.to_string().contains("p3"));

        std::fs::write(&path, "problem_id,a,b\np1,1.0,oops\n").unwrap();
        match import_features(&path, "x", &["p1".into()]) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(column, "b");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn export_import_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let m = fm("g", &["a", "b"], &["f1", "f2"], vec![vec![0.1, 1e-300], vec![-2.5, 7.0]]);
        m.write_csv(&path).unwrap();
        let back = FeatureMatrix::read_csv(&path, "g", Provenance::Computed).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn registry_rules() {
        let mut r = FeatureRegistry::new();
        r.register(fm("a", &["p"], &["x"], vec![vec![1.0]]), None).unwrap();
        assert!(r.register(fm("a", &["p"], &["y"], vec![vec![1.0]]), None).is_err());
        assert!(r.register(fm("b", &["q"], &["y"], vec![vec![1.0]]), None).is_err());
        r.register(fm("b", &["p"], &["y"], vec![vec![2.0]]), Some("abc".into())).unwrap();
        assert_eq!(r.names(), vec!["a", "b"]);
        assert_eq!(r.manifest()[1].source_sha256.as_deref(), Some("abc"));
    }
}
