//! Complementarity and alignment analyses over feature groups.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurestore::{concat_groups, drop_constant, minmax_columns, FeatureMatrix};
use crate::keyed_rng;
use crate::par;
use crate::perf::PerformanceMatrix;
use crate::stats::{cosine, mean, median, spearman};
use crate::suite::sample::fmt_f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub rho: Vec<Vec<f64>>,
    /// Leaf order of the average-linkage dendrogram on `1 - |rho|`.
    pub order: Vec<usize>,
}

fn constant(col: &[f64]) -> bool {
    col.iter().all(|v| *v == col[0])
}

/// Spearman correlation between every pair of features (constant columns get
/// 0 off the diagonal), with a clustering leaf order.
pub fn spearman_matrix(groups: &[&FeatureMatrix]) -> Result<CorrelationMatrix> {
    let all = concat_groups(groups)?;
    let p = all.width();
    let cols: Vec<Vec<f64>> = (0..p).map(|k| all.column(k)).collect();
    let ranked: Vec<Option<Vec<f64>>> = par::map(&cols, |c| {
        (!constant(c)).then(|| crate::stats::ranks(c))
    });
    let upper: Vec<Vec<f64>> = par::map_range(p, |i| {
        (i + 1..p)
            .map(|j| match (&ranked[i], &ranked[j]) {
                (Some(a), Some(b)) => crate::stats::pearson(a, b).clamp(-1.0, 1.0),
                _ => 0.0,
            })
            .collect()
    });
    let mut rho = vec![vec![0.0; p]; p];
    for i in 0..p {
        rho[i][i] = 1.0;
        for (k, v) in upper[i].iter().enumerate() {
            let j = i + 1 + k;
            rho[i][j] = *v;
            rho[j][i] = *v;
        }
    }
    let dist: Vec<Vec<f64>> = rho
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, v)| if i == j { 0.0 } else { 1.0 - v.abs() }).collect())
        .collect();
    let order = average_linkage_order(&dist);
    Ok(CorrelationMatrix {
        names: all.names,
        rho,
        order,
    })
}

/// UPGMA on a full distance matrix; returns the dendrogram leaf order.
/// Ties merge the lowest-numbered pair first.
pub fn average_linkage_order(dist: &[Vec<f64>]) -> Vec<usize> {
    let n = dist.len();
    if n == 0 {
        return Vec::new();
    }
    // active clusters: (leaf sequence, size)
    let mut clusters: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    let mut d: Vec<Vec<f64>> = dist.to_vec();
    for _ in 1..n {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..n {
            if clusters[i].is_none() {
                continue;
            }
            for j in i + 1..n {
                if clusters[j].is_some() && d[i][j] < best.0 {
                    best = (d[i][j], i, j);
                }
            }
        }
        let (_, a, b) = best;
        let (na, nb) = (
            clusters[a].as_ref().map_or(0, Vec::len) as f64,
            clusters[b].as_ref().map_or(0, Vec::len) as f64,
        );
        for k in 0..n {
            if k != a && k != b && clusters[k].is_some() {
                let v = (na * d[a][k] + nb * d[b][k]) / (na + nb);
                d[a][k] = v;
                d[k][a] = v;
            }
        }
        let mut merged = clusters[a].take().unwrap_or_default();
        merged.extend(clusters[b].take().unwrap_or_default());
        clusters[a] = Some(merged);
    }
    clusters.into_iter().flatten().next().unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSimilarityRecord {
    pub problem_a: String,
    pub problem_b: String,
    /// One entry per group; `None` when the group has no usable features
    /// or a row is all zeros.
    pub similarity: Vec<Option<f64>>,
}

/// Drop constant columns, then min-max scale.
pub fn preprocess(group: &FeatureMatrix) -> FeatureMatrix {
    minmax_columns(&drop_constant(group).0)
}

/// `n` distinct unordered index pairs out of `0..size`, in draw order.
pub fn sample_pairs(size: usize, n: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = size * size.saturating_sub(1) / 2;
    if n >= total {
        return (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
            .collect();
    }
    let mut rng = keyed_rng!("pair-sample", seed, size, n);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = rng.random_range(0..size);
        let b = rng.random_range(0..size);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    out
}

pub fn cosine_consistency(groups: &[&FeatureMatrix], n_pairs: usize, seed: u64) -> Result<Vec<PairSimilarityRecord>> {
    let first = groups
        .first()
        .ok_or_else(|| Error::Usage("cosine consistency needs at least one group".into()))?;
    let mut ids = first.problems.clone();
    ids.sort();
    if ids.len() < 2 {
        return Err(Error::Usage("cosine consistency needs at least 2 problems".into()));
    }
    let prepared = groups
        .iter()
        .map(|g| preprocess(g).reorder(&ids))
        .collect::<Result<Vec<_>>>()?;
    let pairs = sample_pairs(ids.len(), n_pairs, seed);
    Ok(par::map(&pairs, |&(a, b)| PairSimilarityRecord {
        problem_a: ids[a].clone(),
        problem_b: ids[b].clone(),
        similarity: prepared
            .iter()
            .map(|g| {
                if g.width() == 0 {
                    None
                } else {
                    cosine(&g.values[a], &g.values[b])
                }
            })
            .collect(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub a: usize,
    pub b: usize,
    pub feature_sim: Option<f64>,
    pub perf_sim: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub feature_sim: f64,
    pub count: usize,
    pub mean_perf_sim: f64,
    pub median_perf_sim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub problems: Vec<String>,
    pub records: Vec<AlignmentRecord>,
    pub curve: Vec<Bin>,
}

/// Feature cosine versus performance cosine over every pair of `n` sampled
/// problems, with perf similarity binned on feature similarity rounded to
/// two decimals.
pub fn alignment(group: &FeatureMatrix, perf: &PerformanceMatrix, n_problems: usize, seed: u64) -> Result<Alignment> {
    if perf.algorithms.len() < 2 {
        return Err(Error::Usage("alignment needs a portfolio of at least 2 algorithms".into()));
    }
    let mut ids = group.problems.clone();
    ids.sort();
    let n = n_problems.min(ids.len());
    let picked = rand::seq::index::sample(&mut keyed_rng!("alignment", seed, ids.len(), n), ids.len(), n);
    let mut problems: Vec<String> = picked.iter().map(|i| ids[i].clone()).collect();
    problems.sort();
    let features = preprocess(group).reorder(&problems)?;
    let scores = perf.subset(&problems)?.scores;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let records = par::map(&pairs, |&(a, b)| AlignmentRecord {
        a,
        b,
        feature_sim: if features.width() == 0 {
            None
        } else {
            cosine(&features.values[a], &features.values[b])
        },
        perf_sim: cosine(&scores[a], &scores[b]),
    });
    let curve = bin_curve(&records);
    Ok(Alignment {
        problems,
        records,
        curve,
    })
}

pub fn bin_curve(records: &[AlignmentRecord]) -> Vec<Bin> {
    let mut bins: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let (Some(f), Some(p)) = (r.feature_sim, r.perf_sim) {
            bins.entry((f * 100.0).round() as i64).or_default().push(p);
        }
    }
    bins.into_iter()
        .map(|(k, v)| Bin {
            feature_sim: k as f64 / 100.0,
            count: v.len(),
            mean_perf_sim: mean(&v),
            median_perf_sim: median(&v),
        })
        .collect()
}

/// Spearman of every feature (constants included, at 0) against one
/// algorithm's score column.
pub fn per_feature_perf_corr(group: &FeatureMatrix, perf: &PerformanceMatrix, algorithm: usize) -> Result<Vec<(String, f64)>> {
    if algorithm >= perf.algorithms.len() {
        return Err(Error::Usage(format!("algorithm index {algorithm} out of range")));
    }
    let target = perf.subset(&group.problems)?.column(algorithm);
    let target_const = constant(&target);
    Ok(group
        .names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let col = group.column(k);
            let rho = if target_const || constant(&col) {
                0.0
            } else {
                spearman(&col, &target).clamp(-1.0, 1.0)
            };
            (name.clone(), rho)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub projection: Vec<Vec<f64>>,
    /// Share of total variance per kept component, non-increasing.
    pub explained: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub note: Option<String>,
}

/// Mean-centred PCA keeping at most `dims` components (fewer if the data
/// has lower rank).
pub fn pca_reduce(rows: &[Vec<f64>], dims: usize) -> Result<Pca> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if n < 2 || p == 0 {
        return Err(Error::Usage("PCA needs at least 2 rows and 1 column".into()));
    }
    let means: Vec<f64> = (0..p).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n as f64).collect();
    let x = DMatrix::from_fn(n, p, |i, k| rows[i][k] - means[k]);
    // eigen-decompose the smaller of X'X and XX'
    let (vals, dirs) = if p <= n {
        let e = SymmetricEigen::new(x.transpose() * &x);
        (e.eigenvalues, e.eigenvectors)
    } else {
        let e = SymmetricEigen::new(&x * x.transpose());
        let mut v = x.transpose() * &e.eigenvectors;
        for (mut col, lambda) in v.column_iter_mut().zip(e.eigenvalues.iter()) {
            let norm = col.norm();
            if *lambda > 0.0 && norm > 0.0 {
                col /= norm;
            }
        }
        (e.eigenvalues, v)
    };
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let total: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    let top = vals[order[0]].max(0.0);
    let rank = order.iter().filter(|&&i| vals[i] > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    let k = dims.min(rank);
    let note = (k < dims).then(|| format!("data rank {rank} below requested {dims} dimensions"));
    let projection = (0..n)
        .map(|i| {
            order[..k]
                .iter()
                .map(|&c| x.row(i).dot(&dirs.column(c).transpose()))
                .collect()
        })
        .collect();
    let explained: Vec<f64> = order[..k]
        .iter()
        .map(|&c| if total > 0.0 { vals[c].max(0.0) / total } else { 0.0 })
        .collect();
    let cumulative = explained
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    Ok(Pca {
        projection,
        explained,
        cumulative,
        note,
    })
}

pub fn write_correlation(dir: &Path, stem: &str, m: &CorrelationMatrix) -> Result<()> {
    let path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = vec!["feature".to_string()];
    header.extend(m.names.iter().cloned());
    w.write_record(&header)?;
    for (name, row) in m.names.iter().zip(&m.rho) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|v| fmt_f64(*v)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let order: Vec<&String> = m.order.iter().map(|&i| &m.names[i]).collect();
    let path = dir.join(format!("{stem}_order.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&order)?).map_err(|e| Error::io(&path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_pairs(path: &Path, groups: &[String], records: &[PairSimilarityRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["problem_a".to_string(), "problem_b".to_string()];
    header.extend(groups.iter().cloned());
    w.write_record(&header)?;
    for r in records {
        let mut rec = vec![r.problem_a.clone(), r.problem_b.clone()];
        rec.extend(r.similarity.iter().map(|v| opt(*v)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Pair CSV plus a `<stem>_bins.csv` sidecar with the binned curve.
pub fn write_alignment(dir: &Path, stem: &str, a: &Alignment) -> Result<()> {
    let path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["problem_a", "problem_b", "feature_sim", "perf_sim"])?;
    for r in &a.records {
        w.write_record([
            a.problems[r.a].as_str(),
            &a.problems[r.b],
            &opt(r.feature_sim),
            &opt(r.perf_sim),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let path = dir.join(format!("{stem}_bins.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["feature_sim", "count", "mean_perf_sim", "median_perf_sim"])?;
    for b in &a.curve {
        w.write_record([
            format!("{:.2}", b.feature_sim),
            b.count.to_string(),
            fmt_f64(b.mean_perf_sim),
            fmt_f64(b.median_perf_sim),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

/// Long-format `algorithm,feature,rho` rows.
pub fn write_distribution(path: &Path, per_algorithm: &[(String, Vec<(String, f64)>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "feature", "rho"])?;
    for (alg, values) in per_algorithm {
        for (n, v) in values {
            w.write_record([alg.as_str(), n, &fmt_f64(*v)])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurestore::Provenance;

    fn group(name: &str, cols: Vec<Vec<f64>>) -> FeatureMatrix {
        let n = cols[0].len();
        FeatureMatrix::new(
            name,
            (0..n).map(|i| format!("p{i:03}")).collect(),
            (0..cols.len()).map(|k| format!("f{k}")).collect(),
            (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect(),
            Provenance::Computed,
        )
        .unwrap()
    }

    #[test]
    fn spearman_rules() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let g = group(
            "g",
            vec![
                x.clone(),
                x.iter().map(|v| v.exp() * 3.0).collect(),
                x.iter().map(|v| -v).collect(),
                vec![2.0; 20],
            ],
        );
        let m = spearman_matrix(&[&g]).unwrap();
        assert!((m.rho[0][1] - 1.0).abs() < 1e-12);
        assert!((m.rho[0][2] + 1.0).abs() < 1e-12);
        assert_eq!(m.rho[0][3], 0.0);
        for i in 0..4 {
            assert_eq!(m.rho[i][i], 1.0);
            for j in 0..4 {
                assert_eq!(m.rho[i][j], m.rho[j][i]);
            }
        }
        let mut order = m.order.clone();
        order.sort();
        assert_eq!(order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn linkage_groups_close_leaves() {
        let d = vec![
            vec![0.0, 0.9, 0.1, 0.9],
            vec![0.9, 0.0, 0.9, 0.2],
            vec![0.1, 0.9, 0.0, 0.9],
            vec![0.9, 0.2, 0.9, 0.0],
        ];
        let order = average_linkage_order(&d);
        let pos = |k| order.iter().position(|&v| v == k).unwrap() as i64;
        assert_eq!((pos(0) - pos(2)).abs(), 1);
        assert_eq!((pos(1) - pos(3)).abs(), 1);
    }

    #[test]
    fn pair_sampling() {
        let a = sample_pairs(100, 500, 3);
        assert_eq!(a.len(), 500);
        assert_eq!(a, sample_pairs(100, 500, 3));
        let set: HashSet<_> = a.iter().collect();
        assert_eq!(set.len(), 500);
        assert!(a.iter().all(|(i, j)| i < j));
        assert_eq!(sample_pairs(5, 100, 0).len(), 10);
    }

    #[test]
    fn cosine_cases() {
        let g = group("g", vec![vec![0.0, 1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0, 0.5]]);
        let empty = group("c", vec![vec![4.0; 4]]);
        let recs = cosine_consistency(&[&g, &empty], 6, 0).unwrap();
        assert_eq!(recs.len(), 6);
        for r in &recs {
            assert!(r.similarity[1].is_none());
            let s = r.similarity[0].unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&s));
            match (r.problem_a.as_str(), r.problem_b.as_str()) {
                ("p000", "p002") => assert!((s - 1.0).abs() < 1e-12),
                ("p000", "p001") => assert!(s.abs() < 1e-12),
                _ => {}
            }
        }
    }

    #[test]
    fn alignment_counts_and_bins() {
        let n = 60;
        let g = group(
            "g",
            vec![(0..n).map(|i| i as f64).collect(), (0..n).map(|i| ((i * 7) % 11) as f64).collect()],
        );
        let ids = g.problems.clone();
        let scores: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / n as f64, 1.0 - i as f64 / n as f64]).collect();
        let perf = PerformanceMatrix::new(ids, vec!["a".into(), "b".into()], scores).unwrap();
        let al = alignment(&g, &perf, 40, 1).unwrap();
        assert_eq!(al.records.len(), 40 * 39 / 2);
        let counted: usize = al.curve.iter().map(|b| b.count).sum();
        let defined = al.records.iter().filter(|r| r.feature_sim.is_some() && r.perf_sim.is_some()).count();
        assert_eq!(counted, defined);
        assert!(al.curve.iter().all(|b| b.count > 0));
        let rows = preprocess(&g).values;
        assert!((cosine(&rows[5], &rows[5]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn per_feature_correlations() {
        let perf_col: Vec<f64> = (0..15).map(|i| ((i * 5) % 7) as f64 / 7.0).collect();
        let g = group("g", vec![perf_col.clone(), vec![1.0; 15], (0..15).map(|i| i as f64).collect()]);
        let perf = PerformanceMatrix::new(
            g.problems.clone(),
            vec!["a".into(), "b".into()],
            perf_col.iter().map(|v| vec![*v, 0.5]).collect(),
        )
        .unwrap();
        let r = per_feature_perf_corr(&g, &perf, 0).unwrap();
        assert!((r[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(r[1].1, 0.0);
        assert!(r.iter().all(|(_, v)| v.abs() <= 1.0));
    }

    #[test]
    fn pca_rank_and_order() {
        let mut rng = crate::keyed_rng!("pca-test");
        let basis: Vec<Vec<f64>> = (0..3).map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let c: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                (0..8).map(|k| (0..3).map(|b| c[b] * basis[b][k]).sum()).collect()
            })
            .collect();
        let mut rows = rows;
        rows.push(rows[0].clone());
        let p = pca_reduce(&rows, 20).unwrap();
        assert_eq!(p.explained.len(), 3);
        assert!(p.note.is_some());
        assert!((p.cumulative[2] - 1.0).abs() < 1e-9);
        assert!(p.explained.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(p.projection[0], p.projection[40]);

        // wide data takes the Gram-matrix path
        let wide: Vec<Vec<f64>> = rows.iter().take(5).map(|r| r.iter().chain(r.iter()).copied().collect()).collect();
        let q = pca_reduce(&wide, 2).unwrap();
        assert_eq!(q.explained.len(), 2);
        let direct_total: f64 = {
            let means: Vec<f64> = (0..16).map(|k| wide.iter().map(|r| r[k]).sum::<f64>() / 5.0).collect();
            wide.iter().flat_map(|r| r.iter().zip(&means).map(|(v, m)| (v - m) * (v - m))).sum()
        };
        let proj_var: f64 = q.projection.iter().flatten().map(|v| v * v).sum();
        assert!((proj_var / direct_total - q.cumulative[1]).abs() < 1e-9);
    }
}
