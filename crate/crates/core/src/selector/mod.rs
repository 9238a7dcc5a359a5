//! Multi-target forest selector, the single-best-solver baseline and the
//! algorithm-selection score.

mod forest;
mod tree;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use forest::{train_forest, ForestConfig, ForestModel, MaxFeatures};
pub use tree::{Node, Tree};

use crate::error::{Error, Result};
use crate::featurestore::FeatureMatrix;
use crate::perf::{dummy_target, PerformanceMatrix};
use crate::splits::SplitPlan;
use crate::stats::{argmin, median};
use crate::suite::sample::fmt_f64;

/// Index of the lowest predicted score for each row (lowest index on ties).
pub fn select(predictions: &[Vec<f64>]) -> Vec<usize> {
    predictions.iter().map(|p| argmin(p)).collect()
}

/// Mean over problems of `1 - (s_chosen - s_best)`.
pub fn as_performance(choices: &[usize], truth: &[Vec<f64>]) -> Result<f64> {
    if choices.len() != truth.len() || truth.is_empty() {
        return Err(Error::Usage(format!(
            "{} choices for {} problems",
            choices.len(),
            truth.len()
        )));
    }
    let mut total = 0.0;
    for (&c, row) in choices.iter().zip(truth) {
        let chosen = *row
            .get(c)
            .ok_or_else(|| Error::Usage(format!("choice {c} out of range")))?;
        let best = row.iter().copied().fold(f64::INFINITY, f64::min);
        total += 1.0 - (chosen - best);
    }
    Ok(total / truth.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: String,
    pub n_train: usize,
    pub n_test: usize,
    pub model_as: f64,
    pub dummy_as: f64,
    #[serde(skip)]
    pub importance: Vec<(String, f64)>,
    #[serde(skip)]
    pub model: Option<ForestModel>,
}

/// Train a forest and a dummy on each fold's train rows and score both on
/// its test rows. Folds with fewer than two train rows are skipped.
pub fn evaluate_plan(
    features: &FeatureMatrix,
    perf: &PerformanceMatrix,
    plan: &SplitPlan,
    cfg: &ForestConfig,
) -> Result<Vec<FoldResult>> {
    evaluate_plan_with(features, perf, plan, cfg, false)
}

/// [`evaluate_plan`], optionally keeping each fold's fitted forest.
pub fn evaluate_plan_with(
    features: &FeatureMatrix,
    perf: &PerformanceMatrix,
    plan: &SplitPlan,
    cfg: &ForestConfig,
    keep_models: bool,
) -> Result<Vec<FoldResult>> {
    let mut out = Vec::with_capacity(plan.folds.len());
    for fold in &plan.folds {
        if fold.train.len() < 2 {
            log::warn!(
                "{} fold {}: {} train rows, skipped",
                plan.protocol,
                fold.label,
                fold.train.len()
            );
            continue;
        }
        let model = train_forest(features, perf, &fold.train, cfg)?;
        let dummy = dummy_target(&perf.subset(&fold.train)?)?;
        let x_test = features.rows(&fold.test)?;
        let truth = perf.subset(&fold.test)?.scores;
        let model_choice = select(&model.predict_rows(&x_test));
        let dummy_choice = vec![argmin(&dummy); fold.test.len()];
        out.push(FoldResult {
            fold: fold.label.clone(),
            n_train: fold.train.len(),
            n_test: fold.test.len(),
            model_as: as_performance(&model_choice, &truth)?,
            dummy_as: as_performance(&dummy_choice, &truth)?,
            importance: model.feature_importance(),
            model: keep_models.then_some(model),
        });
    }
    Ok(out)
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub portfolio: String,
    pub feature_group: String,
    pub protocol: String,
    pub fold: String,
    pub model_as: f64,
    pub dummy_as: f64,
}

impl ResultRow {
    pub fn delta(&self) -> f64 {
        self.model_as - self.dummy_as
    }
}

/// Median of model and dummy scores and of their per-fold difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub folds: usize,
    pub model: f64,
    pub dummy: f64,
    pub delta: f64,
}

pub fn summarize<'a>(rows: impl IntoIterator<Item = &'a ResultRow>) -> Option<Summary> {
    let rows: Vec<&ResultRow> = rows.into_iter().collect();
    if rows.is_empty() {
        return None;
    }
    let m: Vec<f64> = rows.iter().map(|r| r.model_as).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.dummy_as).collect();
    let delta: Vec<f64> = rows.iter().map(|r| r.delta()).collect();
    Some(Summary {
        folds: rows.len(),
        model: median(&m),
        dummy: median(&d),
        delta: median(&delta),
    })
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["portfolio", "feature_group", "protocol", "fold", "model_as", "dummy_as"])?;
    for r in rows {
        w.write_record([
            r.portfolio.as_str(),
            &r.feature_group,
            &r.protocol,
            &r.fold,
            &fmt_f64(r.model_as),
            &fmt_f64(r.dummy_as),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// `feature,importance` rows for one fold.
pub fn write_importance_csv(path: &Path, importance: &[(String, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["feature", "importance"])?;
    for (name, v) in importance {
        w.write_record([name.as_str(), &fmt_f64(*v)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurestore::Provenance;
    use crate::splits::{Fold, Protocol};
    use rand::Rng as _;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|k| format!("{prefix}{k}")).collect()
    }

    #[test]
    fn select_and_score() {
        assert_eq!(select(&[vec![0.2, 0.1, 0.9]]), vec![1]);
        assert_eq!(select(&[vec![0.3, 0.3]]), vec![0]);
        let truth = vec![vec![0.1, 0.3]];
        assert!((as_performance(&[1], &truth).unwrap() - 0.8).abs() < 1e-12);
        let rows = vec![vec![0.0, 1.0, 0.5], vec![1.0, 0.0, 0.2]];
        assert_eq!(as_performance(&[0, 1], &rows).unwrap(), 1.0);
        assert_eq!(as_performance(&[1, 0], &rows).unwrap(), 0.0);
    }

    #[test]
    fn constant_targets_predict_constant() {
        let mut rng = keyed_rng_for_test();
        let x: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| rng.random()).collect()).collect();
        let y = vec![vec![0.25, 0.75]; 30];
        let m = ForestModel::fit(&x, &y, &names("f", 4), &names("a", 2), &ForestConfig::default()).unwrap();
        for row in &x {
            assert_eq!(m.predict(row), vec![0.25, 0.75]);
        }
        assert!(m.importance.iter().all(|v| *v == 0.0));
    }

    fn keyed_rng_for_test() -> crate::rng::Rng {
        crate::keyed_rng!("selector-test")
    }

    #[test]
    fn single_unbootstrapped_tree_memorizes() {
        let mut rng = keyed_rng_for_test();
        let x: Vec<Vec<f64>> = (0..10).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
        let y: Vec<Vec<f64>> = (0..10).map(|_| (0..2).map(|_| rng.random()).collect()).collect();
        let cfg = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            ..ForestConfig::default()
        };
        let m = ForestModel::fit(&x, &y, &names("f", 3), &names("a", 2), &cfg).unwrap();
        for (row, target) in x.iter().zip(&y) {
            assert_eq!(&m.predict(row), target);
        }
    }

    #[test]
    fn predictions_stay_in_target_range() {
        let mut rng = keyed_rng_for_test();
        let x: Vec<Vec<f64>> = (0..80).map(|_| (0..5).map(|_| rng.random()).collect()).collect();
        let y: Vec<Vec<f64>> = x.iter().map(|r| vec![r[0] * r[1], 1.0 - r[2]]).collect();
        let m = ForestModel::fit(&x, &y, &names("f", 5), &names("a", 2), &ForestConfig::default()).unwrap();
        for k in 0..2 {
            let col: Vec<f64> = y.iter().map(|r| r[k]).collect();
            let (lo, hi) = crate::stats::min_max(&col);
            for _ in 0..200 {
                let q: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..2.0)).collect();
                let p = m.predict(&q)[k];
                assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn importance_finds_the_signal() {
        let mut rng = keyed_rng_for_test();
        let x: Vec<Vec<f64>> = (0..200).map(|_| (0..6).map(|_| rng.random()).collect()).collect();
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|r| if r[2] > 0.5 { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
            .collect();
        let mut xs = x.clone();
        // feature 5 is constant and can never be used
        xs.iter_mut().for_each(|r| r[5] = 3.0);
        let m = ForestModel::fit(&xs, &y, &names("f", 6), &names("a", 2), &ForestConfig::default()).unwrap();
        assert!(m.importance[2] > 0.9, "{:?}", m.importance);
        assert_eq!(m.importance[5], 0.0);
        assert!((m.importance.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_width_is_rejected() {
        let err = ForestModel::fit(&[vec![], vec![]], &[vec![0.0], vec![1.0]], &[], &names("a", 1), &ForestConfig::default());
        assert!(err.is_err());
    }

    #[test]
    fn plan_evaluation_bookkeeping() {
        let ids = names("p", 40);
        let mut rng = keyed_rng_for_test();
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
        let y: Vec<Vec<f64>> = x.iter().map(|r| vec![r[0], 1.0 - r[0], 0.5]).collect();
        let fm = FeatureMatrix::new("g", ids.clone(), names("f", 3), x, Provenance::Computed).unwrap();
        let pm = PerformanceMatrix::new(ids.clone(), names("a", 3), y).unwrap();
        let plan = SplitPlan {
            protocol: Protocol::Random,
            seed: 0,
            folds: vec![
                Fold { label: "0".into(), train: ids[..30].to_vec(), test: ids[30..].to_vec() },
                Fold { label: "1".into(), train: ids[10..].to_vec(), test: ids[..10].to_vec() },
                Fold { label: "2".into(), train: vec![], test: ids[..5].to_vec() },
            ],
        };
        let res = evaluate_plan(&fm, &pm, &plan, &ForestConfig::default()).unwrap();
        assert_eq!(res.len(), 2);
        for r in &res {
            assert!((0.0..=1.0).contains(&r.model_as) && (0.0..=1.0).contains(&r.dummy_as));
            assert!(r.model_as >= r.dummy_as);
        }
    }

    #[test]
    fn memorizing_model_beats_dummy_on_its_own_fold() {
        let ids = names("p", 25);
        let mut rng = keyed_rng_for_test();
        let x: Vec<Vec<f64>> = (0..25).map(|_| (0..2).map(|_| rng.random()).collect()).collect();
        let y: Vec<Vec<f64>> = (0..25).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
        let fm = FeatureMatrix::new("g", ids.clone(), names("f", 2), x, Provenance::Computed).unwrap();
        let pm = PerformanceMatrix::new(ids.clone(), names("a", 3), y).unwrap();
        let plan = SplitPlan {
            protocol: Protocol::Random,
            seed: 0,
            folds: vec![Fold { label: "0".into(), train: ids.clone(), test: ids.clone() }],
        };
        let cfg = ForestConfig { n_trees: 1, bootstrap: false, ..ForestConfig::default() };
        let r = &evaluate_plan(&fm, &pm, &plan, &cfg).unwrap()[0];
        assert_eq!(r.model_as, 1.0);
        assert!(r.model_as >= r.dummy_as);
    }

    #[test]
    fn dummy_is_perfect_when_sbs_always_wins() {
        let ids = names("p", 6);
        let y: Vec<Vec<f64>> = (0..6).map(|k| vec![0.5 + 0.05 * k as f64, 0.0, 1.0]).collect();
        let x: Vec<Vec<f64>> = (0..6).map(|k| vec![k as f64]).collect();
        let fm = FeatureMatrix::new("g", ids.clone(), names("f", 1), x, Provenance::Computed).unwrap();
        let pm = PerformanceMatrix::new(ids.clone(), names("a", 3), y).unwrap();
        let plan = SplitPlan {
            protocol: Protocol::Random,
            seed: 0,
            folds: vec![Fold { label: "0".into(), train: ids[..3].to_vec(), test: ids[3..].to_vec() }],
        };
        assert_eq!(evaluate_plan(&fm, &pm, &plan, &ForestConfig::default()).unwrap()[0].dummy_as, 1.0);
    }

    #[test]
    fn results_round_trip_and_summary() {
        let rows = vec![
            ResultRow { portfolio: "2DE+2PSO".into(), feature_group: "ela".into(), protocol: "instance".into(), fold: "1".into(), model_as: 0.9, dummy_as: 0.8 },
            ResultRow { portfolio: "2DE+2PSO".into(), feature_group: "ela".into(), protocol: "instance".into(), fold: "2".into(), model_as: 0.7, dummy_as: 0.75 },
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_results_csv(&p, &rows).unwrap();
        assert_eq!(read_results_csv(&p).unwrap(), rows);
        let s = summarize(&rows).unwrap();
        assert_eq!(s.folds, 2);
        assert!((s.delta - 0.025).abs() < 1e-12);
    }

    #[test]
    fn tree_dump_is_json() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![vec![0.0], vec![1.0]];
        let cfg = ForestConfig { n_trees: 2, ..ForestConfig::default() };
        let m = ForestModel::fit(&x, &y, &names("f", 1), &names("a", 1), &cfg).unwrap();
        let back: ForestModel = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
