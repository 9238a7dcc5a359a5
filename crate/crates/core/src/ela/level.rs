use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use crate::ela::Family;
use crate::error::{Error, Result};
use crate::keyed_rng;
use crate::stats;

pub const QUANTILES: [f64; 3] = [0.10, 0.25, 0.50];
pub const FOLDS: usize = 5;

pub fn names() -> Vec<String> {
    let mut out = Vec::new();
    for q in QUANTILES {
        let tag = format!("{:02}", (q * 100.0).round() as u32);
        out.push(format!("ela_level.mmce_lda_{tag}"));
        out.push(format!("ela_level.mmce_qda_{tag}"));
        out.push(format!("ela_level.lda_qda_{tag}"));
    }
    out.push("ela_level.flag".into());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classifier {
    Lda,
    Qda,
}

struct ClassModel {
    mean: DVector<f64>,
    prec: DMatrix<f64>,
    log_det: f64,
    log_prior: f64,
}

fn covariance(rows: &[&Vec<f64>], mean: &DVector<f64>) -> DMatrix<f64> {
    let d = mean.len();
    let mut c = DMatrix::zeros(d, d);
    for r in rows {
        let v = DVector::from_column_slice(r) - mean;
        c += &v * v.transpose();
    }
    c
}

fn regularised_inverse(cov: DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let d = cov.nrows();
    let scale = (cov.trace() / d as f64).max(1e-12);
    let mut reg = cov;
    for i in 0..d {
        reg[(i, i)] += 1e-6 * scale;
    }
    match reg.clone().cholesky() {
        Some(ch) => {
            let log_det = 2.0 * ch.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
            (ch.inverse(), log_det)
        }
        None => (DMatrix::identity(d, d) / scale, d as f64 * scale.ln()),
    }
}

fn fit(x: &[Vec<f64>], labels: &[bool], train: &[usize], kind: Classifier) -> Option<[ClassModel; 2]> {
    let d = x[0].len();
    let groups: [Vec<&Vec<f64>>; 2] = [
        train.iter().filter(|&&i| !labels[i]).map(|&i| &x[i]).collect(),
        train.iter().filter(|&&i| labels[i]).map(|&i| &x[i]).collect(),
    ];
    if groups.iter().any(|g| g.is_empty()) {
        return None;
    }
    let means: Vec<DVector<f64>> = groups
        .iter()
        .map(|g| {
            let mut m = DVector::zeros(d);
            for r in g {
                m += DVector::from_column_slice(r);
            }
            m / g.len() as f64
        })
        .collect();
    let n = train.len() as f64;
    let models = match kind {
        Classifier::Lda => {
            let pooled = (covariance(&groups[0], &means[0]) + covariance(&groups[1], &means[1]))
                / (n - 2.0).max(1.0);
            let (prec, log_det) = regularised_inverse(pooled);
            [0, 1].map(|c| ClassModel {
                mean: means[c].clone(),
                prec: prec.clone(),
                log_det,
                log_prior: (groups[c].len() as f64 / n).ln(),
            })
        }
        Classifier::Qda => [0, 1].map(|c| {
            let denom = (groups[c].len() as f64 - 1.0).max(1.0);
            let (prec, log_det) = regularised_inverse(covariance(&groups[c], &means[c]) / denom);
            ClassModel {
                mean: means[c].clone(),
                prec,
                log_det,
                log_prior: (groups[c].len() as f64 / n).ln(),
            }
        }),
    };
    Some(models)
}

fn predict(models: &[ClassModel; 2], row: &[f64]) -> bool {
    let score = |m: &ClassModel| {
        let v = DVector::from_column_slice(row) - &m.mean;
        -0.5 * (v.transpose() * &m.prec * &v)[(0, 0)] - 0.5 * m.log_det + m.log_prior
    };
    score(&models[1]) > score(&models[0])
}

/// Fold assignment depends only on `n`, never on the data.
pub fn fold_ids(n: usize) -> Vec<usize> {
    let mut rng = keyed_rng!("ela-level-folds", n);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut folds = vec![0; n];
    for (rank, &i) in perm.iter().enumerate() {
        folds[i] = rank * FOLDS / n;
    }
    folds
}

/// Cross-validated misclassification rate; `None` if every fold was skipped.
pub fn cv_error(x: &[Vec<f64>], labels: &[bool], kind: Classifier) -> Option<f64> {
    let n = labels.len();
    let folds = fold_ids(n);
    let mut rates = Vec::new();
    for k in 0..FOLDS {
        let train: Vec<usize> = (0..n).filter(|&i| folds[i] != k).collect();
        let test: Vec<usize> = (0..n).filter(|&i| folds[i] == k).collect();
        if test.is_empty() {
            continue;
        }
        let Some(models) = fit(x, labels, &train, kind) else {
            continue;
        };
        let wrong = test
            .iter()
            .filter(|&&i| predict(&models, &x[i]) != labels[i])
            .count();
        rates.push(wrong as f64 / test.len() as f64);
    }
    (!rates.is_empty()).then(|| stats::mean(&rates))
}

pub fn ela_level(x: &[Vec<f64>], y: &[f64]) -> Result<Family> {
    let n = y.len();
    if n < 20 {
        return Err(Error::Usage(format!("ela_level needs n >= 20, got {n}")));
    }
    let smoothing = 1.0 / n as f64;
    let mut values = Vec::with_capacity(10);
    let mut degenerate = false;
    for q in QUANTILES {
        let thr = stats::quantile(y, q);
        let labels: Vec<bool> = y.iter().map(|v| *v <= thr).collect();
        let lda = cv_error(x, &labels, Classifier::Lda);
        let qda = cv_error(x, &labels, Classifier::Qda);
        degenerate |= lda.is_none() || qda.is_none();
        let lda = lda.unwrap_or(0.5);
        let qda = qda.unwrap_or(0.5);
        values.push(lda);
        values.push(qda);
        values.push((lda + smoothing) / (qda + smoothing));
    }
    values.push(f64::from(u8::from(degenerate)));
    Ok(Family::from_owned(names(), values))
}
