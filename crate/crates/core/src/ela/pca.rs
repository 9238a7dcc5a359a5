use nalgebra::{DMatrix, SymmetricEigen};

use crate::ela::Family;
use crate::error::{Error, Result};
use crate::stats;

pub const NAMES: [&str; 9] = [
    "pca.expl_var.cov_x",
    "pca.expl_var.cor_x",
    "pca.expl_var.cov_init",
    "pca.expl_var.cor_init",
    "pca.expl_var_pc1.cov_x",
    "pca.expl_var_pc1.cor_x",
    "pca.expl_var_pc1.cov_init",
    "pca.expl_var_pc1.cor_init",
    "pca.flag",
];

pub const THRESHOLD: f64 = 0.9;

/// Explained-variance shares of the covariance (or correlation) matrix of
/// `cols`, largest first.
pub fn explained_variance(cols: &[Vec<f64>], correlation: bool) -> Vec<f64> {
    let p = cols.len();
    if p == 0 {
        return Vec::new();
    }
    let means: Vec<f64> = cols.iter().map(|c| stats::mean(c)).collect();
    let sds: Vec<f64> = cols.iter().map(|c| stats::sd(c)).collect();
    let n = cols[0].len();
    let m = DMatrix::from_fn(p, p, |i, j| {
        let cov = (0..n)
            .map(|k| (cols[i][k] - means[i]) * (cols[j][k] - means[j]))
            .sum::<f64>()
            / (n as f64 - 1.0);
        if correlation {
            cov / (sds[i] * sds[j])
        } else {
            cov
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = ev.iter().sum();
    if total <= 0.0 {
        return vec![0.0; p];
    }
    ev.iter().map(|v| v / total).collect()
}

/// Number of leading components needed to reach `THRESHOLD` of the variance.
pub fn components_for(shares: &[f64]) -> usize {
    let mut acc = 0.0;
    for (i, s) in shares.iter().enumerate() {
        acc += s;
        if acc >= THRESHOLD - 1e-12 {
            return i + 1;
        }
    }
    shares.len()
}

pub fn ela_pca(x: &[Vec<f64>], y: &[f64]) -> Result<Family> {
    let n = y.len();
    let d = x.first().map_or(0, Vec::len);
    if n <= d {
        return Err(Error::Usage(format!("pca needs n > dim, got n = {n}, dim = {d}")));
    }
    let mut cols: Vec<Vec<f64>> = (0..d).map(|k| x.iter().map(|r| r[k]).collect()).collect();
    let mut dropped = false;
    let keep = |c: &Vec<f64>| {
        let (lo, hi) = stats::min_max(c);
        hi > lo
    };
    let before = cols.len();
    cols.retain(keep);
    dropped |= cols.len() != before;
    let mut init = cols.clone();
    if keep(&y.to_vec()) {
        init.push(y.to_vec());
    } else {
        dropped = true;
    }

    let mut values = Vec::with_capacity(9);
    let mut firsts = Vec::with_capacity(4);
    for (set, corr) in [(&cols, false), (&cols, true), (&init, false), (&init, true)] {
        let shares = explained_variance(set, corr);
        if shares.is_empty() {
            values.push(1.0);
            firsts.push(1.0);
        } else {
            values.push(components_for(&shares) as f64 / shares.len() as f64);
            firsts.push(shares[0]);
        }
    }
    values.extend(firsts);
    values.push(f64::from(u8::from(dropped)));
    Ok(Family::new(&NAMES, values))
}
