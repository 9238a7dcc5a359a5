use crate::ela::{pairwise_distances, Family};
use crate::error::{Error, Result};
use crate::stats;

pub const FRACTIONS: [f64; 4] = [0.02, 0.05, 0.10, 0.25];

pub fn names() -> Vec<String> {
    let mut out = Vec::new();
    for kind in ["ratio_mean", "ratio_median", "diff_mean", "diff_median"] {
        for f in FRACTIONS {
            out.push(format!("disp.{kind}_{:02}", (f * 100.0).round() as u32));
        }
    }
    out.push("disp.flag".into());
    out
}

fn upper_triangle(d: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(idx.len() * idx.len().saturating_sub(1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            out.push(d[i][j]);
        }
    }
    out
}

/// Indices of the `k` lowest y values (ties broken by index).
pub fn best_indices(y: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

pub fn ela_disp(x: &[Vec<f64>], y: &[f64]) -> Result<Family> {
    let n = y.len();
    let min_frac = FRACTIONS.iter().copied().fold(f64::INFINITY, f64::min);
    if (n as f64 * min_frac).ceil() < 2.0 {
        return Err(Error::Usage(format!("disp needs at least 2 points in the smallest fraction, n = {n}")));
    }
    let d = pairwise_distances(x);
    let all: Vec<usize> = (0..n).collect();
    let dist_all = upper_triangle(&d, &all);
    let (mean_all, median_all) = (stats::mean(&dist_all), stats::median(&dist_all));
    let mut ratio_mean = Vec::new();
    let mut ratio_median = Vec::new();
    let mut diff_mean = Vec::new();
    let mut diff_median = Vec::new();
    let mut degenerate = false;
    for f in FRACTIONS {
        let k = ((f * n as f64).ceil() as usize).clamp(2, n);
        let sub = upper_triangle(&d, &best_indices(y, k));
        let (m, med) = (stats::mean(&sub), stats::median(&sub));
        if mean_all > 0.0 && median_all > 0.0 {
            ratio_mean.push(m / mean_all);
            ratio_median.push(med / median_all);
        } else {
            degenerate = true;
            ratio_mean.push(1.0);
            ratio_median.push(1.0);
        }
        diff_mean.push(m - mean_all);
        diff_median.push(med - median_all);
    }
    let mut values = ratio_mean;
    values.extend(ratio_median);
    values.extend(diff_mean);
    values.extend(diff_median);
    values.push(f64::from(u8::from(degenerate)));
    Ok(Family::from_owned(names(), values))
}
