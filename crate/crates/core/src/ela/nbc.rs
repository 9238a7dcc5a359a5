use crate::ela::{pairwise_distances, Family};
use crate::error::{Error, Result};
use crate::stats;

pub const NAMES: [&str; 9] = [
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
    "nbc.indegree.sd",
    "nbc.indegree.max_frac",
    "nbc.indegree_fitness.cor",
    "nbc.flag",
];

/// Nearest-better structure of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestBetter {
    pub nn_dist: Vec<f64>,
    pub nb_dist: Vec<f64>,
    /// `None` for points with no strictly better neighbour (the global best).
    pub nb: Vec<Option<usize>>,
}

/// Closest point with strictly lower y; distance ties go to the lowest index.
/// Points without a better neighbour take their nearest-neighbour distance.
pub fn nearest_better(x: &[Vec<f64>], y: &[f64]) -> NearestBetter {
    let n = y.len();
    let d = pairwise_distances(x);
    let mut nn_dist = vec![f64::INFINITY; n];
    let mut nb_dist = vec![f64::INFINITY; n];
    let mut nb = vec![None; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if d[i][j] < nn_dist[i] {
                nn_dist[i] = d[i][j];
            }
            if y[j] < y[i] && d[i][j] < nb_dist[i] {
                nb_dist[i] = d[i][j];
                nb[i] = Some(j);
            }
        }
        if nb[i].is_none() {
            nb_dist[i] = nn_dist[i];
        }
    }
    NearestBetter { nn_dist, nb_dist, nb }
}

pub fn ela_nbc(x: &[Vec<f64>], y: &[f64]) -> Result<Family> {
    let n = y.len();
    if n < 3 {
        return Err(Error::Usage(format!("nbc needs n >= 3, got {n}")));
    }
    let s = nearest_better(x, y);
    let mut degenerate = false;
    let ratios: Vec<f64> = s
        .nn_dist
        .iter()
        .zip(&s.nb_dist)
        .map(|(nn, nb)| {
            if *nb > 0.0 {
                nn / nb
            } else {
                degenerate = true;
                1.0
            }
        })
        .collect();
    let mut indegree = vec![0.0; n];
    for j in s.nb.iter().flatten() {
        indegree[*j] += 1.0;
    }
    let mean_ratio = stats::mean(&ratios);
    let coeff_var = if mean_ratio > 0.0 {
        stats::sd(&ratios) / mean_ratio
    } else {
        0.0
    };
    let sd_nn = stats::sd(&s.nn_dist);
    let sd_nb = stats::sd(&s.nb_dist);
    let sd_ratio = if sd_nb > 0.0 { sd_nn / sd_nb } else { 1.0 };
    let max_in = indegree.iter().copied().fold(0.0, f64::max);
    Ok(Family::new(
        &NAMES,
        vec![
            mean_ratio,
            sd_ratio,
            stats::pearson(&s.nn_dist, &s.nb_dist),
            coeff_var,
            stats::spearman(&s.nb_dist, y),
            stats::sd(&indegree),
            max_in / n as f64,
            stats::spearman(&indegree, y),
            f64::from(u8::from(degenerate)),
        ],
    ))
}
