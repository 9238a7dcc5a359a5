use crate::ela::Family;
use crate::error::{Error, Result};
use crate::stats::euclid;

pub const NAMES: [&str; 6] = [
    "ic.h_max",
    "ic.eps_s",
    "ic.eps_max",
    "ic.eps_ratio",
    "ic.m0",
    "ic.flag",
];

pub const EPS_LO: f64 = 1e-5;
pub const EPS_HI: f64 = 1e2;
pub const EPS_POINTS: usize = 30;
/// Entropy level below which the landscape counts as settled.
pub const SETTLING: f64 = 0.05;
/// Partial-information ratio defining `eps_ratio`.
pub const RATIO: f64 = 0.5;

pub fn eps_grid() -> Vec<f64> {
    let (a, b) = (EPS_LO.log10(), EPS_HI.log10());
    (0..EPS_POINTS)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (EPS_POINTS - 1) as f64))
        .collect()
}

/// Greedy nearest-neighbour tour through all points, starting at point 0.
pub fn nn_tour(x: &[Vec<f64>]) -> Vec<usize> {
    let n = x.len();
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut cur = 0;
    visited[0] = true;
    tour.push(0);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in 0..n {
            if !visited[j] {
                let d = euclid(&x[cur], &x[j]);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        visited[best] = true;
        tour.push(best);
        cur = best;
    }
    tour
}

/// Slopes `Δy / ‖Δx‖` along the tour. Coincident points give slope 0.
pub fn tour_slopes(x: &[Vec<f64>], y: &[f64], tour: &[usize]) -> Vec<f64> {
    tour.windows(2)
        .map(|w| {
            let dx = euclid(&x[w[0]], &x[w[1]]);
            if dx > 0.0 {
                (y[w[1]] - y[w[0]]) / dx
            } else {
                0.0
            }
        })
        .collect()
}

pub fn symbols(slopes: &[f64], eps: f64) -> Vec<i8> {
    slopes
        .iter()
        .map(|&s| {
            if s > eps {
                1
            } else if s < -eps {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Entropy (base 6) of consecutive pairs of differing symbols.
pub fn information_content(sym: &[i8]) -> f64 {
    if sym.len() < 2 {
        return 0.0;
    }
    let pairs = (sym.len() - 1) as f64;
    let mut counts = [[0usize; 3]; 3];
    for w in sym.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / pairs;
                h -= p * p.log(6.0);
            }
        }
    }
    h
}

/// Length of the alternating subsequence of non-zero symbols, over `len`.
pub fn partial_information(sym: &[i8]) -> f64 {
    if sym.is_empty() {
        return 0.0;
    }
    let mut count = 0usize;
    let mut last = 0i8;
    for &s in sym {
        if s != 0 && s != last {
            count += 1;
            last = s;
        }
    }
    count as f64 / sym.len() as f64
}

pub fn ela_ic(x: &[Vec<f64>], y: &[f64]) -> Result<Family> {
    if y.len() < 3 {
        return Err(Error::Usage(format!("ic needs n >= 3, got {}", y.len())));
    }
    let tour = nn_tour(x);
    let slopes = tour_slopes(x, y, &tour);
    let m0 = partial_information(&symbols(&slopes, 0.0));
    if slopes.iter().all(|s| *s == 0.0) {
        return Ok(Family::new(&NAMES, vec![0.0, 0.0, 0.0, 0.0, m0, 1.0]));
    }
    let grid = eps_grid();
    let h: Vec<f64> = grid
        .iter()
        .map(|&e| information_content(&symbols(&slopes, e)))
        .collect();
    let m: Vec<f64> = grid
        .iter()
        .map(|&e| partial_information(&symbols(&slopes, e)))
        .collect();
    let (imax, hmax) = h
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let eps_s = grid
        .iter()
        .zip(&h)
        .filter(|(_, &v)| v >= SETTLING)
        .map(|(&e, _)| e)
        .next_back()
        .unwrap_or(0.0);
    let eps_ratio = grid
        .iter()
        .zip(&m)
        .filter(|(_, &v)| m0 > 0.0 && v >= RATIO * m0)
        .map(|(&e, _)| e)
        .next_back()
        .unwrap_or(0.0);
    Ok(Family::new(&NAMES, vec![hmax, eps_s, grid[imax], eps_ratio, m0, 0.0]))
}
