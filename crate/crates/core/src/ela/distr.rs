use crate::ela::Family;
use crate::error::{Error, Result};
use crate::stats;

pub const NAMES: [&str; 4] = [
    "ela_distr.skewness",
    "ela_distr.kurtosis",
    "ela_distr.number_of_peaks",
    "ela_distr.flag",
];

/// Fraction of the maximum density a local maximum must exceed to count as a peak.
const PEAK_FLOOR: f64 = 1e-3;
const KDE_GRID: usize = 512;

pub fn ela_distr(y: &[f64]) -> Result<Family> {
    if y.len() < 4 {
        return Err(Error::Usage(format!("ela_distr needs n >= 4, got {}", y.len())));
    }
    let (skew, kurt) = match (stats::skewness(y), stats::excess_kurtosis(y)) {
        (Some(s), Some(k)) => (s, k),
        _ => return Ok(Family::new(&NAMES, vec![0.0, 0.0, 1.0, 1.0])),
    };
    let peaks = kde_peaks(y) as f64;
    Ok(Family::new(&NAMES, vec![skew, kurt, peaks, 0.0]))
}

/// Silverman's rule-of-thumb bandwidth.
pub fn silverman_bandwidth(y: &[f64]) -> f64 {
    let sd = stats::sd(y);
    let iqr = stats::quantile(y, 0.75) - stats::quantile(y, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * (y.len() as f64).powf(-0.2)
}

/// Strict local maxima of a Gaussian KDE above `PEAK_FLOOR` of the global max.
pub fn kde_peaks(y: &[f64]) -> usize {
    let h = silverman_bandwidth(y);
    if !(h > 0.0) {
        return 1;
    }
    let (lo, hi) = stats::min_max(y);
    let (lo, hi) = (lo - 3.0 * h, hi + 3.0 * h);
    let step = (hi - lo) / (KDE_GRID - 1) as f64;
    let dens: Vec<f64> = (0..KDE_GRID)
        .map(|g| {
            let t = lo + g as f64 * step;
            y.iter().map(|v| (-0.5 * ((t - v) / h).powi(2)).exp()).sum::<f64>()
        })
        .collect();
    let max = dens.iter().copied().fold(0.0, f64::max);
    (1..KDE_GRID - 1)
        .filter(|&g| dens[g] > dens[g - 1] && dens[g] > dens[g + 1] && dens[g] > PEAK_FLOOR * max)
        .count()
        .max(1)
}
