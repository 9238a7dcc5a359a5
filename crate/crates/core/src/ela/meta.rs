use nalgebra::{DMatrix, DVector};

use crate::ela::Family;
use crate::error::{Error, Result};

pub const NAMES: [&str; 10] = [
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_simple.intercept",
    "ela_meta.lin_simple.coef.min",
    "ela_meta.lin_simple.coef.max",
    "ela_meta.lin_simple.coef.max_by_min",
    "ela_meta.lin_w_interact.adj_r2",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_simple.cond",
    "ela_meta.quad_w_interact.adj_r2",
    "ela_meta.flag",
];

pub const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Terms {
    Linear,
    LinearInteract,
    QuadSimple,
    QuadFull,
}

fn design(x: &[Vec<f64>], terms: Terms) -> DMatrix<f64> {
    let d = x[0].len();
    let cols = |row: &[f64]| -> Vec<f64> {
        let mut c = vec![1.0];
        c.extend_from_slice(row);
        match terms {
            Terms::Linear => {}
            Terms::QuadSimple => c.extend(row.iter().map(|v| v * v)),
            Terms::LinearInteract => {
                for i in 0..d {
                    for j in i + 1..d {
                        c.push(row[i] * row[j]);
                    }
                }
            }
            Terms::QuadFull => {
                c.extend(row.iter().map(|v| v * v));
                for i in 0..d {
                    for j in i + 1..d {
                        c.push(row[i] * row[j]);
                    }
                }
            }
        }
        c
    };
    let rows: Vec<Vec<f64>> = x.iter().map(|r| cols(r)).collect();
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

pub(crate) struct Fit {
    pub coef: Vec<f64>,
    pub adj_r2: f64,
    pub ridge: bool,
}

/// Least squares with a ridge fallback for rank-deficient designs.
pub(crate) fn least_squares(a: &DMatrix<f64>, y: &[f64]) -> Fit {
    let n = a.nrows();
    let p = a.ncols();
    let yv = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > smax * 1e-10)
        .count();
    let (beta, ridge) = if rank == p && n >= p {
        (svd.solve(&yv, 0.0).expect("svd solve with u and v"), false)
    } else {
        let ata = a.transpose() * a + DMatrix::identity(p, p) * RIDGE;
        let aty = a.transpose() * &yv;
        let beta = ata
            .clone()
            .cholesky()
            .map(|c| c.solve(&aty))
            .unwrap_or_else(|| DVector::zeros(p));
        (beta, true)
    };
    let resid = &yv - a * &beta;
    let mean = yv.mean();
    let ss_tot: f64 = yv.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = resid.iter().map(|r| r * r).sum();
    let predictors = (p - 1) as f64;
    let adj_r2 = if ss_tot <= 0.0 {
        0.0
    } else {
        let r2 = 1.0 - ss_res / ss_tot;
        let dof = n as f64 - predictors - 1.0;
        if dof > 0.0 {
            1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof
        } else {
            r2
        }
    };
    Fit {
        coef: beta.iter().copied().collect(),
        adj_r2,
        ridge,
    }
}

fn ratio_or_one(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

pub fn ela_meta(x: &[Vec<f64>], y: &[f64]) -> Result<Family> {
    let n = y.len();
    let d = x.first().map_or(0, Vec::len);
    if d == 0 || n <= d * (d + 3) / 2 + 1 {
        return Err(Error::Usage(format!(
            "ela_meta needs n > {} for dim {d}, got {n}",
            d * (d + 3) / 2 + 1
        )));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Ok(Family::new(
            &NAMES,
            vec![0.0, y[0], 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
        ));
    }
    let lin = least_squares(&design(x, Terms::Linear), y);
    let lin_i = if d > 1 {
        least_squares(&design(x, Terms::LinearInteract), y)
    } else {
        least_squares(&design(x, Terms::Linear), y)
    };
    let quad = least_squares(&design(x, Terms::QuadSimple), y);
    let quad_full = least_squares(&design(x, Terms::QuadFull), y);

    let abs_lin: Vec<f64> = lin.coef[1..].iter().map(|c| c.abs()).collect();
    let cmin = abs_lin.iter().copied().fold(f64::INFINITY, f64::min);
    let cmax = abs_lin.iter().copied().fold(0.0, f64::max);
    let abs_quad: Vec<f64> = quad.coef[1 + d..].iter().map(|c| c.abs()).collect();
    let qmin = abs_quad.iter().copied().fold(f64::INFINITY, f64::min);
    let qmax = abs_quad.iter().copied().fold(0.0, f64::max);
    let flag = [&lin, &lin_i, &quad, &quad_full].iter().any(|f| f.ridge);

    Ok(Family::new(
        &NAMES,
        vec![
            lin.adj_r2,
            lin.coef[0],
            cmin,
            cmax,
            ratio_or_one(cmax, cmin),
            lin_i.adj_r2,
            quad.adj_r2,
            ratio_or_one(qmax, qmin),
            quad_full.adj_r2,
            f64::from(u8::from(flag)),
        ],
    ))
}
