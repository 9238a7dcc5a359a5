use statrs::function::erf::erf;

use crate::tla::persistence::PersistenceDiagram;

pub const DEFAULT_SIGMA: f64 = 0.002;
pub const DEFAULT_RESOLUTION: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceImageVector {
    pub homology_dim: usize,
    /// `(rows, cols)`: `(1, r)` for H0, `(r, r)` otherwise.
    pub shape: (usize, usize),
    pub kernel_sigma: f64,
    pub values: Vec<f64>,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Gaussian mass of `N(center, sigma²)` in each of `bins` equal cells of [0, 1].
fn cell_masses(center: f64, sigma: f64, bins: usize) -> Vec<f64> {
    let edges: Vec<f64> = (0..=bins)
        .map(|k| normal_cdf((k as f64 / bins as f64 - center) / sigma))
        .collect();
    edges.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect()
}

/// Rasterise the finite pairs of a diagram on [0, 1] (H0: death axis only;
/// otherwise persistence rows × birth columns, row-major). Each pair is
/// weighted by its persistence; infinite bars are dropped.
pub fn persistence_image(diagram: &PersistenceDiagram, sigma: f64, resolution: usize) -> PersistenceImageVector {
    let one_d = diagram.homology_dim == 0;
    let shape = if one_d {
        (1, resolution)
    } else {
        (resolution, resolution)
    };
    let mut values = vec![0.0; shape.0 * shape.1];
    for p in diagram.pairs.iter().filter(|p| p.is_finite()) {
        let pers = p.persistence();
        if pers <= 0.0 {
            continue;
        }
        let along_pers = cell_masses(pers, sigma, resolution);
        if one_d {
            for (v, m) in values.iter_mut().zip(&along_pers) {
                *v += pers * m;
            }
        } else {
            let along_birth = cell_masses(p.birth, sigma, resolution);
            for (r, mr) in along_pers.iter().enumerate() {
                if *mr == 0.0 {
                    continue;
                }
                for (c, mc) in along_birth.iter().enumerate() {
                    values[r * resolution + c] += pers * mr * mc;
                }
            }
        }
    }
    PersistenceImageVector {
        homology_dim: diagram.homology_dim,
        shape,
        kernel_sigma: sigma,
        values,
    }
}
