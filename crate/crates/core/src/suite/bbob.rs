//! The 24 noiseless BBOB function classes.
//!
//! Definitions follow the standard noiseless benchmark documentation. Instance
//! parameters (optimum location, optimal value, rotations, peak layouts) are
//! drawn from a stream keyed by `(class_id, instance_id, dim)`; rotations are
//! Gram–Schmidt orthonormalised Gaussian matrices. Values are therefore
//! structurally faithful but not bit-identical to the reference C generator.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyed_rng;
use crate::rng::Rng;

pub const NUM_CLASSES: u8 = 24;
pub const LOWER: f64 = -5.0;
pub const UPPER: f64 = 5.0;

const CLASS_NAMES: [&str; 24] = [
    "sphere",
    "ellipsoid_separable",
    "rastrigin_separable",
    "buche_rastrigin",
    "linear_slope",
    "attractive_sector",
    "step_ellipsoid",
    "rosenbrock",
    "rosenbrock_rotated",
    "ellipsoid",
    "discus",
    "bent_cigar",
    "sharp_ridge",
    "different_powers",
    "rastrigin",
    "weierstrass",
    "schaffers_f7",
    "schaffers_f7_ill",
    "griewank_rosenbrock",
    "schwefel",
    "gallagher_101",
    "gallagher_21",
    "katsuura",
    "lunacek",
];

pub fn class_name(class_id: u8) -> &'static str {
    CLASS_NAMES
        .get(usize::from(class_id).wrapping_sub(1))
        .copied()
        .unwrap_or("unknown")
}

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    #[cfg(test)]
    fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Mat { n, a }
    }

    /// Random orthogonal matrix: Gaussian entries, rows orthonormalised.
    fn rotation(n: usize, rng: &mut Rng) -> Self {
        loop {
            let mut a: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
            let mut ok = true;
            for i in 0..n {
                for j in 0..i {
                    let dot: f64 = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum();
                    for k in 0..n {
                        a[i * n + k] -= dot * a[j * n + k];
                    }
                }
                let norm = (0..n).map(|k| a[i * n + k].powi(2)).sum::<f64>().sqrt();
                if norm < 1e-10 {
                    ok = false;
                    break;
                }
                for k in 0..n {
                    a[i * n + k] /= norm;
                }
            }
            if ok {
                return Mat { n, a };
            }
        }
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.a[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(r, v)| r * v)
                    .sum()
            })
            .collect()
    }

    fn mul_t(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.a[i * n + j] * x[i]).sum())
            .collect()
    }
}

/// Parameters of one peak of the Gallagher functions.
#[derive(Debug, Clone, PartialEq)]
struct Peak {
    center: Vec<f64>,
    weight: f64,
    /// Diagonal of the (already permuted and normalised) conditioning matrix.
    scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct Params {
    r: Mat,
    q: Mat,
    signs: Vec<f64>,
    peaks: Vec<Peak>,
    /// Multiplier of the Rosenbrock-type functions.
    rosen_c: f64,
}

/// One base problem instance: a deterministic scalar field on `[-5, 5]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseInstance {
    pub class_id: u8,
    pub instance_id: u32,
    pub dim: usize,
    pub x_opt: Vec<f64>,
    pub f_opt: f64,
    pub transform_seed: u64,
    /// Translation applied on top of the generated instance (zero by default).
    translation: Vec<f64>,
    params: Params,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BaseInstanceMeta {
    pub class_id: u8,
    pub instance_id: u32,
    pub dim: usize,
    pub x_opt: Vec<f64>,
    pub f_opt: f64,
    pub transform_seed: u64,
}

fn ratio(i: usize, d: usize) -> f64 {
    if d <= 1 {
        0.0
    } else {
        i as f64 / (d - 1) as f64
    }
}

fn lambda(alpha: f64, d: usize) -> Vec<f64> {
    (0..d).map(|i| alpha.powf(0.5 * ratio(i, d))).collect()
}

fn t_osz_scalar(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let xh = x.abs().ln();
    let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    x.signum() * (xh + 0.049 * ((c1 * xh).sin() + (c2 * xh).sin())).exp()
}

fn t_osz(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| t_osz_scalar(v)).collect()
}

fn t_asy(x: &[f64], beta: f64) -> Vec<f64> {
    let d = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 {
                v.powf(1.0 + beta * ratio(i, d) * v.sqrt())
            } else {
                v
            }
        })
        .collect()
}

fn scale(x: &[f64], s: &[f64]) -> Vec<f64> {
    x.iter().zip(s).map(|(a, b)| a * b).collect()
}

fn f_pen(x: &[f64]) -> f64 {
    x.iter().map(|v| (v.abs() - 5.0).max(0.0).powi(2)).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn rastrigin_core(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    10.0 * (d - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
        + z.iter().map(|v| v * v).sum::<f64>()
}

const SCHWEFEL_OPT: f64 = 4.209_687_462_275_036;
const LUNACEK_MU0: f64 = 2.5;

impl BaseInstance {
    /// Build instance `instance_id` of class `class_id` in dimension `dim`.
    pub fn new(class_id: u8, instance_id: u32, dim: usize) -> Result<Self> {
        if !(1..=NUM_CLASSES).contains(&class_id) {
            return Err(Error::Usage(format!("class id {class_id} outside 1..=24")));
        }
        if dim == 0 {
            return Err(Error::Usage("dimension must be at least 1".into()));
        }
        if dim < 2 && matches!(class_id, 8 | 9 | 17 | 18 | 19) {
            return Err(Error::Usage(format!(
                "class {class_id} ({}) needs dim >= 2",
                class_name(class_id)
            )));
        }
        let mut rng = keyed_rng!("bbob", u64::from(class_id), u64::from(instance_id), dim);
        let transform_seed: u64 = rng.random();
        let d = dim;

        let mut x_opt: Vec<f64> = (0..d)
            .map(|_| {
                let v = 8.0 * (rng.random::<f64>() * 1e4).floor() / 1e4 - 4.0;
                if v == 0.0 {
                    -1e-5
                } else {
                    v
                }
            })
            .collect();
        let f_opt = {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            let raw = if b == 0.0 { 0.0 } else { 100.0 * a / b };
            ((raw * 100.0).round() / 100.0).clamp(-1000.0, 1000.0)
        };
        let signs: Vec<f64> = (0..d)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let r = Mat::rotation(d, &mut rng);
        let q = Mat::rotation(d, &mut rng);
        let rosen_c = 1f64.max((d as f64).sqrt() / 8.0);

        let mut peaks = Vec::new();
        match class_id {
            4 => {
                for (i, v) in x_opt.iter_mut().enumerate() {
                    if i % 2 == 0 {
                        *v = v.abs();
                    }
                }
            }
            5 => x_opt = signs.iter().map(|s| 5.0 * s).collect(),
            8 => x_opt.iter_mut().for_each(|v| *v *= 0.75),
            9 | 19 => x_opt = r.mul_t(&vec![0.5 / rosen_c; d]),
            20 => x_opt = signs.iter().map(|s| s * SCHWEFEL_OPT / 2.0).collect(),
            21 | 22 => {
                let (n, opt_box, other_box, first_alpha, wspan) = if class_id == 21 {
                    (101usize, 4.0, 5.0, 1000.0, 99.0)
                } else {
                    (21usize, 3.92, 4.9, 1.0e6, 19.0)
                };
                let mut alphas: Vec<f64> = (0..n - 1)
                    .map(|j| 1000f64.powf(2.0 * j as f64 / (n - 2) as f64))
                    .collect();
                shuffle(&mut alphas, &mut rng);
                for i in 0..n {
                    let half = if i == 0 { opt_box } else { other_box };
                    let center: Vec<f64> =
                        (0..d).map(|_| rng.random_range(-half..=half)).collect();
                    let alpha = if i == 0 { first_alpha } else { alphas[i - 1] };
                    let mut diag = lambda(alpha, d);
                    shuffle(&mut diag, &mut rng);
                    let norm = alpha.powf(0.25);
                    let scales = diag.iter().map(|v| v / norm).collect();
                    let weight = if i == 0 {
                        10.0
                    } else {
                        1.1 + 8.0 * (i - 1) as f64 / wspan
                    };
                    peaks.push(Peak {
                        center,
                        weight,
                        scales,
                    });
                }
                x_opt = peaks[0].center.clone();
            }
            24 => x_opt = signs.iter().map(|s| s * LUNACEK_MU0 / 2.0).collect(),
            _ => {}
        }

        Ok(BaseInstance {
            class_id,
            instance_id,
            dim,
            x_opt,
            f_opt,
            transform_seed,
            translation: vec![0.0; d],
            params: Params {
                r,
                q,
                signs,
                peaks,
                rosen_c,
            },
        })
    }

    /// Same landscape moved by `delta`: `g(x) = f(x - delta)`.
    pub fn translated(&self, delta: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.translation[i] += delta[i];
            out.x_opt[i] += delta[i];
        }
        out
    }

    /// Same landscape moved so that its optimum sits at `target`.
    pub fn with_optimum_at(&self, target: &[f64]) -> Self {
        let delta = sub(target, &self.x_opt);
        self.translated(&delta)
    }

    /// Same landscape with `c` added to every objective value.
    pub fn with_value_offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.f_opt += c;
        out
    }

    pub fn name(&self) -> &'static str {
        class_name(self.class_id)
    }

    pub fn meta(&self) -> BaseInstanceMeta {
        BaseInstanceMeta {
            class_id: self.class_id,
            instance_id: self.instance_id,
            dim: self.dim,
            x_opt: self.x_opt.clone(),
            f_opt: self.f_opt,
            transform_seed: self.transform_seed,
        }
    }

    /// Objective value at `x`. Points outside the box are allowed; the
    /// classes with boundary penalties apply them.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Usage(format!(
                "point has {} coordinates, instance dimension is {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let xs = sub(x, &self.translation);
        self.raw(&xs) + self.f_opt
    }

    /// Generated instance without the optimal value offset.
    fn raw(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        let p = &self.params;
        let xopt: Vec<f64> = sub(&self.x_opt, &self.translation);
        let shifted = sub(x, &xopt);
        match self.class_id {
            1 => shifted.iter().map(|v| v * v).sum(),
            2 => {
                let z = t_osz(&shifted);
                z.iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(6.0 * ratio(i, d)) * v * v)
                    .sum()
            }
            3 => {
                let z = scale(&t_asy(&t_osz(&shifted), 0.2), &lambda(10.0, d));
                rastrigin_core(&z)
            }
            4 => {
                let z: Vec<f64> = t_osz(&shifted)
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let s = 10f64.powf(0.5 * ratio(i, d));
                        if v > 0.0 && i % 2 == 0 {
                            10.0 * s * v
                        } else {
                            s * v
                        }
                    })
                    .collect();
                rastrigin_core(&z) + 100.0 * f_pen(x)
            }
            5 => (0..d)
                .map(|i| {
                    let s = xopt[i].signum() * 10f64.powf(ratio(i, d));
                    let z = if xopt[i] * x[i] < 25.0 { x[i] } else { xopt[i] };
                    5.0 * s.abs() - s * z
                })
                .sum(),
            6 => {
                let z = p.q.mul(&scale(&p.r.mul(&shifted), &lambda(10.0, d)));
                let s: f64 = z
                    .iter()
                    .zip(&xopt)
                    .map(|(zi, oi)| {
                        let w = if zi * oi > 0.0 { 100.0 } else { 1.0 };
                        (w * zi).powi(2)
                    })
                    .sum();
                t_osz_scalar(s).powf(0.9)
            }
            7 => {
                let zh = scale(&p.r.mul(&shifted), &lambda(10.0, d));
                let zt: Vec<f64> = zh
                    .iter()
                    .map(|&v| {
                        if v.abs() > 0.5 {
                            (0.5 + v).floor()
                        } else {
                            (0.5 + 10.0 * v).floor() / 10.0
                        }
                    })
                    .collect();
                let z = p.q.mul(&zt);
                let s: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(2.0 * ratio(i, d)) * v * v)
                    .sum();
                0.1 * (zh[0].abs() / 1e4).max(s) + f_pen(x)
            }
            8 => {
                let z: Vec<f64> = shifted.iter().map(|v| p.rosen_c * v + 1.0).collect();
                rosenbrock(&z)
            }
            9 => {
                let z: Vec<f64> = p.r.mul(x).iter().map(|v| p.rosen_c * v + 0.5).collect();
                rosenbrock(&z)
            }
            10 => {
                let z = t_osz(&p.r.mul(&shifted));
                z.iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(6.0 * ratio(i, d)) * v * v)
                    .sum()
            }
            11 => {
                let z = t_osz(&p.r.mul(&shifted));
                1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
            }
            12 => {
                let z = p.r.mul(&t_asy(&p.r.mul(&shifted), 0.5));
                z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
            }
            13 => {
                let z = p.q.mul(&scale(&p.r.mul(&shifted), &lambda(10.0, d)));
                z[0] * z[0] + 100.0 * z[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            14 => {
                let z = p.r.mul(&shifted);
                z.iter()
                    .enumerate()
                    .map(|(i, v)| v.abs().powf(2.0 + 4.0 * ratio(i, d)))
                    .sum::<f64>()
                    .sqrt()
            }
            15 => {
                let inner = t_asy(&t_osz(&p.r.mul(&shifted)), 0.2);
                let z = p.r.mul(&scale(&p.q.mul(&inner), &lambda(10.0, d)));
                rastrigin_core(&z)
            }
            16 => {
                let inner = p.q.mul(&t_osz(&p.r.mul(&shifted)));
                let z = p.r.mul(&scale(&inner, &lambda(0.01, d)));
                let f0: f64 = (0..12)
                    .map(|k| 0.5f64.powi(k) * (PI * 3f64.powi(k)).cos())
                    .sum();
                let s: f64 = z
                    .iter()
                    .map(|zi| {
                        (0..12)
                            .map(|k| {
                                0.5f64.powi(k) * (2.0 * PI * 3f64.powi(k) * (zi + 0.5)).cos()
                            })
                            .sum::<f64>()
                    })
                    .sum();
                10.0 * (s / d as f64 - f0).powi(3) + 10.0 / d as f64 * f_pen(x)
            }
            17 | 18 => {
                let cond = if self.class_id == 17 { 10.0 } else { 1000.0 };
                let z = scale(
                    &p.q.mul(&t_asy(&p.r.mul(&shifted), 0.5)),
                    &lambda(cond, d),
                );
                let m: f64 = (0..d - 1)
                    .map(|i| {
                        let s = (z[i] * z[i] + z[i + 1] * z[i + 1]).sqrt();
                        s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2)
                    })
                    .sum::<f64>()
                    / (d - 1) as f64;
                m * m + 10.0 * f_pen(x)
            }
            19 => {
                let z: Vec<f64> = p.r.mul(x).iter().map(|v| p.rosen_c * v + 0.5).collect();
                let s: f64 = (0..d - 1)
                    .map(|i| {
                        let si = 100.0 * (z[i] * z[i] - z[i + 1]).powi(2) + (z[i] - 1.0).powi(2);
                        si / 4000.0 - si.cos()
                    })
                    .sum();
                10.0 * s / (d - 1) as f64 + 10.0
            }
            20 => {
                let two_opt: Vec<f64> = xopt.iter().map(|v| 2.0 * v.abs()).collect();
                let xh: Vec<f64> = x.iter().zip(&p.signs).map(|(v, s)| 2.0 * s * v).collect();
                let mut zh = xh.clone();
                for i in 1..d {
                    zh[i] = xh[i] + 0.25 * (xh[i - 1] - two_opt[i - 1]);
                }
                let lam = lambda(10.0, d);
                let z: Vec<f64> = (0..d)
                    .map(|i| 100.0 * (lam[i] * (zh[i] - two_opt[i]) + two_opt[i]))
                    .collect();
                let s: f64 = z.iter().map(|v| v * v.abs().sqrt().sin()).sum();
                let zp: Vec<f64> = z.iter().map(|v| v / 100.0).collect();
                -s / (100.0 * d as f64) + 4.189_828_872_724_339 + 100.0 * f_pen(&zp)
            }
            21 | 22 => {
                let best = p
                    .peaks
                    .iter()
                    .map(|pk| {
                        let rz = p.r.mul(&sub(x, &pk.center));
                        let quad: f64 = rz.iter().zip(&pk.scales).map(|(v, s)| s * v * v).sum();
                        pk.weight * (-quad / (2.0 * d as f64)).exp()
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                t_osz_scalar(10.0 - best).powi(2) + f_pen(x)
            }
            23 => {
                let z = p.q.mul(&scale(&p.r.mul(&shifted), &lambda(100.0, d)));
                let dd = d as f64;
                let expo = 10.0 / dd.powf(1.2);
                let prod: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, zi)| {
                        let s: f64 = (1..=32)
                            .map(|j| {
                                let t = 2f64.powi(j) * zi;
                                (t - t.round()).abs() / 2f64.powi(j)
                            })
                            .sum();
                        (1.0 + (i + 1) as f64 * s).powf(expo)
                    })
                    .product();
                10.0 / (dd * dd) * prod - 10.0 / (dd * dd) + f_pen(x)
            }
            24 => {
                let dd = d as f64;
                let s = 1.0 - 1.0 / (2.0 * (dd + 20.0).sqrt() - 8.2);
                let mu1 = -((LUNACEK_MU0 * LUNACEK_MU0 - 1.0) / s).sqrt();
                let xh: Vec<f64> = x
                    .iter()
                    .zip(&xopt)
                    .map(|(v, o)| 2.0 * o.signum() * v)
                    .collect();
                let a: f64 = xh.iter().map(|v| (v - LUNACEK_MU0).powi(2)).sum();
                let b: f64 = dd + s * xh.iter().map(|v| (v - mu1).powi(2)).sum::<f64>();
                let centred: Vec<f64> = xh.iter().map(|v| v - LUNACEK_MU0).collect();
                let z = p.q.mul(&scale(&p.r.mul(&centred), &lambda(100.0, d)));
                let osc = 10.0 * (dd - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>());
                a.min(b) + osc + 1e4 * f_pen(x)
            }
            _ => unreachable!("class id validated at construction"),
        }
    }
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn shuffle<T>(v: &mut [T], rng: &mut Rng) {
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_value_holds_for_every_class() {
        for dim in [2usize, 3, 5] {
            for class in 1..=NUM_CLASSES {
                for inst in 1..=5 {
                    let b = BaseInstance::new(class, inst, dim).unwrap();
                    let v = b.eval(&b.x_opt).unwrap();
                    assert!(
                        (v - b.f_opt).abs() <= 1e-9,
                        "class {class} inst {inst} dim {dim}: {v} vs {}",
                        b.f_opt
                    );
                    assert!(b.x_opt.iter().all(|v| v.abs() <= 5.0));
                }
            }
        }
    }

    #[test]
    fn optimum_is_not_beaten_by_random_points() {
        use rand::Rng as _;
        let mut rng = keyed_rng!("test-bbob");
        for class in 1..=NUM_CLASSES {
            let b = BaseInstance::new(class, 1, 2).unwrap();
            for _ in 0..2000 {
                let x: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..=5.0)).collect();
                let v = b.eval(&x).unwrap();
                assert!(v >= b.f_opt - 1e-9, "class {class}: {v} < {}", b.f_opt);
            }
        }
    }

    #[test]
    fn sphere_unit_step() {
        let b = BaseInstance::new(1, 3, 4).unwrap();
        let mut x = b.x_opt.clone();
        x[2] += 1.0;
        assert!((b.eval(&x).unwrap() - (b.f_opt + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_bitwise_stable() {
        let a = BaseInstance::new(16, 2, 3).unwrap();
        let b = BaseInstance::new(16, 2, 3).unwrap();
        let x = [0.3, -1.7, 2.2];
        assert_eq!(a.eval(&x).unwrap().to_bits(), b.eval(&x).unwrap().to_bits());
        assert_eq!(a.eval(&x).unwrap().to_bits(), a.eval(&x).unwrap().to_bits());
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let b = BaseInstance::new(1, 1, 2).unwrap();
        assert!(matches!(b.eval(&[0.0; 3]), Err(Error::Usage(_))));
        assert!(BaseInstance::new(25, 1, 2).is_err());
        assert!(BaseInstance::new(8, 1, 1).is_err());
    }

    #[test]
    fn rotations_are_orthonormal() {
        let mut rng = keyed_rng!("rot");
        let m = Mat::rotation(6, &mut rng);
        for i in 0..6 {
            for j in 0..6 {
                let dot: f64 = (0..6).map(|k| m.a[i * 6 + k] * m.a[j * 6 + k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let back = m.mul_t(&m.mul(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(Mat::identity(2).mul(&[3.0, 4.0]), vec![3.0, 4.0]);
    }

    #[test]
    fn translation_moves_optimum() {
        let b = BaseInstance::new(10, 1, 2).unwrap();
        let t = b.with_optimum_at(&[1.0, -2.0]);
        assert_eq!(t.x_opt, vec![1.0, -2.0]);
        assert!((t.eval(&[1.0, -2.0]).unwrap() - t.f_opt).abs() < 1e-9);
        let probe = [0.4, 0.9];
        let shifted = [probe[0] - 1.0 + b.x_opt[0], probe[1] + 2.0 + b.x_opt[1]];
        let (u, v) = (t.eval(&probe).unwrap(), b.eval(&shifted).unwrap());
        assert!((u - v).abs() <= 1e-12 * v.abs().max(1.0), "{u} vs {v}");
    }
}
