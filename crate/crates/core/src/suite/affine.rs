//! Affine recombination of two base instances.

use crate::error::{Error, Result};
use crate::suite::bbob::BaseInstance;

/// Lower clamp applied to each parent difference before taking its logarithm.
pub const LOG_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineInstance {
    pub parent_i: BaseInstance,
    pub parent_j: BaseInstance,
    pub alpha: f64,
    pub id: String,
    /// `P_i(O_i)` and `P_j(O_j)`, evaluated once.
    opt_values: (f64, f64),
}

/// Canonical problem id, e.g. `A_01_07_1_0.50`.
pub fn affine_id(class_i: u8, class_j: u8, instance: u32, alpha: f64) -> String {
    format!("A_{class_i:02}_{class_j:02}_{instance}_{alpha:.2}")
}

impl AffineInstance {
    pub fn new(parent_i: BaseInstance, parent_j: BaseInstance, alpha: f64) -> Result<Self> {
        if parent_i.dim != parent_j.dim {
            return Err(Error::Usage("parents differ in dimension".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Usage(format!("alpha {alpha} outside [0, 1]")));
        }
        let id = affine_id(parent_i.class_id, parent_j.class_id, parent_i.instance_id, alpha);
        let opt_values = (
            parent_i.eval_unchecked(&parent_i.x_opt),
            parent_j.eval_unchecked(&parent_j.x_opt),
        );
        Ok(AffineInstance {
            parent_i,
            parent_j,
            alpha,
            id,
            opt_values,
        })
    }

    /// Build from class ids, enforcing distinct classes and a shared instance id.
    pub fn from_classes(class_i: u8, class_j: u8, instance: u32, alpha: f64, dim: usize) -> Result<Self> {
        if class_i == class_j {
            return Err(Error::Usage(format!("parents share class {class_i}")));
        }
        Self::new(
            BaseInstance::new(class_i, instance, dim)?,
            BaseInstance::new(class_j, instance, dim)?,
            alpha,
        )
    }

    pub fn dim(&self) -> usize {
        self.parent_i.dim
    }

    /// The recombined optimum: parent `i`'s optimum location.
    pub fn x_opt(&self) -> &[f64] {
        &self.parent_i.x_opt
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Usage(format!(
                "point has {} coordinates, problem dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let pi = &self.parent_i;
        let pj = &self.parent_j;
        let di = pi.eval_unchecked(x) - self.opt_values.0;
        let moved: Vec<f64> = x
            .iter()
            .zip(pi.x_opt.iter().zip(&pj.x_opt))
            .map(|(v, (oi, oj))| v - oi + oj)
            .collect();
        let dj = pj.eval_unchecked(&moved) - self.opt_values.1;
        let a = self.alpha;
        let mut log = 0.0;
        // Zero-weight terms are skipped so alpha in {0, 1} reproduces one parent.
        if a != 0.0 {
            log += a * di.max(LOG_CLAMP).ln();
        }
        if a != 1.0 {
            log += (1.0 - a) * dj.max(LOG_CLAMP).ln();
        }
        log.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(alpha: f64) -> AffineInstance {
        AffineInstance::from_classes(3, 12, 2, alpha, 2).unwrap()
    }

    #[test]
    fn alpha_one_is_parent_i() {
        let a = pair(1.0);
        let x = [0.7, -2.1];
        let want = a.parent_i.eval(&x).unwrap() - a.parent_i.f_opt;
        let got = a.eval(&x).unwrap();
        assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn alpha_zero_is_shifted_parent_j() {
        let a = pair(0.0);
        let x = [0.7, -2.1];
        let moved: Vec<f64> = (0..2)
            .map(|k| x[k] - a.parent_i.x_opt[k] + a.parent_j.x_opt[k])
            .collect();
        let want = a.parent_j.eval(&moved).unwrap() - a.parent_j.f_opt;
        let got = a.eval(&x).unwrap();
        assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn value_at_recombined_optimum_is_clamped_zero() {
        for alpha in [0.25, 0.5, 0.75] {
            let a = pair(alpha);
            let v = a.eval(a.x_opt()).unwrap();
            // Both parent differences vanish, so the result is
            // exp(alpha ln eps + (1 - alpha) ln eps) = eps up to rounding.
            assert!(v <= LOG_CLAMP * (1.0 + 1e-9), "{v}");
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn id_format() {
        assert_eq!(pair(0.5).id, "A_03_12_2_0.50");
        assert!(AffineInstance::from_classes(4, 4, 1, 0.5, 2).is_err());
    }
}
