use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::suite::affine::AffineInstance;

/// Design matrix plus objective values for one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub problem_id: String,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub sampler_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SampleMeta {
    pub problem_id: String,
    pub n: usize,
    pub dim: usize,
    pub sampler_seed: u64,
}

impl Sample {
    pub fn new(problem_id: impl Into<String>, x: Vec<Vec<f64>>, y: Vec<f64>) -> Self {
        Sample {
            problem_id: problem_id.into(),
            x,
            y,
            sampler_seed: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn meta(&self) -> SampleMeta {
        SampleMeta {
            problem_id: self.problem_id.clone(),
            n: self.n(),
            dim: self.dim(),
            sampler_seed: self.sampler_seed,
        }
    }

    /// Same design with objective values replaced.
    pub fn with_y(&self, y: Vec<f64>) -> Self {
        Sample {
            y,
            ..self.clone()
        }
    }

    /// Write `x1..xd,y` CSV plus a `<path>.json` metadata sidecar.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (1..=self.dim()).map(|k| format!("x{k}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for (row, y) in self.x.iter().zip(&self.y) {
            let mut rec: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            rec.push(fmt_f64(*y));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        let meta = serde_json::to_string_pretty(&self.meta())?;
        std::fs::write(sidecar(path), meta).map_err(|e| Error::io(sidecar(path), e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let meta: SampleMeta = {
            let p = sidecar(path);
            let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            serde_json::from_str(&text)?
        };
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let vals = rec
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    s.parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        row: row + 1,
                        column: header.get(c).unwrap_or("?").to_string(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let (yv, xv) = vals.split_last().ok_or_else(|| Error::Data("empty sample row".into()))?;
            x.push(xv.to_vec());
            y.push(*yv);
        }
        if y.len() != meta.n {
            return Err(Error::Data(format!(
                "{}: sidecar says {} rows, file has {}",
                path.display(),
                meta.n,
                y.len()
            )));
        }
        Ok(Sample {
            problem_id: meta.problem_id,
            x,
            y,
            sampler_seed: meta.sampler_seed,
        })
    }
}

fn sidecar(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Evaluate one problem on a shared design.
pub fn evaluate_sample(problem: &AffineInstance, x: &[Vec<f64>], sampler_seed: u64) -> Result<Sample> {
    let y = x
        .iter()
        .map(|row| problem.eval(row))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(k) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "{} produced a non-finite value at design row {k}",
            problem.id
        )));
    }
    Ok(Sample {
        problem_id: problem.id.clone(),
        x: x.to_vec(),
        y,
        sampler_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::lhs::lhs_sample;

    #[test]
    fn half_blend_is_finite_and_nonnegative() {
        let x = lhs_sample(2, 100, 3);
        for (ci, cj) in [(1, 24), (16, 23), (5, 21), (7, 20)] {
            let p = AffineInstance::from_classes(ci, cj, 1, 0.5, 2).unwrap();
            let s = evaluate_sample(&p, &x, 3).unwrap();
            assert!(s.y.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }

    #[test]
    fn parent_value_offsets_cancel() {
        let x = lhs_sample(2, 100, 5);
        let p = AffineInstance::from_classes(2, 15, 4, 0.25, 2).unwrap();
        let shifted = AffineInstance::new(
            p.parent_i.with_value_offset(37.5),
            p.parent_j.with_value_offset(-12.25),
            0.25,
        )
        .unwrap();
        let a = evaluate_sample(&p, &x, 5).unwrap();
        let b = evaluate_sample(&shifted, &x, 5).unwrap();
        for (u, v) in a.y.iter().zip(&b.y) {
            assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0), "{u} vs {v}");
        }
    }

    #[test]
    fn shared_design_is_bitwise_equal() {
        let x = lhs_sample(2, 100, 9);
        let a = evaluate_sample(&AffineInstance::from_classes(1, 2, 1, 0.5, 2).unwrap(), &x, 9).unwrap();
        let b = evaluate_sample(&AffineInstance::from_classes(3, 4, 1, 0.5, 2).unwrap(), &x, 9).unwrap();
        assert_eq!(a.x, b.x);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let x = lhs_sample(2, 10, 1);
        let s = evaluate_sample(&AffineInstance::from_classes(1, 2, 1, 0.5, 2).unwrap(), &x, 1).unwrap();
        s.write_csv(&path).unwrap();
        let back = Sample::read_csv(&path).unwrap();
        assert_eq!(back, s);
        let head = std::fs::read_to_string(&path).unwrap();
        assert!(head.starts_with("x1,x2,y\n"));
    }
}
