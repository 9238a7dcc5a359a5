//! DE and PSO portfolios run on a fixed iteration budget with shared initial
//! populations.

pub mod config;
pub mod de;
pub mod pso;

use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use config::{
    algorithm_by_name, de_configs, pso_configs, Algorithm, Crossover, DeConfig, InitialVelocity,
    Portfolio, PortfolioName, PsoConfig, Selection,
};
pub use de::run_de;
pub use pso::run_pso;

use crate::error::{Error, Result};
use crate::keyed_rng;
use crate::suite::bbob::{BaseInstance, LOWER, UPPER};
use crate::suite::sample::fmt_f64;
use crate::suite::AffineInstance;

/// A minimisation problem on the `[-5, 5]^dim` box.
pub trait Objective: Sync {
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl Objective for AffineInstance {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        AffineInstance::dim(self)
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
}

impl Objective for BaseInstance {
    fn id(&self) -> &str {
        self.name()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
}

pub(crate) fn clamp_to_box(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(LOWER, UPPER);
    }
}

/// Per-iteration log of one run: best-so-far value (index 0 is the initial
/// population) and, for PSO, the inertia used at each iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub best_so_far: Vec<f64>,
    pub inertia: Vec<f64>,
}

impl Trace {
    fn start(best: f64) -> Self {
        Trace {
            best_so_far: vec![best],
            inertia: Vec::new(),
        }
    }

    fn push(&mut self, best: f64, inertia: Option<f64>) {
        let prev = *self.best_so_far.last().expect("trace starts non-empty");
        self.best_so_far.push(best.min(prev));
        if let Some(w) = inertia {
            self.inertia.push(w);
        }
    }

    pub fn best(&self) -> f64 {
        *self.best_so_far.last().expect("trace starts non-empty")
    }

    pub fn iterations(&self) -> usize {
        self.best_so_far.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem_id: String,
    pub algorithm: String,
    pub run: usize,
    pub best_y: f64,
    pub budget: usize,
}

pub const MIN_POP_SIZE: usize = 4;

/// Uniform initial population keyed by `(master_seed, problem_id, run_index)`
/// only, so every algorithm of a run starts from the same points.
pub fn init_population(
    problem_id: &str,
    dim: usize,
    pop_size: usize,
    run_index: usize,
    master_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if pop_size < MIN_POP_SIZE {
        return Err(Error::Usage(format!(
            "population size {pop_size} below the minimum of {MIN_POP_SIZE}"
        )));
    }
    let mut rng = keyed_rng!("init-pop", master_seed, problem_id, run_index);
    Ok((0..pop_size)
        .map(|_| (0..dim).map(|_| rng.random_range(LOWER..=UPPER)).collect())
        .collect())
}

/// Run one algorithm from a given initial population.
pub fn run_algorithm<O: Objective + ?Sized>(
    alg: &Algorithm,
    problem: &O,
    pop0: &[Vec<f64>],
    fit0: &[f64],
    budget_iters: usize,
    run_index: usize,
    master_seed: u64,
) -> Trace {
    let mut rng = keyed_rng!("algorithm", master_seed, problem.id(), alg.name(), run_index);
    match alg {
        Algorithm::De(c) => run_de(c, problem, pop0, fit0, budget_iters, &mut rng),
        Algorithm::Pso(c) => run_pso(c, problem, pop0, fit0, budget_iters, &mut rng),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSettings {
    pub runs: usize,
    pub budget: usize,
    pub pop_size: usize,
    pub master_seed: u64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            runs: 5,
            budget: 100,
            pop_size: 20,
            master_seed: 0,
        }
    }
}

/// `|portfolio| × runs` records for one problem, sorted by (algorithm, run).
pub fn run_portfolio<O: Objective + ?Sized>(
    problem: &O,
    portfolio: &Portfolio,
    settings: &RunSettings,
) -> Result<Vec<RunRecord>> {
    if settings.runs == 0 {
        return Err(Error::Usage("runs must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(portfolio.len() * settings.runs);
    for run in 0..settings.runs {
        let pop0 = init_population(
            problem.id(),
            problem.dim(),
            settings.pop_size,
            run,
            settings.master_seed,
        )?;
        let fit0: Vec<f64> = pop0.iter().map(|x| problem.evaluate(x)).collect();
        for alg in &portfolio.members {
            let trace = run_algorithm(
                alg,
                problem,
                &pop0,
                &fit0,
                settings.budget,
                run,
                settings.master_seed,
            );
            out.push(RunRecord {
                problem_id: problem.id().to_string(),
                algorithm: alg.name().to_string(),
                run,
                best_y: trace.best(),
                budget: trace.iterations(),
            });
        }
    }
    sort_records(&mut out);
    Ok(out)
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| {
        (a.problem_id.as_str(), a.algorithm.as_str(), a.run)
            .cmp(&(b.problem_id.as_str(), b.algorithm.as_str(), b.run))
    });
}

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["problem_id", "algorithm", "run", "best_y", "budget"])?;
    for r in records {
        w.write_record([
            r.problem_id.clone(),
            r.algorithm.clone(),
            r.run.to_string(),
            fmt_f64(r.best_y),
            r.budget.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize, name: &str| -> Result<&str> {
            rec.get(i).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                row: row + 1,
                column: name.into(),
                message: "missing field".into(),
            })
        };
        let parse_err = |name: &str, e: String| Error::Parse {
            path: path.to_path_buf(),
            row: row + 1,
            column: name.into(),
            message: e,
        };
        out.push(RunRecord {
            problem_id: field(0, "problem_id")?.to_string(),
            algorithm: field(1, "algorithm")?.to_string(),
            run: field(2, "run")?.parse().map_err(|e: std::num::ParseIntError| parse_err("run", e.to_string()))?,
            best_y: field(3, "best_y")?.parse().map_err(|e: std::num::ParseFloatError| parse_err("best_y", e.to_string()))?,
            budget: field(4, "budget")?.parse().map_err(|e: std::num::ParseIntError| parse_err("budget", e.to_string()))?,
        });
    }
    Ok(out)
}
