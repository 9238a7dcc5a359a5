use rand::Rng as _;

use crate::portfolio::config::{InitialVelocity, PsoConfig};
use crate::portfolio::{clamp_to_box, Objective, Trace};
use crate::rng::Rng;
use crate::stats::argmin;
use crate::suite::bbob::{LOWER, UPPER};

/// Half-width of the initial random velocity range, as a fraction of the domain width.
pub const INITIAL_VELOCITY_FRACTION: f64 = 0.2;
/// Inertia reached at the end of an adaptive run.
pub const ADAPTIVE_FINAL_INERTIA: f64 = 0.4;

/// Inertia, cognitive and social coefficients at iteration `t` of `total`.
pub fn coefficients(cfg: &PsoConfig, t: usize, total: usize) -> (f64, f64, f64) {
    if !cfg.adaptive {
        return (cfg.w, 2.0, 2.0);
    }
    let frac = if total > 1 {
        t as f64 / (total - 1) as f64
    } else {
        0.0
    };
    let w = cfg.w + (ADAPTIVE_FINAL_INERTIA - cfg.w) * frac;
    (w, 2.5 - 2.0 * frac, 0.5 + 2.0 * frac)
}

/// Global-best PSO. Positions leaving the box are clamped and the velocity of
/// each clamped coordinate is reset to zero.
pub fn run_pso<O: Objective + ?Sized>(
    cfg: &PsoConfig,
    problem: &O,
    pop0: &[Vec<f64>],
    fit0: &[f64],
    budget_iters: usize,
    rng: &mut Rng,
) -> Trace {
    let n = pop0.len();
    let d = problem.dim();
    let vmax = INITIAL_VELOCITY_FRACTION * (UPPER - LOWER);
    let mut pos = pop0.to_vec();
    let mut vel: Vec<Vec<f64>> = match cfg.initial_velocity {
        InitialVelocity::Zero => vec![vec![0.0; d]; n],
        InitialVelocity::Random => (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-vmax..=vmax)).collect())
            .collect(),
    };
    let mut pbest = pos.clone();
    let mut pbest_fit = fit0.to_vec();
    let mut g = argmin(&pbest_fit);
    let mut trace = Trace::start(pbest_fit[g]);

    for t in 0..budget_iters {
        let (w, c1, c2) = coefficients(cfg, t, budget_iters);
        let gbest = pbest[g].clone();
        for i in 0..n {
            for k in 0..d {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                vel[i][k] = w * vel[i][k]
                    + c1 * r1 * (pbest[i][k] - pos[i][k])
                    + c2 * r2 * (gbest[k] - pos[i][k]);
                pos[i][k] += vel[i][k];
                if pos[i][k] < LOWER || pos[i][k] > UPPER {
                    vel[i][k] = 0.0;
                }
            }
            clamp_to_box(&mut pos[i]);
            let f = problem.evaluate(&pos[i]);
            if f <= pbest_fit[i] {
                pbest_fit[i] = f;
                pbest[i] = pos[i].clone();
            }
        }
        g = argmin(&pbest_fit);
        trace.push(pbest_fit[g], Some(w));
    }
    trace
}
