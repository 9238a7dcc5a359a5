use rand::Rng as _;

use crate::portfolio::config::{Crossover, DeConfig, Selection};
use crate::portfolio::{clamp_to_box, Objective, Trace};
use crate::rng::Rng;
use crate::stats::argmin;

/// Pick an index from `0..n` that is not in `used`.
fn distinct(rng: &mut Rng, n: usize, used: &[usize]) -> usize {
    loop {
        let k = rng.random_range(0..n);
        if !used.contains(&k) {
            return k;
        }
    }
}

/// DE/<selection>/1/<crossover> with greedy replacement and box clamping.
/// One iteration is one full generation.
pub fn run_de<O: Objective + ?Sized>(
    cfg: &DeConfig,
    problem: &O,
    pop0: &[Vec<f64>],
    fit0: &[f64],
    budget_iters: usize,
    rng: &mut Rng,
) -> Trace {
    let n = pop0.len();
    let d = problem.dim();
    let mut pop = pop0.to_vec();
    let mut fit = fit0.to_vec();
    let mut trace = Trace::start(fit.iter().copied().fold(f64::INFINITY, f64::min));

    for _ in 0..budget_iters {
        let best = argmin(&fit);
        let mut next_pop = pop.clone();
        let mut next_fit = fit.clone();
        for i in 0..n {
            let base = match cfg.selection {
                Selection::Random => distinct(rng, n, &[i]),
                Selection::Best => best,
            };
            let r1 = distinct(rng, n, &[i, base]);
            let r2 = distinct(rng, n, &[i, base, r1]);
            let donor: Vec<f64> = (0..d)
                .map(|k| pop[base][k] + cfg.f * (pop[r1][k] - pop[r2][k]))
                .collect();
            let mut trial = pop[i].clone();
            match cfg.crossover {
                Crossover::Binary => {
                    let forced = rng.random_range(0..d);
                    for k in 0..d {
                        if k == forced || rng.random::<f64>() < cfg.cr {
                            trial[k] = donor[k];
                        }
                    }
                }
                Crossover::Exponential => {
                    let start = rng.random_range(0..d);
                    let mut len = 0;
                    loop {
                        trial[(start + len) % d] = donor[(start + len) % d];
                        len += 1;
                        if len >= d || rng.random::<f64>() >= cfg.cr {
                            break;
                        }
                    }
                }
            }
            clamp_to_box(&mut trial);
            let ft = problem.evaluate(&trial);
            if ft <= fit[i] {
                next_pop[i] = trial;
                next_fit[i] = ft;
            }
        }
        pop = next_pop;
        fit = next_fit;
        trace.push(fit.iter().copied().fold(f64::INFINITY, f64::min), None);
    }
    trace
}
