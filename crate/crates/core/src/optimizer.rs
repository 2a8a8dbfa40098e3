//! Box-constrained Nelder-Mead with seeded multi-start.
//!
//! Variational energy landscapes here are low-dimensional (tens of angles),
//! periodic, and non-convex with benign local structure, which is the home
//! turf of a simplex search: no gradients, few evaluations, trivially
//! deterministic. Standard coefficients are used (reflect 1, expand 2,
//! contract 0.5, shrink 0.5); every proposed point is clamped into the
//! search box. Runs are bit-reproducible: the only randomness is the
//! seeded draw of restart points, and concurrent restarts cannot affect
//! the result because the winner is picked by `(value, restart index)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::statevector::RngSeed;

/// Search configuration shared by [`minimize`] and [`multi_start`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Total evaluation budget, counted across all restarts.
    pub max_evals: usize,
    /// Convergence threshold on the simplex value spread.
    pub f_tol: f64,
    /// Number of independent starts (the first uses the caller's `x0`).
    pub restarts: usize,
    /// Inclusive-exclusive box `[lo, hi)` per coordinate.
    pub bounds: Vec<(f64, f64)>,
    /// Seed for the restart-point draws.
    pub seed: RngSeed,
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::OptimizerConfig(m));
        if self.bounds.is_empty() {
            return bad("bounds must not be empty".into());
        }
        for &(lo, hi) in &self.bounds {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return bad(format!("bound ({lo}, {hi}) is not a finite interval"));
            }
        }
        if !(self.f_tol.is_finite() && self.f_tol > 0.0) {
            return bad(format!("f_tol {} must be positive", self.f_tol));
        }
        if self.restarts == 0 {
            return bad("at least one restart is required".into());
        }
        let dim = self.bounds.len();
        if self.max_evals / self.restarts < dim + 2 {
            return bad(format!(
                "budget {} over {} restarts leaves fewer than {} evaluations per start",
                self.max_evals,
                self.restarts,
                dim + 2
            ));
        }
        Ok(())
    }
}

/// Outcome of a search.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// True when the simplex spread dropped below `f_tol` within budget.
    pub converged: bool,
}

fn clamp(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Objective wrapper that counts evaluations, enforces the budget, tracks
/// the best point seen, and rejects non-finite values.
struct Evaluator<'a, F> {
    f: &'a F,
    used: usize,
    budget: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<'a, F> Evaluator<'a, F>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    /// `Ok(None)` means the budget is exhausted.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.used >= self.budget {
            return Ok(None);
        }
        let value = (self.f)(x)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective {
                value,
                point: x.to_vec(),
            });
        }
        self.used += 1;
        if self.best.as_ref().map_or(true, |(_, fb)| value < *fb) {
            self.best = Some((x.to_vec(), value));
        }
        Ok(Some(value))
    }
}

fn nelder_mead<F>(
    f: &F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    budget: usize,
    f_tol: f64,
) -> Result<MinimizeResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = x0.len();
    let mut ev = Evaluator {
        f,
        used: 0,
        budget,
        best: None,
    };

    // Initial simplex: x0 plus one step along each coordinate, stepping
    // inward when the box edge is nearer than the step.
    let mut start = x0.to_vec();
    clamp(&mut start, bounds);
    let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
    for j in 0..dim {
        let (lo, hi) = bounds[j];
        let step = 0.1 * (hi - lo);
        let mut p = start.clone();
        p[j] = if p[j] + step <= hi {
            p[j] + step
        } else {
            p[j] - step
        };
        simplex.push(p);
    }
    let mut values = Vec::with_capacity(dim + 1);
    for p in &simplex {
        match ev.eval(p)? {
            Some(v) => values.push(v),
            None => break,
        }
    }
    let finish = |ev: Evaluator<F>, converged: bool| {
        let (x, f) = ev.best.expect("at least one evaluation");
        Ok(MinimizeResult {
            x,
            f,
            evaluations: ev.used,
            converged,
        })
    };
    if values.len() < simplex.len() {
        return finish(ev, false);
    }

    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let second_worst = order[dim - 1];
        let worst = order[dim];

        if values[worst] - values[best] <= f_tol {
            return finish(ev, true);
        }

        let mut centroid = vec![0.0; dim];
        for &i in order.iter().take(dim) {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v / dim as f64;
            }
        }

        let blend = |a: f64| -> Vec<f64> {
            // point = centroid + a * (centroid - worst), clamped
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + a * (c - w))
                .collect();
            clamp(&mut p, bounds);
            p
        };

        let reflected = blend(REFLECT);
        let fr = match ev.eval(&reflected)? {
            Some(v) => v,
            None => return finish(ev, false),
        };

        if fr < values[best] {
            // Try stretching further in the same direction.
            let expanded = blend(EXPAND);
            match ev.eval(&expanded)? {
                Some(fe) if fe < fr => {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                }
                Some(_) => {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
                None => {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                    return finish(ev, false);
                }
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }

        // Contract, outside or inside of the reflection.
        let contracted = if fr < values[worst] {
            blend(REFLECT * CONTRACT)
        } else {
            blend(-CONTRACT)
        };
        let fc = match ev.eval(&contracted)? {
            Some(v) => v,
            None => return finish(ev, false),
        };
        if fc < values[worst].min(fr) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }

        // Shrink everything toward the best vertex.
        let anchor = simplex[best].clone();
        for i in 0..=dim {
            if i == best {
                continue;
            }
            for (v, a) in simplex[i].iter_mut().zip(&anchor) {
                *v = a + SHRINK * (*v - a);
            }
            match ev.eval(&simplex[i])? {
                Some(v) => values[i] = v,
                None => return finish(ev, false),
            }
        }
    }
}

/// Single Nelder-Mead run from `x0` with the full budget.
pub fn minimize<F>(f: &F, x0: &[f64], cfg: &OptimizerConfig) -> Result<MinimizeResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    if x0.len() != cfg.bounds.len() {
        return Err(Error::OptimizerConfig(format!(
            "x0 has {} coordinates, bounds have {}",
            x0.len(),
            cfg.bounds.len()
        )));
    }
    nelder_mead(f, x0, &cfg.bounds, cfg.max_evals, cfg.f_tol)
}

/// Multi-start search: restart 0 begins at `x0`, the rest at seeded
/// uniform draws inside the box. The budget is split evenly; the best
/// result wins, ties resolved by restart index.
pub fn multi_start<F>(f: &F, x0: &[f64], cfg: &OptimizerConfig) -> Result<MinimizeResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if x0.len() != cfg.bounds.len() {
        return Err(Error::OptimizerConfig(format!(
            "x0 has {} coordinates, bounds have {}",
            x0.len(),
            cfg.bounds.len()
        )));
    }
    // Draw every start up front from one stream so the set of starting
    // points is independent of how restarts are scheduled.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.0);
    let mut starts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for _ in 1..cfg.restarts {
        starts.push(
            cfg.bounds
                .iter()
                .map(|&(lo, hi)| lo + rng.random::<f64>() * (hi - lo))
                .collect(),
        );
    }
    let per_restart = cfg.max_evals / cfg.restarts;

    let runs: Vec<Result<MinimizeResult>> = starts
        .par_iter()
        .map(|start| nelder_mead(f, start, &cfg.bounds, per_restart, cfg.f_tol))
        .collect();

    let mut best: Option<MinimizeResult> = None;
    let mut total_evals = 0;
    for run in runs {
        let run = run?;
        total_evals += run.evaluations;
        let better = match &best {
            None => true,
            Some(b) => run.f < b.f,
        };
        if better {
            best = Some(run);
        }
    }
    let mut winner = best.expect("restarts >= 1");
    winner.evaluations = total_evals;
    Ok(winner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn quadratic(center: Vec<f64>) -> impl Fn(&[f64]) -> Result<f64> + Sync {
        move |x: &[f64]| Ok(x.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum())
    }

    fn cfg(dim: usize, max_evals: usize, restarts: usize) -> OptimizerConfig {
        OptimizerConfig {
            max_evals,
            f_tol: 1e-10,
            restarts,
            bounds: vec![(-2.0, 3.0); dim],
            seed: RngSeed(17),
        }
    }

    #[test]
    fn convex_quadratic_reaches_tight_minimum() {
        for dim in [2, 4, 6] {
            let f = quadratic(vec![0.7; dim]);
            let result = minimize(&f, &vec![0.0; dim], &cfg(dim, 4000, 1)).unwrap();
            assert!(result.converged, "dim {dim} did not converge");
            assert!(result.f < 1e-8, "dim {dim}: f* = {}", result.f);
        }
    }

    #[test]
    fn result_never_exceeds_starting_value() {
        // A rough multi-well function; even a tiny budget must return a
        // point at least as good as x0.
        let f = |x: &[f64]| Ok((3.0 * x[0]).sin() + 0.1 * x[0] * x[0]);
        let x0 = [1.9];
        let start_value = f(&x0[..]).unwrap();
        let mut config = cfg(1, 7, 1);
        config.f_tol = 1e-12;
        let result = minimize(&f, &x0, &config).unwrap();
        assert!(result.f <= start_value);
        assert!(result.evaluations <= 7);
    }

    #[test]
    fn budget_is_honored_across_restarts() {
        let calls = AtomicUsize::new(0);
        let f = |x: &[f64]| {
            calls.fetch_add(1, Ordering::Relaxed);
            Ok(x.iter().map(|a| a * a).sum())
        };
        let config = cfg(3, 200, 4);
        let result = multi_start(&f, &[1.0, 1.0, 1.0], &config).unwrap();
        assert!(result.evaluations <= 200);
        assert_eq!(calls.load(Ordering::Relaxed), result.evaluations);
    }

    #[test]
    fn multi_start_is_deterministic_per_seed() {
        let f = |x: &[f64]| Ok((4.0 * x[0]).sin() * (3.0 * x[1]).cos() + 0.05 * (x[0] + x[1]));
        let a = multi_start(&f, &[0.0, 0.0], &cfg(2, 2000, 6)).unwrap();
        let b = multi_start(&f, &[0.0, 0.0], &cfg(2, 2000, 6)).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.f, b.f);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn iterates_stay_inside_the_box() {
        let f = |x: &[f64]| {
            for &v in x {
                assert!((-2.0..=3.0).contains(&v), "escaped box: {v}");
            }
            // optimum far outside the box pushes iterates to the edge
            Ok(x.iter().map(|a| (a - 50.0) * (a - 50.0)).sum())
        };
        let result = minimize(&f, &[0.0, 0.0], &cfg(2, 500, 1)).unwrap();
        assert!((result.x[0] - 3.0).abs() < 1e-9);
        assert!((result.x[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_objective_aborts() {
        let f = |x: &[f64]| Ok(if x[0] > 0.5 { f64::NAN } else { x[0] * x[0] });
        match minimize(&f, &[0.4], &cfg(1, 100, 1)) {
            Err(Error::NonFiniteObjective { .. }) => {}
            other => panic!("expected non-finite abort, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let mut c = cfg(2, 100, 1);
        c.bounds[0] = (1.0, 1.0);
        assert!(c.validate().is_err());
        let mut c = cfg(2, 100, 1);
        c.f_tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg(2, 100, 1);
        c.restarts = 0;
        assert!(c.validate().is_err());
        let c = cfg(6, 20, 3); // 6 evals per restart < dim + 2
        assert!(c.validate().is_err());
        let c = cfg(2, 100, 5);
        assert!(c.validate().is_ok());
    }
}
