//! Derivative-free minimization.
//!
//! [`Minimizer`] is the pluggable interface; [`NelderMead`] is the bundled
//! implementation with the standard coefficients (reflection 1, expansion
//! 2, contraction 0.5, shrink 0.5).

use rand::RngExt;
use thiserror::Error;

use crate::rng::seeded;

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// Hard cap on objective evaluations, restarts included.
    pub max_evals: usize,
    /// Stop when every vertex is within `x_tol` (max-norm) of the best.
    pub x_tol: f64,
    /// Stop when the simplex values span less than `f_tol`.
    pub f_tol: f64,
    /// Seeds the edge directions of restart simplices.
    pub seed: u64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Extra simplex runs, each started from the best point so far with a
    /// freshly oriented simplex. The budget is split evenly across runs; a
    /// run that stops early on a tolerance leaves its remainder to the rest.
    pub restarts: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            max_evals: 1000,
            x_tol: 1e-8,
            f_tol: 1e-10,
            seed: 0,
            initial_step: 0.5,
            restarts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// `(evaluation number, value)` for every evaluation, 1-based.
    pub trace: Vec<(usize, f64)>,
    /// True when the last run stopped on a tolerance rather than the budget.
    pub converged: bool,
    pub iterations: usize,
}

impl OptimizeResult {
    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("objective returned {value} at evaluation {eval} (x = {x:?})")]
    NonFinite {
        x: Vec<f64>,
        value: f64,
        eval: usize,
        /// Everything recorded before the failing evaluation.
        partial: Box<OptimizeResult>,
    },
    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),
}

pub trait Minimizer {
    fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64]) -> Result<OptimizeResult, OptimizeError>;
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NelderMead {
    pub options: OptimizeOptions,
}

impl NelderMead {
    pub fn new(options: OptimizeOptions) -> Self {
        NelderMead { options }
    }
}

impl Minimizer for NelderMead {
    fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64]) -> Result<OptimizeResult, OptimizeError> {
        nelder_mead(f, x0, &self.options)
    }
}

/// Nelder–Mead from `x0`. Deterministic given `(x0, opts)`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, OptimizeError> {
    nelder_mead(&mut f, x0, opts)
}

enum Halt {
    Budget,
    /// This run's share of the budget is spent; the next restart may go on.
    RunLimit,
    NonFinite(Vec<f64>, f64),
}

struct Evaluator<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> f64,
    max_evals: usize,
    run_limit: usize,
    trace: Vec<(usize, f64)>,
    best_x: Vec<f64>,
    best_f: f64,
}

impl Evaluator<'_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, Halt> {
        if self.trace.len() >= self.max_evals {
            return Err(Halt::Budget);
        }
        if self.trace.len() >= self.run_limit {
            return Err(Halt::RunLimit);
        }
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Halt::NonFinite(x.to_vec(), v));
        }
        self.trace.push((self.trace.len() + 1, v));
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        Ok(v)
    }
}

fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, OptimizeError> {
    if x0.is_empty() {
        return Err(OptimizeError::InvalidOptions("x0 is empty".into()));
    }
    if opts.max_evals == 0 {
        return Err(OptimizeError::InvalidOptions("max_evals must be at least 1".into()));
    }
    if !(opts.initial_step.is_finite() && opts.initial_step > 0.0) {
        return Err(OptimizeError::InvalidOptions("initial_step must be positive".into()));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OptimizeError::InvalidOptions("x0 has non-finite entries".into()));
    }

    let mut ev = Evaluator {
        f,
        max_evals: opts.max_evals,
        run_limit: opts.max_evals,
        trace: Vec::new(),
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
    };
    let mut rng = seeded(opts.seed);
    let mut iterations = 0;
    let mut converged = false;
    let mut start = x0.to_vec();
    let mut signs = vec![1.0; x0.len()];

    let mut outcome = Ok(());
    for run in 0..=opts.restarts {
        if run > 0 {
            start = ev.best_x.clone();
            for s in &mut signs {
                *s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
        }
        let remaining_runs = opts.restarts + 1 - run;
        let run_budget = (opts.max_evals - ev.trace.len()).div_ceil(remaining_runs);
        ev.run_limit = (ev.trace.len() + run_budget).min(opts.max_evals);
        match run_simplex(&mut ev, &start, &signs, opts, &mut iterations) {
            Ok(()) => converged = true,
            Err(Halt::RunLimit) => converged = false,
            Err(h) => {
                converged = false;
                outcome = Err(h);
                break;
            }
        }
    }

    let result = OptimizeResult {
        best_params: ev.best_x,
        best_value: ev.best_f,
        trace: ev.trace,
        converged,
        iterations,
    };
    match outcome {
        Err(Halt::NonFinite(x, value)) => Err(OptimizeError::NonFinite {
            x,
            value,
            eval: result.trace.len() + 1,
            partial: Box::new(result),
        }),
        _ => Ok(result),
    }
}

/// One simplex run until a tolerance is met (`Ok`) or the run halts.
fn run_simplex(
    ev: &mut Evaluator<'_>,
    start: &[f64],
    signs: &[f64],
    opts: &OptimizeOptions,
    iterations: &mut usize,
) -> Result<(), Halt> {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), ev.eval(start)?));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += signs[i] * opts.initial_step;
        let fx = ev.eval(&x)?;
        simplex.push((x, fx));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (&simplex[0], &simplex[n]);
        let spread = worst.1 - best.1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < opts.x_tol || spread < opts.f_tol {
            return Ok(());
        }
        *iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let along = |from: &[f64], coef: f64| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, x)| c + coef * (x - c)).collect()
        };

        let xr = along(&simplex[n].0, -ALPHA);
        let fr = ev.eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = along(&xr, GAMMA);
            let fe = ev.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let contracted = if fr < simplex[n].1 {
            let xc = along(&xr, RHO);
            let fc = ev.eval(&xc)?;
            (fc <= fr).then_some((xc, fc))
        } else {
            let xc = along(&simplex[n].0, RHO);
            let fc = ev.eval(&xc)?;
            (fc < simplex[n].1).then_some((xc, fc))
        };
        match contracted {
            Some(v) => simplex[n] = v,
            None => {
                let x0 = simplex[0].0.clone();
                for vertex in &mut simplex[1..] {
                    let x: Vec<f64> = x0.iter().zip(&vertex.0).map(|(b, v)| b + SIGMA * (v - b)).collect();
                    let fx = ev.eval(&x)?;
                    *vertex = (x, fx);
                }
            }
        }
    }
}
