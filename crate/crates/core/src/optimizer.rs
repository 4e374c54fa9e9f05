//! Box-constrained limited-memory quasi-Newton minimization.
//!
//! Search directions come from the two-loop recursion over a short history
//! of (step, gradient-change) pairs; bounds are handled by clamping trial
//! points onto the box and measuring optimality with the projected
//! gradient; the line search backtracks until an Armijo decrease holds.
//! Gradients default to central finite differences so the driver can hand
//! in a plain cost closure; an exact gradient callback is optional.

use std::collections::VecDeque;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::circuits::AnsatzParams;
use crate::error::{Error, Result};

/// Finite-difference stencil for the default gradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientScheme {
    /// `(f(x+h) - f(x-h)) / 2h`: two evaluations per component.
    CentralDiff,
    /// `(f(x+h) - f(x)) / h`: one evaluation per component, reusing the
    /// already-known `f(x)`.
    ForwardDiff,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// History pairs kept for the two-loop recursion.
    pub memory: usize,
    /// Relative-improvement termination: stop once
    /// `f_k - f_{k+1} <= ftol * max(|f_k|, |f_{k+1}|, 1)`.
    pub ftol: f64,
    /// Projected-gradient infinity-norm termination.
    pub gtol: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Finite-difference step width.
    pub fd_step: f64,
    /// Finite-difference stencil.
    pub scheme: GradientScheme,
    /// Common (lower, upper) box applied to every component.
    pub bounds: (f64, f64),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            memory: 10,
            ftol: 1e-14,
            gtol: 1e-12,
            max_iters: 15_000,
            fd_step: 1e-7,
            scheme: GradientScheme::CentralDiff,
            bounds: (-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.memory == 0 || self.max_iters == 0 {
            return Err(Error::Usage(
                "optimizer memory and max_iters must be positive".into(),
            ));
        }
        if !(self.ftol > 0.0) || !(self.gtol > 0.0) || !(self.fd_step > 0.0) {
            return Err(Error::Usage(format!(
                "optimizer tolerances must be positive: ftol={}, gtol={}, fd_step={}",
                self.ftol, self.gtol, self.fd_step
            )));
        }
        let (lo, hi) = self.bounds;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Usage(format!("invalid bounds ({lo}, {hi})")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Ftol,
    Gtol,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub lambda_star: Vec<f64>,
    pub cost_star: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub cost_evals: usize,
    /// The start point violated the bounds and was clamped onto the box.
    pub start_clamped: bool,
    /// The cost turned non-finite mid-run; `lambda_star` is best-so-far.
    pub non_finite_abort: bool,
}

/// Minimize `cost` over the box, gradients by central finite differences.
pub fn minimize<F>(mut cost: F, x0: &[f64], config: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> f64,
{
    run(&mut cost, None, x0, config)
}

/// Minimize with a user-supplied exact gradient callback.
pub fn minimize_with_gradient<F, G>(
    mut cost: F,
    mut gradient: G,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    run(&mut cost, Some(&mut gradient), x0, config)
}

/// How the per-step start vector is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedMode {
    /// Uniform draw from the bounds box with a fixed RNG seed.
    Random,
    /// Reuse the previous step's optimum verbatim.
    Warm,
}

/// Start vector for an `n`-qubit, depth-`d` ansatz optimization.
pub fn seed_parameters(
    n: usize,
    d: usize,
    mode: SeedMode,
    prev: Option<&[f64]>,
    rng_seed: u64,
    bounds: (f64, f64),
) -> Result<Vec<f64>> {
    let count = AnsatzParams::parameter_count(n, d);
    match mode {
        SeedMode::Warm => {
            let prev = prev.ok_or_else(|| {
                Error::Usage("warm seeding requires a previous parameter vector".into())
            })?;
            if prev.len() != count {
                return Err(Error::Usage(format!(
                    "warm seed has {} components, ansatz takes {count}",
                    prev.len()
                )));
            }
            Ok(prev.to_vec())
        }
        SeedMode::Random => {
            let (lo, hi) = bounds;
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::Usage(format!("invalid bounds ({lo}, {hi})")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            Ok((0..count).map(|_| rng.random_range(lo..=hi)).collect())
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn clamp_to(x: &mut [f64], lo: f64, hi: f64) {
    for c in x {
        *c = c.clamp(lo, hi);
    }
}

/// Infinity norm of the gradient with outward-pointing components zeroed
/// at active bounds.
fn projected_gradient_norm(x: &[f64], g: &[f64], lo: f64, hi: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if xi <= lo {
                gi.min(0.0)
            } else if xi >= hi {
                gi.max(0.0)
            } else {
                gi
            }
        })
        .fold(0.0, |m, pg| m.max(pg.abs()))
}

fn fd_gradient(
    cost: &mut dyn FnMut(&[f64]) -> f64,
    x: &mut Vec<f64>,
    f_at_x: f64,
    h: f64,
    scheme: GradientScheme,
    evals: &mut usize,
) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + h;
        let f_plus = cost(x);
        *evals += 1;
        g[i] = match scheme {
            GradientScheme::ForwardDiff => (f_plus - f_at_x) / h,
            GradientScheme::CentralDiff => {
                x[i] = orig - h;
                let f_minus = cost(x);
                *evals += 1;
                (f_plus - f_minus) / (2.0 * h)
            }
        };
        x[i] = orig;
    }
    g
}

/// Two-loop recursion: returns the quasi-Newton direction `-H g`.
fn two_loop(history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, g: &[f64]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = history.back() {
        let scale = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= scale;
        }
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    for qi in &mut q {
        *qi = -*qi;
    }
    q
}

fn run(
    cost: &mut dyn FnMut(&[f64]) -> f64,
    mut exact_grad: Option<&mut dyn FnMut(&[f64]) -> Vec<f64>>,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    if x0.is_empty() {
        return Err(Error::Usage("cannot minimize over zero parameters".into()));
    }
    let (lo, hi) = config.bounds;

    let mut x = x0.to_vec();
    let start_clamped = x.iter().any(|c| *c < lo || *c > hi);
    clamp_to(&mut x, lo, hi);

    let mut evals = 0usize;
    let mut f = cost(&x);
    evals += 1;
    if !f.is_finite() {
        return Err(Error::Input(format!("cost at the start point is {f}")));
    }

    let mut gradient = |cost: &mut dyn FnMut(&[f64]) -> f64,
                        x: &mut Vec<f64>,
                        f_at_x: f64,
                        evals: &mut usize|
     -> Vec<f64> {
        match exact_grad.as_mut() {
            Some(g) => g(x),
            None => fd_gradient(cost, x, f_at_x, config.fd_step, config.scheme, evals),
        }
    };

    let mut g = gradient(cost, &mut x, f, &mut evals);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0usize;
    let mut termination = Termination::MaxIters;
    let mut non_finite_abort = false;

    const ARMIJO_C1: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 60;

    'outer: while iterations < config.max_iters {
        if !g.iter().all(|c| c.is_finite()) {
            non_finite_abort = true;
            break;
        }
        if projected_gradient_norm(&x, &g, lo, hi) <= config.gtol {
            termination = Termination::Gtol;
            break;
        }
        iterations += 1;

        // Try the quasi-Newton direction; on a failed line search fall
        // back to steepest descent once before declaring a stall.
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        for attempt in 0..2 {
            let dir = if attempt == 0 && !history.is_empty() {
                two_loop(&history, &g)
            } else {
                g.iter().map(|c| -c).collect()
            };
            if dot(&dir, &g) >= 0.0 {
                // Curvature noise produced a non-descent direction.
                history.clear();
                continue;
            }
            let slope = dot(&dir, &g);
            let steepest = history.is_empty();
            let mut t = if steepest {
                (1.0 / dot(&g, &g).sqrt()).min(1.0)
            } else {
                1.0
            };
            let mut trial = |t: f64, evals: &mut usize| -> Option<(Vec<f64>, f64, bool)> {
                let mut x_new: Vec<f64> =
                    x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
                clamp_to(&mut x_new, lo, hi);
                if x_new == x {
                    return None;
                }
                let f_new = cost(&x_new);
                *evals += 1;
                let model_drop: f64 = x_new
                    .iter()
                    .zip(&x)
                    .zip(&g)
                    .map(|((xn, xi), gi)| gi * (xn - xi))
                    .sum();
                let armijo = f_new <= f + ARMIJO_C1 * model_drop && f_new <= f;
                Some((x_new, f_new, armijo))
            };
            for _ in 0..MAX_BACKTRACKS {
                match trial(t, &mut evals) {
                    None => break,
                    Some((_, f_new, _)) if !f_new.is_finite() => {
                        non_finite_abort = true;
                        break 'outer;
                    }
                    Some((x_new, f_new, true)) => {
                        accepted = Some((x_new, f_new));
                        break;
                    }
                    Some(_) => t *= 0.5,
                }
            }

            // Refine the accepted step once against the one-dimensional
            // quadratic through f(0), f'(0) and f(t); on quadratic
            // sections this is the exact line minimizer. A bare gradient
            // step has no curvature model behind its length, so when the
            // section is still descending past t just keep doubling.
            if let Some((_, f_acc)) = &accepted {
                let f_acc = *f_acc;
                let denom = 2.0 * (f_acc - f - slope * t);
                if denom > 0.0 {
                    let t_quad = -slope * t * t / denom;
                    if t_quad.is_finite()
                        && t_quad > 1e-3 * t
                        && t_quad < 1e4 * t
                        && (t_quad - t).abs() > 1e-9 * t
                    {
                        match trial(t_quad, &mut evals) {
                            Some((_, f_q, _)) if !f_q.is_finite() => {
                                non_finite_abort = true;
                                break 'outer;
                            }
                            Some((x_q, f_q, true)) if f_q < f_acc => {
                                accepted = Some((x_q, f_q));
                            }
                            _ => {}
                        }
                    }
                } else if steepest {
                    let mut t_grow = t;
                    for _ in 0..40 {
                        let best_f = accepted.as_ref().map(|(_, fb)| *fb).unwrap();
                        match trial(2.0 * t_grow, &mut evals) {
                            Some((_, f_g, _)) if !f_g.is_finite() => {
                                non_finite_abort = true;
                                break 'outer;
                            }
                            Some((x_g, f_g, true)) if f_g < best_f => {
                                accepted = Some((x_g, f_g));
                                t_grow *= 2.0;
                            }
                            _ => break,
                        }
                    }
                }
            }
            if accepted.is_some() {
                break;
            }
            history.clear();
        }

        let Some((x_new, f_new)) = accepted else {
            // No feasible decrease in any direction: converged to the
            // numerical floor, which is exactly what ftol expresses.
            termination = Termination::Ftol;
            break;
        };

        let mut x_next = x_new;
        let g_new = gradient(cost, &mut x_next, f_new, &mut evals);
        let s: Vec<f64> = x_next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            history.push_back((s, y, 1.0 / sy));
            if history.len() > config.memory {
                history.pop_front();
            }
        }

        let drop = f - f_new;
        let ftol_fired = drop <= config.ftol * f.abs().max(f_new.abs()).max(1.0);
        x = x_next;
        f = f_new;
        g = g_new;
        if ftol_fired {
            termination = Termination::Ftol;
            break;
        }
    }

    Ok(OptimizationResult {
        lambda_star: x,
        cost_star: f,
        iterations,
        termination,
        cost_evals: evals,
        start_clamped,
        non_finite_abort,
    })
}
