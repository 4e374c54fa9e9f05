//! The per-step cost function, evaluated three ways: direct amplitude
//! arithmetic (the fast path used inside the optimizer), a one-ancilla
//! Hadamard test for the linear overlap term, and the three-register
//! nonlinear processing circuit for the cubic term.
//!
//! With `p = s dt (2a/dx)` and trial state `psi' = U(lambda')|0>`,
//!
//! ```text
//! C(lambda') = p * Im{ sum_j conj(psi'_j) psi~_j |psi~_j|^2 }
//!            - Re{ sum_j conj(psi'_j) psi~_j }
//! ```
//!
//! The circuit evaluations reproduce exactly these two sums, so
//! `p * qnpu - hadamard` matches the direct value to solver precision
//! whenever the context's `psi~` is the circuit-prepared one. Both circuit
//! branches go through the same tilde-U builder, so its global phase
//! cancels in every interference term.

use num_complex::Complex64;

use crate::circuits::{self, AnsatzParams};
use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector, MAX_QUBITS};

/// Everything fixed during one time step's optimization: the post-substep
/// state `psi~`, the nonlinear prefactor `s dt (2a/dx)` and the ansatz
/// shape used for trial states.
#[derive(Clone, Debug)]
pub struct CostContext {
    psi_tilde: StateVector,
    prefactor: f64,
    n: usize,
    d: usize,
}

impl CostContext {
    /// Build from an already-computed `psi~` (e.g. the classical FFT
    /// pipeline applied to the previous state).
    pub fn new(psi_tilde: StateVector, d: usize, s: f64, dt: f64, a: f64) -> Result<CostContext> {
        let n = psi_tilde.qubit_count();
        let m = 1usize << n;
        let dx = crate::solver::DOMAIN_LENGTH / m as f64;
        let prefactor = s * dt * 2.0 * a / dx;
        if !prefactor.is_finite() {
            return Err(Error::Input(format!(
                "non-finite cost prefactor from s={s}, dt={dt}, a={a}"
            )));
        }
        Ok(CostContext {
            psi_tilde,
            prefactor,
            n,
            d,
        })
    }

    /// Build with `psi~` prepared by the tilde-U circuit itself. This is
    /// the context under which the circuit evaluations agree with
    /// [`cost_direct`] including the builder's global phase.
    pub fn from_tilde_circuit(
        lambda_t: &AnsatzParams,
        dt: f64,
        s: f64,
        a: f64,
    ) -> Result<CostContext> {
        let psi_tilde = circuits::build_tilde_u(lambda_t, dt)?.state_from_zero()?;
        CostContext::new(psi_tilde, lambda_t.depth(), s, dt, a)
    }

    pub fn psi_tilde(&self) -> &StateVector {
        &self.psi_tilde
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    fn check_params(&self, params: &AnsatzParams, role: &str) -> Result<()> {
        if params.qubit_count() != self.n || params.depth() != self.d {
            return Err(Error::Usage(format!(
                "{role} parameters are shaped for n={}, d={} but the context has n={}, d={}",
                params.qubit_count(),
                params.depth(),
                self.n,
                self.d
            )));
        }
        Ok(())
    }
}

/// Direct evaluation of the cost at a raw angle slice (length-checked
/// only); this is the closure handed to the optimizer.
pub fn cost_direct_lambda(ctx: &CostContext, lambda: &[f64]) -> Result<f64> {
    let trial_state = circuits::ansatz_state(ctx.n, ctx.d, lambda)?;
    let mut linear = Complex64::ZERO;
    let mut cubic = Complex64::ZERO;
    for (trial, tilde) in trial_state.amplitudes().iter().zip(ctx.psi_tilde.amplitudes()) {
        let overlap = trial.conj() * tilde;
        linear += overlap;
        cubic += overlap * tilde.norm_sqr();
    }
    Ok(ctx.prefactor * cubic.im - linear.re)
}

/// Direct evaluation of the cost at validated ansatz parameters.
pub fn cost_direct(ctx: &CostContext, trial: &AnsatzParams) -> Result<f64> {
    ctx.check_params(trial, "trial")?;
    cost_direct_lambda(ctx, trial.lambda())
}

/// Linear term via a Hadamard test on one ancilla: with
/// `V = U(trial)^dagger U~(lambda_t)` applied under ancilla control, the
/// ancilla Z expectation is `Re<psi(trial)|psi~(t)>`.
pub fn linear_term_hadamard(
    ctx: &CostContext,
    lambda_t: &AnsatzParams,
    trial: &AnsatzParams,
    dt: f64,
) -> Result<f64> {
    ctx.check_params(lambda_t, "step")?;
    ctx.check_params(trial, "trial")?;
    let n = ctx.n;
    let ancilla = n;
    let mut interferometer = circuits::build_tilde_u(lambda_t, dt)?;
    interferometer.extend(&circuits::build_ansatz(trial).adjoint());
    let embedded = interferometer.embedded(0, n + 1)?;

    let mut sv = StateVector::zero_state(n + 1)?;
    sv.apply_gate(&Gate::H { qubit: ancilla })?;
    sv.apply_circuit_controlled(&embedded, ancilla)?;
    sv.apply_gate(&Gate::H { qubit: ancilla })?;
    sv.ancilla_z_expectation(ancilla)
}

/// Cubic term via the three-register nonlinear processing circuit: two
/// tilde-U registers, one conjugate-trial register, Toffoli fan-ins from
/// the first register onto the other two, and an S-dagger on the ancilla
/// so the Z expectation reads off the imaginary part
/// `Im{ sum_j conj(psi'_j) |psi~_j|^2 psi~_j }`.
pub fn nonlinear_term_qnpu(
    ctx: &CostContext,
    lambda_t: &AnsatzParams,
    trial: &AnsatzParams,
    dt: f64,
) -> Result<f64> {
    ctx.check_params(lambda_t, "step")?;
    ctx.check_params(trial, "trial")?;
    let n = ctx.n;
    let width = 3 * n + 1;
    if width > MAX_QUBITS {
        return Err(Error::Config(format!(
            "nonlinear cost circuit needs 3n+1 = {width} qubits, above the {MAX_QUBITS} limit"
        )));
    }
    let ancilla = 3 * n;
    let tilde = circuits::build_tilde_u(lambda_t, dt)?;
    let conj_trial = circuits::build_ansatz_conjugate(trial);

    let mut sv = StateVector::zero_state(width)?;
    sv.apply_gate(&Gate::H { qubit: ancilla })?;
    sv.apply_gate(&Gate::Sdg { qubit: ancilla })?;
    sv.apply_circuit(&tilde.embedded(0, width)?)?;
    sv.apply_circuit_controlled(&tilde.embedded(n, width)?, ancilla)?;
    sv.apply_circuit_controlled(&conj_trial.embedded(2 * n, width)?, ancilla)?;
    for q in 0..n {
        sv.apply_gate(&Gate::Toffoli {
            controls: [ancilla, q],
            target: n + q,
        })?;
    }
    for q in 0..n {
        sv.apply_gate(&Gate::Toffoli {
            controls: [ancilla, q],
            target: 2 * n + q,
        })?;
    }
    sv.apply_gate(&Gate::H { qubit: ancilla })?;
    sv.ancilla_z_expectation(ancilla)
}

/// Cost recombined from the two circuit measurements:
/// `prefactor * qnpu - hadamard`. Equals [`cost_direct`] to 1e-9 when the
/// context was built with [`CostContext::from_tilde_circuit`] for the same
/// `lambda_t` and `dt`.
pub fn assemble_cost_from_circuits(
    ctx: &CostContext,
    lambda_t: &AnsatzParams,
    trial: &AnsatzParams,
    dt: f64,
) -> Result<f64> {
    let cubic = nonlinear_term_qnpu(ctx, lambda_t, trial, dt)?;
    let linear = linear_term_hadamard(ctx, lambda_t, trial, dt)?;
    Ok(ctx.prefactor * cubic - linear)
}

/// Diagnostic: squared overlap between the trial state and the normalized
/// explicit-substep target `F psi~ / ||F psi~||` with
/// `F = diag(1 + i p |psi~_j|^2)`. A perfect minimization drives this
/// to one; at `s = 0` it reduces to plain state fidelity.
pub fn target_fidelity(ctx: &CostContext, trial: &AnsatzParams) -> Result<f64> {
    ctx.check_params(trial, "trial")?;
    let trial_state = circuits::ansatz_state(ctx.n, ctx.d, trial.lambda())?;
    let target: Vec<Complex64> = ctx
        .psi_tilde
        .amplitudes()
        .iter()
        .map(|&t| t * Complex64::new(1.0, ctx.prefactor * t.norm_sqr()))
        .collect();
    let target = StateVector::normalized(target)?;
    let overlap = trial_state.inner_product(&target)?;
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}
