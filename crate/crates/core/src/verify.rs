//! Self-contained cross-checks of the circuit constructions against dense
//! and FFT oracles, exposed so the command-line tool can run them at a
//! chosen width.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{self, AnsatzParams};
use crate::cost::{self, CostContext};
use crate::error::{Error, Result};
use crate::solver::{self, Grid, WaveField};
use crate::statevector::{diff_up_to_global_phase, StateVector};

/// Outcome of one oracle comparison.
#[derive(Clone, Debug)]
pub struct CircuitCheck {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CircuitCheck {
    pub fn passed(&self) -> bool {
        self.max_deviation.is_finite() && self.max_deviation < self.tolerance
    }
}

fn random_params(rng: &mut ChaCha8Rng, n: usize, d: usize) -> AnsatzParams {
    let bounds = (-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI);
    let lambda = (0..AnsatzParams::parameter_count(n, d))
        .map(|_| rng.random_range(bounds.0..bounds.1))
        .collect();
    AnsatzParams::new(lambda, n, d, bounds).expect("generated in bounds")
}

/// Dense QFT unitary versus the DFT matrix, elementwise.
pub fn check_qft_against_dft(n: usize) -> Result<CircuitCheck> {
    let circuit = circuits::build_qft(n);
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    let mut max_dev: f64 = 0.0;
    for col in 0..dim {
        let mut sv = StateVector::basis_state(n, col)?;
        sv.apply_circuit(&circuit)?;
        for (row, amp) in sv.amplitudes().iter().enumerate() {
            let expect =
                Complex64::cis(2.0 * std::f64::consts::PI * (row * col) as f64 / dim as f64)
                    * scale;
            max_dev = max_dev.max((amp - expect).norm());
        }
    }
    Ok(CircuitCheck {
        name: "qft_matches_dft",
        max_deviation: max_dev,
        tolerance: 1e-12,
    })
}

/// The kinetic-phase circuit must act as `exp(i gamma (m - 2^(n-1))^2)` on
/// basis states, up to one global phase.
pub fn check_kinetic_phase_diagonal(n: usize, dt: f64) -> Result<CircuitCheck> {
    let spec = circuits::KineticPhaseSpec::for_timestep(n, dt)?;
    let circuit = circuits::build_kinetic_phase(&spec);
    let dim = 1usize << n;
    let half = (dim / 2) as f64;
    let mut diag = Vec::with_capacity(dim);
    let mut max_offdiag: f64 = 0.0;
    for col in 0..dim {
        let mut sv = StateVector::basis_state(n, col)?;
        sv.apply_circuit(&circuit)?;
        for (row, amp) in sv.amplitudes().iter().enumerate() {
            if row == col {
                diag.push(*amp);
            } else {
                max_offdiag = max_offdiag.max(amp.norm());
            }
        }
    }
    let expect: Vec<Complex64> = (0..dim)
        .map(|m| Complex64::cis(spec.gamma * (m as f64 - half).powi(2)))
        .collect();
    let dev = diff_up_to_global_phase(&diag, &expect).max(max_offdiag);
    Ok(CircuitCheck {
        name: "kinetic_phase_diagonal",
        max_deviation: dev,
        tolerance: 1e-12,
    })
}

/// State prepared by the composite trial-advance circuit versus the
/// classical FFT substep applied to the ansatz state, up to global phase.
pub fn check_tilde_u_against_fft(n: usize, dt: f64, draws: usize, seed: u64) -> Result<CircuitCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::for_qubits(n)?;
    let mut max_dev: f64 = 0.0;
    for _ in 0..draws {
        let params = random_params(&mut rng, n, 2);
        let circuit_state = circuits::build_tilde_u(&params, dt)?.state_from_zero()?;
        let ansatz_state = circuits::build_ansatz(&params).state_from_zero()?;
        let field = WaveField::new(ansatz_state.amplitudes().to_vec(), grid.clone(), 0.0)?;
        let classical = solver::implicit_substep(&field, dt);
        max_dev = max_dev.max(diff_up_to_global_phase(
            circuit_state.amplitudes(),
            &classical.psi,
        ));
    }
    Ok(CircuitCheck {
        name: "tilde_u_matches_fft_substep",
        max_deviation: max_dev,
        tolerance: 1e-10,
    })
}

/// Cost recombined from the Hadamard-test and nonlinear circuits versus
/// the direct amplitude evaluation.
pub fn check_cost_circuits_against_direct(
    n: usize,
    dt: f64,
    draws: usize,
    seed: u64,
) -> Result<CircuitCheck> {
    if 3 * n + 1 > crate::statevector::MAX_QUBITS {
        return Err(Error::Config(format!(
            "cost-circuit check needs 3n+1 qubits; n={n} is too wide"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..draws {
        let step = random_params(&mut rng, n, 2);
        let trial = random_params(&mut rng, n, 2);
        let ctx = CostContext::from_tilde_circuit(&step, dt, 1.0, 2.0)?;
        let direct = cost::cost_direct(&ctx, &trial)?;
        let assembled = cost::assemble_cost_from_circuits(&ctx, &step, &trial, dt)?;
        max_dev = max_dev.max((assembled - direct).abs());
    }
    Ok(CircuitCheck {
        name: "assembled_cost_matches_direct",
        max_deviation: max_dev,
        tolerance: 1e-9,
    })
}

/// The oracle suite behind `verify-circuits`: QFT, kinetic phase, the
/// composite substep circuit and the two cost circuits, all at width `n`.
pub fn verify_circuits(n: usize, seed: u64) -> Result<Vec<CircuitCheck>> {
    if !(2..=6).contains(&n) {
        return Err(Error::Config(format!(
            "circuit verification runs at n in 2..=6, got {n}"
        )));
    }
    let dt = 3e-3;
    let draws = if n <= 4 { 20 } else { 5 };
    Ok(vec![
        check_qft_against_dft(n)?,
        check_kinetic_phase_diagonal(n, dt)?,
        check_tilde_u_against_fft(n, dt, 20, seed)?,
        check_cost_circuits_against_direct(n, dt, draws, seed ^ 0x9e37_79b9)?,
    ])
}
