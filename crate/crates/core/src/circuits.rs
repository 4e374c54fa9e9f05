//! Builders for the parameterized ansatz, its complex conjugate, the QFT,
//! the diagonal kinetic-phase unitary and the composite implicit-substep
//! circuit.
//!
//! All builders are pure functions returning [`CircuitSpec`]s. Comparisons
//! between circuit states and the classical FFT pipeline are made up to one
//! global phase: the kinetic-phase product realizes its diagonal only up to
//! the constant `gamma * 2^(2n-2)` term, which cancels in every
//! interference term because both cost branches go through the same
//! builder.

use crate::error::{Error, Result};
use crate::statevector::{CircuitSpec, Gate, StateVector};

/// Rotation angles for the hardware-efficient ansatz of width `n` and
/// depth `d` (number of CNOT-ring-plus-rotation blocks after the initial
/// rotation layer), with a common box bound on every component.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzParams {
    lambda: Vec<f64>,
    n: usize,
    d: usize,
    bounds: (f64, f64),
}

impl AnsatzParams {
    /// 2n(d+1): one RX and one RZ angle per qubit per rotation layer.
    pub fn parameter_count(n: usize, d: usize) -> usize {
        2 * n * (d + 1)
    }

    pub fn new(lambda: Vec<f64>, n: usize, d: usize, bounds: (f64, f64)) -> Result<AnsatzParams> {
        if n < 2 {
            return Err(Error::Usage(format!(
                "ansatz needs at least 2 qubits for the CNOT ring, got {n}"
            )));
        }
        let expected = Self::parameter_count(n, d);
        if lambda.len() != expected {
            return Err(Error::Usage(format!(
                "ansatz with n={n}, d={d} takes {expected} parameters, got {}",
                lambda.len()
            )));
        }
        let (lo, hi) = bounds;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Usage(format!("invalid bounds ({lo}, {hi})")));
        }
        if let Some(bad) = lambda.iter().find(|l| !(lo..=hi).contains(*l)) {
            return Err(Error::Usage(format!(
                "parameter {bad} outside bounds [{lo}, {hi}]"
            )));
        }
        Ok(AnsatzParams {
            lambda,
            n,
            d,
            bounds,
        })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }
}

/// Width and angle scale of the kinetic-phase unitary; `gamma = -dt/2`
/// for a physical time step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticPhaseSpec {
    pub n: usize,
    pub gamma: f64,
}

impl KineticPhaseSpec {
    pub fn new(n: usize, gamma: f64) -> Result<KineticPhaseSpec> {
        if n == 0 {
            return Err(Error::Usage("kinetic phase needs at least 1 qubit".into()));
        }
        if !gamma.is_finite() {
            return Err(Error::Usage(format!("gamma must be finite, got {gamma}")));
        }
        Ok(KineticPhaseSpec { n, gamma })
    }

    pub fn for_timestep(n: usize, dt: f64) -> Result<KineticPhaseSpec> {
        KineticPhaseSpec::new(n, -dt / 2.0)
    }
}

/// The hardware-efficient ansatz: an RX layer then an RZ layer (angle index
/// increasing with qubit index), followed by `d` blocks of a CNOT ring
/// (0->1, ..., n-2 -> n-1, n-1 -> 0) plus fresh RX and RZ layers.
pub fn build_ansatz(params: &AnsatzParams) -> CircuitSpec {
    build_ansatz_signed(params, 1.0)
}

/// Same structure as [`build_ansatz`] with every rotation angle negated;
/// prepares the elementwise complex conjugate state (CNOT is real).
pub fn build_ansatz_conjugate(params: &AnsatzParams) -> CircuitSpec {
    build_ansatz_signed(params, -1.0)
}

fn build_ansatz_signed(params: &AnsatzParams, sign: f64) -> CircuitSpec {
    let mut circuit = CircuitSpec::new(params.n);
    for_each_ansatz_gate(params.n, params.d, &params.lambda, sign, |gate| {
        circuit.push(gate)
    });
    circuit
}

/// Walk the ansatz gate sequence without materializing a circuit; the one
/// definition of layer structure and parameter consumption order.
fn for_each_ansatz_gate<F: FnMut(Gate)>(n: usize, d: usize, lambda: &[f64], sign: f64, mut emit: F) {
    let mut next = 0usize;
    let rotation_layer = |emit: &mut F, next: &mut usize| {
        for qubit in 0..n {
            emit(Gate::Rx {
                qubit,
                angle: sign * lambda[*next],
            });
            *next += 1;
        }
        for qubit in 0..n {
            emit(Gate::Rz {
                qubit,
                angle: sign * lambda[*next],
            });
            *next += 1;
        }
    };
    rotation_layer(&mut emit, &mut next);
    for _ in 0..d {
        for qubit in 0..n - 1 {
            emit(Gate::Cnot {
                control: qubit,
                target: qubit + 1,
            });
        }
        emit(Gate::Cnot {
            control: n - 1,
            target: 0,
        });
        rotation_layer(&mut emit, &mut next);
    }
    debug_assert_eq!(next, lambda.len());
}

/// Prepare `U(lambda)|0...0>` straight from a raw angle slice, validating
/// only the slice length. The box bounds are deliberately not enforced
/// here: the optimizer's finite-difference probes sit a step width outside
/// the box when a component rides its bound.
pub fn ansatz_state(n: usize, d: usize, lambda: &[f64]) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::Usage(format!(
            "ansatz needs at least 2 qubits for the CNOT ring, got {n}"
        )));
    }
    let expected = AnsatzParams::parameter_count(n, d);
    if lambda.len() != expected {
        return Err(Error::Usage(format!(
            "ansatz with n={n}, d={d} takes {expected} parameters, got {}",
            lambda.len()
        )));
    }
    let mut sv = StateVector::zero_state(n)?;
    for_each_ansatz_gate(n, d, lambda, 1.0, |gate| {
        sv.apply_gate(&gate).expect("ansatz gates are in range")
    });
    Ok(sv)
}

/// Standard QFT: Hadamard plus controlled-phase cascade, closed by the
/// qubit-reversal swaps, equal to the unitary DFT with entries
/// `exp(2 pi i jk / 2^n) / 2^(n/2)`.
pub fn build_qft(n: usize) -> CircuitSpec {
    let mut circuit = CircuitSpec::new(n);
    for target in (0..n).rev() {
        circuit.push(Gate::H { qubit: target });
        for control in (0..target).rev() {
            circuit.push(Gate::CPhase {
                control,
                target,
                angle: std::f64::consts::PI / (1u64 << (target - control)) as f64,
            });
        }
    }
    for low in 0..n / 2 {
        circuit.push(Gate::Swap {
            qubits: [low, n - 1 - low],
        });
    }
    circuit
}

/// Diagonal kinetic-phase unitary from n^2 phase factors: `P(i)` with angle
/// `gamma (2^{2i} - 2^{n+i})` on the diagonal and `CP(i,j)` with angle
/// `gamma 2^{i+j}` off it. Multiplies `|m>` by `exp(i gamma (m - 2^{n-1})^2)`
/// up to the constant-phase term `gamma 2^{2n-2}`.
pub fn build_kinetic_phase(spec: &KineticPhaseSpec) -> CircuitSpec {
    let (n, gamma) = (spec.n, spec.gamma);
    let mut circuit = CircuitSpec::new(n);
    let pow2 = |e: usize| (1u64 << e) as f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                circuit.push(Gate::Phase {
                    qubit: i,
                    angle: gamma * (pow2(2 * i) - pow2(n + i)),
                });
            } else {
                circuit.push(Gate::CPhase {
                    control: i,
                    target: j,
                    angle: gamma * pow2(i + j),
                });
            }
        }
    }
    circuit
}

/// The implicit (Fourier) substep as a circuit on `n` qubits:
/// `QFT^dagger X(n-1) U_ph X(n-1) QFT`. The X pair flips the most
/// significant address bit, swapping spectrum halves so the phase is
/// applied at the signed wavenumber `k = j - M/2`.
pub fn build_implicit_substep(n: usize, dt: f64) -> Result<CircuitSpec> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::Usage(format!(
            "time step must be finite and nonnegative, got {dt}"
        )));
    }
    let qft = build_qft(n);
    let shift = Gate::X { qubit: n - 1 };
    let mut circuit = CircuitSpec::new(n);
    circuit.extend(&qft);
    circuit.push(shift.clone());
    circuit.extend(&build_kinetic_phase(&KineticPhaseSpec::for_timestep(
        n, dt,
    )?));
    circuit.push(shift);
    circuit.extend(&qft.adjoint());
    Ok(circuit)
}

/// The full trial-advance circuit `U~(lambda) = [implicit substep] U(lambda)`;
/// applied to `|0...0>` it prepares the post-substep state for the cost
/// function.
pub fn build_tilde_u(params: &AnsatzParams, dt: f64) -> Result<CircuitSpec> {
    let mut circuit = build_ansatz(params);
    circuit.extend(&build_implicit_substep(params.n, dt)?);
    Ok(circuit)
}
