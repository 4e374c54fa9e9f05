//! Dense statevector simulation of quantum circuits.
//!
//! Qubit 0 is the least significant bit of a basis-state index, so for a
//! two-qubit register the amplitude at index 2 belongs to `|q1=1, q0=0>`.
//! Gates are applied in place over strided amplitude pairs; the full
//! `2^q x 2^q` unitary is never materialized outside of oracle tests.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Widest register this build will allocate (dense amplitudes).
pub const MAX_QUBITS: usize = 24;

/// Largest elementwise distance between two amplitude vectors after
/// rotating `b` by the single global phase that aligns its
/// largest-modulus component with `a`.
pub fn diff_up_to_global_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "comparing vectors of different length");
    let mut ref_idx = 0;
    let mut ref_mod = 0.0;
    for (idx, amp) in b.iter().enumerate() {
        if amp.norm_sqr() > ref_mod {
            ref_mod = amp.norm_sqr();
            ref_idx = idx;
        }
    }
    let phase = if ref_mod > 0.0 && a[ref_idx].norm_sqr() > 0.0 {
        let rel = a[ref_idx] / b[ref_idx];
        rel / rel.norm()
    } else {
        Complex64::ONE
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// A single gate application: kind, addressed qubits (controls before
/// target) and, where applicable, a rotation/phase angle in radians.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// exp(-i theta X / 2)
    Rx { qubit: usize, angle: f64 },
    /// exp(-i theta Z / 2)
    Rz { qubit: usize, angle: f64 },
    H { qubit: usize },
    X { qubit: usize },
    /// diag(1, -i)
    Sdg { qubit: usize },
    /// diag(1, e^{i theta})
    Phase { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    /// Symmetric in control/target: phases `|11>` by e^{i theta}.
    CPhase { control: usize, target: usize, angle: f64 },
    Toffoli { controls: [usize; 2], target: usize },
    Swap { qubits: [usize; 2] },
}

impl Gate {
    /// Qubit indices touched by this gate, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit }
            | Gate::X { qubit }
            | Gate::Sdg { qubit }
            | Gate::Phase { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::CPhase {
                control, target, ..
            } => vec![control, target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], target],
            Gate::Swap { qubits } => vec![qubits[0], qubits[1]],
        }
    }

    /// The inverse gate. Self-inverse kinds map to themselves; rotations
    /// and phases negate their angle; S-dagger inverts to Phase(pi/2).
    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx {
                qubit,
                angle: -angle,
            },
            Gate::Rz { qubit, angle } => Gate::Rz {
                qubit,
                angle: -angle,
            },
            Gate::H { qubit } => Gate::H { qubit },
            Gate::X { qubit } => Gate::X { qubit },
            Gate::Sdg { qubit } => Gate::Phase {
                qubit,
                angle: std::f64::consts::FRAC_PI_2,
            },
            Gate::Phase { qubit, angle } => Gate::Phase {
                qubit,
                angle: -angle,
            },
            Gate::Cnot { control, target } => Gate::Cnot { control, target },
            Gate::CPhase {
                control,
                target,
                angle,
            } => Gate::CPhase {
                control,
                target,
                angle: -angle,
            },
            Gate::Toffoli { controls, target } => Gate::Toffoli { controls, target },
            Gate::Swap { qubits } => Gate::Swap { qubits },
        }
    }

    /// Same gate with every qubit index shifted up by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx {
                qubit: qubit + offset,
                angle,
            },
            Gate::Rz { qubit, angle } => Gate::Rz {
                qubit: qubit + offset,
                angle,
            },
            Gate::H { qubit } => Gate::H {
                qubit: qubit + offset,
            },
            Gate::X { qubit } => Gate::X {
                qubit: qubit + offset,
            },
            Gate::Sdg { qubit } => Gate::Sdg {
                qubit: qubit + offset,
            },
            Gate::Phase { qubit, angle } => Gate::Phase {
                qubit: qubit + offset,
                angle,
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control + offset,
                target: target + offset,
            },
            Gate::CPhase {
                control,
                target,
                angle,
            } => Gate::CPhase {
                control: control + offset,
                target: target + offset,
                angle,
            },
            Gate::Toffoli { controls, target } => Gate::Toffoli {
                controls: [controls[0] + offset, controls[1] + offset],
                target: target + offset,
            },
            Gate::Swap { qubits } => Gate::Swap {
                qubits: [qubits[0] + offset, qubits[1] + offset],
            },
        }
    }

    fn validate(&self, qubit_count: usize) -> Result<()> {
        // Allocation-free: this runs once per gate application.
        let (a, b, c) = match *self {
            Gate::Rx { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit }
            | Gate::X { qubit }
            | Gate::Sdg { qubit }
            | Gate::Phase { qubit, .. } => (qubit, usize::MAX, usize::MAX),
            Gate::Cnot { control, target } => (control, target, usize::MAX),
            Gate::CPhase {
                control, target, ..
            } => (control, target, usize::MAX),
            Gate::Toffoli { controls, target } => (controls[0], controls[1], target),
            Gate::Swap { qubits } => (qubits[0], qubits[1], usize::MAX),
        };
        let in_range = |q: usize| q == usize::MAX || q < qubit_count;
        if !(in_range(a) && in_range(b) && in_range(c)) {
            return Err(Error::Usage(format!(
                "gate {self:?} addresses a qubit outside the {qubit_count}-qubit register"
            )));
        }
        if a == b || (c != usize::MAX && (a == c || b == c)) {
            return Err(Error::Usage(format!(
                "gate {self:?} addresses the same qubit more than once"
            )));
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed-width register; the circuit IR shared
/// by the ansatz, QFT, kinetic-phase and cost-evaluation builders.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    gates: Vec<Gate>,
    qubit_count: usize,
}

impl CircuitSpec {
    pub fn new(qubit_count: usize) -> Self {
        CircuitSpec {
            gates: Vec::new(),
            qubit_count,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// Append all gates of `other` (which must not be wider than `self`).
    pub fn extend(&mut self, other: &CircuitSpec) {
        self.gates.extend_from_slice(&other.gates);
    }

    /// The inverse circuit: gates reversed, each replaced by its adjoint.
    pub fn adjoint(&self) -> CircuitSpec {
        CircuitSpec {
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            qubit_count: self.qubit_count,
        }
    }

    /// Apply the circuit to `|0...0>` and return the resulting state.
    pub fn state_from_zero(&self) -> Result<StateVector> {
        let mut sv = StateVector::zero_state(self.qubit_count)?;
        sv.apply_circuit(self)?;
        Ok(sv)
    }

    /// Re-address the circuit onto qubits `offset..offset + qubit_count`
    /// of a wider `total`-qubit register.
    pub fn embedded(&self, offset: usize, total: usize) -> Result<CircuitSpec> {
        if offset + self.qubit_count > total {
            return Err(Error::Usage(format!(
                "cannot embed a {}-qubit circuit at offset {offset} into {total} qubits",
                self.qubit_count
            )));
        }
        Ok(CircuitSpec {
            gates: self.gates.iter().map(|g| g.shifted(offset)).collect(),
            qubit_count: total,
        })
    }
}

/// Dense complex amplitudes of a `qubit_count`-qubit register, kept at unit
/// L2 norm by construction and by unitarity of every gate.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    qubit_count: usize,
}

impl StateVector {
    /// `|0...0>` on `qubit_count` qubits.
    pub fn zero_state(qubit_count: usize) -> Result<StateVector> {
        if qubit_count == 0 || qubit_count > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count {qubit_count} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        let mut amps = vec![Complex64::ZERO; 1 << qubit_count];
        amps[0] = Complex64::ONE;
        Ok(StateVector { amps, qubit_count })
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(qubit_count: usize, index: usize) -> Result<StateVector> {
        let mut sv = StateVector::zero_state(qubit_count)?;
        if index >= sv.amps.len() {
            return Err(Error::Usage(format!(
                "basis index {index} out of range for {qubit_count} qubits"
            )));
        }
        sv.amps[0] = Complex64::ZERO;
        sv.amps[index] = Complex64::ONE;
        Ok(sv)
    }

    /// Wrap an amplitude vector that is already normalized (within 1e-8).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Usage(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let qubit_count = len.trailing_zeros() as usize;
        if qubit_count > MAX_QUBITS {
            return Err(Error::Config(format!(
                "amplitude vector implies {qubit_count} qubits, above the {MAX_QUBITS} limit"
            )));
        }
        let sv = StateVector { amps, qubit_count };
        let norm = sv.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Usage(format!(
                "amplitude vector has norm {norm}, expected 1"
            )));
        }
        Ok(sv)
    }

    /// Wrap an arbitrary nonzero amplitude vector, rescaling to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<StateVector> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Input(format!(
                "cannot normalize amplitude vector with norm {norm}"
            )));
        }
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::from_amplitudes(amps)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.qubit_count != other.qubit_count {
            return Err(Error::Usage(format!(
                "inner product between {} and {} qubits",
                self.qubit_count, other.qubit_count
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Z expectation value of one qubit: sum of |amp|^2 signed by that
    /// qubit's bit (+ for 0, - for 1). Clamped to [-1, 1] against roundoff.
    pub fn ancilla_z_expectation(&self, ancilla: usize) -> Result<f64> {
        if ancilla >= self.qubit_count {
            return Err(Error::Usage(format!(
                "ancilla index {ancilla} out of range for {} qubits",
                self.qubit_count
            )));
        }
        let bit = 1usize << ancilla;
        let mut z = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if idx & bit == 0 {
                z += p;
            } else {
                z -= p;
            }
        }
        Ok(z.clamp(-1.0, 1.0))
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        self.dispatch(gate, 0);
        Ok(())
    }

    /// Apply `gate` conditioned on an extra control qubit being `|1>`.
    ///
    /// This is the kernel-level realization of controlled-U used by the
    /// Hadamard-test and QNPU evaluations: every kernel simply restricts
    /// its strided sweep to indices where the control bit is set.
    pub fn apply_gate_controlled(&mut self, gate: &Gate, control: usize) -> Result<()> {
        gate.validate(self.qubit_count)?;
        if control >= self.qubit_count {
            return Err(Error::Usage(format!(
                "control index {control} out of range for {} qubits",
                self.qubit_count
            )));
        }
        if gate.qubits().contains(&control) {
            return Err(Error::Usage(format!(
                "control qubit {control} collides with gate {gate:?}"
            )));
        }
        self.dispatch(gate, 1usize << control);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &CircuitSpec) -> Result<()> {
        if circuit.qubit_count != self.qubit_count {
            return Err(Error::Usage(format!(
                "circuit width {} does not match state width {}",
                circuit.qubit_count, self.qubit_count
            )));
        }
        for gate in &circuit.gates {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// Apply every gate of `circuit` under one extra control qubit.
    pub fn apply_circuit_controlled(&mut self, circuit: &CircuitSpec, control: usize) -> Result<()> {
        if circuit.qubit_count != self.qubit_count {
            return Err(Error::Usage(format!(
                "circuit width {} does not match state width {}",
                circuit.qubit_count, self.qubit_count
            )));
        }
        for gate in &circuit.gates {
            self.apply_gate_controlled(gate, control)?;
        }
        Ok(())
    }

    fn dispatch(&mut self, gate: &Gate, ctrl_mask: usize) {
        match *gate {
            Gate::Rx { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let ms = Complex64::new(0.0, -s);
                self.kernel_1q(qubit, [Complex64::new(c, 0.0), ms, ms, Complex64::new(c, 0.0)], ctrl_mask);
            }
            Gate::Rz { qubit, angle } => {
                let half = angle / 2.0;
                self.kernel_diag(qubit, Complex64::cis(-half), Complex64::cis(half), ctrl_mask);
            }
            Gate::H { qubit } => {
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.kernel_1q(qubit, [r, r, r, -r], ctrl_mask);
            }
            Gate::X { qubit } => self.kernel_flip(qubit, ctrl_mask),
            Gate::Sdg { qubit } => {
                self.kernel_diag(qubit, Complex64::ONE, Complex64::new(0.0, -1.0), ctrl_mask)
            }
            Gate::Phase { qubit, angle } => {
                self.kernel_select_phase((1 << qubit) | ctrl_mask, Complex64::cis(angle))
            }
            Gate::Cnot { control, target } => self.kernel_flip(target, (1 << control) | ctrl_mask),
            Gate::CPhase {
                control,
                target,
                angle,
            } => self.kernel_select_phase((1 << control) | (1 << target) | ctrl_mask, Complex64::cis(angle)),
            Gate::Toffoli { controls, target } => self.kernel_flip(
                target,
                (1 << controls[0]) | (1 << controls[1]) | ctrl_mask,
            ),
            Gate::Swap { qubits } => self.kernel_swap(qubits[0], qubits[1], ctrl_mask),
        }
    }

    /// General 2x2 unitary on one qubit, restricted to indices whose bits
    /// cover `ctrl_mask`. The control bits never include the target, so the
    /// mask test on the low pair index decides for the whole pair.
    fn kernel_1q(&mut self, qubit: usize, u: [Complex64; 4], ctrl_mask: usize) {
        let bit = 1usize << qubit;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i0 in base..base + bit {
                if i0 & ctrl_mask == ctrl_mask {
                    let i1 = i0 | bit;
                    let a0 = self.amps[i0];
                    let a1 = self.amps[i1];
                    self.amps[i0] = u[0] * a0 + u[1] * a1;
                    self.amps[i1] = u[2] * a0 + u[3] * a1;
                }
            }
            base += bit << 1;
        }
    }

    /// diag(d0, d1) on one qubit under a control mask.
    fn kernel_diag(&mut self, qubit: usize, d0: Complex64, d1: Complex64, ctrl_mask: usize) {
        let bit = 1usize << qubit;
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & ctrl_mask == ctrl_mask {
                *amp *= if idx & bit == 0 { d0 } else { d1 };
            }
        }
    }

    /// Multiply amplitudes whose indices have every `sel_mask` bit set.
    fn kernel_select_phase(&mut self, sel_mask: usize, phase: Complex64) {
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & sel_mask == sel_mask {
                *amp *= phase;
            }
        }
    }

    /// X on `target` (optionally multiply-controlled via the mask).
    fn kernel_flip(&mut self, target: usize, ctrl_mask: usize) {
        let bit = 1usize << target;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i0 in base..base + bit {
                if i0 & ctrl_mask == ctrl_mask {
                    self.amps.swap(i0, i0 | bit);
                }
            }
            base += bit << 1;
        }
    }

    fn kernel_swap(&mut self, a: usize, b: usize, ctrl_mask: usize) {
        let (bit_a, bit_b) = (1usize << a, 1usize << b);
        for idx in 0..self.amps.len() {
            if idx & bit_a != 0 && idx & bit_b == 0 && idx & ctrl_mask == ctrl_mask {
                self.amps.swap(idx, idx ^ (bit_a | bit_b));
            }
        }
    }
}
