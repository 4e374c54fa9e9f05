//! Hybrid pseudospectral-variational solver for the one-dimensional
//! nonlinear Schrödinger equation `i dPsi/dt = -1/2 d^2Psi/dx^2 - s |Psi|^2 Psi`
//! on the periodic domain `[-pi, pi)`.
//!
//! Each time step splits into an exact Fourier-space advance of the
//! Laplacian and a first-order explicit advance of the cubic term. The
//! explicit part is recast as a state-matching problem: a box-constrained
//! quasi-Newton optimizer tunes a hardware-efficient ansatz circuit until
//! it reproduces the advanced state. An exact statevector emulator backs
//! the quantum side (ansatz, QFT, kinetic-phase and cost-evaluation
//! circuits); a classical split-step solver provides the baselines and the
//! analytic-soliton oracle every comparison is measured against.
//!
//! - [`statevector`]: dense amplitudes, gate kernels, circuit IR.
//! - [`circuits`]: ansatz, conjugate ansatz, QFT, kinetic phase, composite
//!   trial-advance circuit.
//! - [`solver`]: grid, soliton oracles, split-step integrator, RMSE.
//! - [`cost`]: the per-step cost, direct and via circuits.
//! - [`optimizer`]: box-constrained limited-memory quasi-Newton search.
//! - [`driver`]: run orchestration, sweeps, records.
//! - [`report`]: CSV/JSON emission.
//! - [`verify`]: oracle suite for circuit cross-checks.

pub mod circuits;
pub mod cost;
pub mod driver;
mod error;
pub mod optimizer;
pub mod report;
pub mod solver;
pub mod statevector;
pub mod verify;

pub use circuits::{AnsatzParams, KineticPhaseSpec};
pub use cost::CostContext;
pub use driver::{
    Reconstruction, RunConfig, RunMode, RunRecord, Snapshot, StepRecord, SubstepRoute,
};
pub use error::{Error, Result};
pub use optimizer::{OptimizationResult, OptimizerConfig, SeedMode, Termination};
pub use report::OutputFormat;
pub use solver::{Grid, SolitonSpec, WaveField};
pub use statevector::{CircuitSpec, Gate, StateVector};
