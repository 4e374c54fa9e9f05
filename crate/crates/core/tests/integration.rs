//! Cross-module behavior: optimizer-driven cost diagnostics, the circuit
//! substep route, and qualitative run physics.

use std::f64::consts::PI;

use nlse_vqa_core::circuits::AnsatzParams;
use nlse_vqa_core::cost::{self, CostContext};
use nlse_vqa_core::driver::{self, Reconstruction, RunConfig, RunMode, SubstepRoute};
use nlse_vqa_core::optimizer::{self, OptimizerConfig, SeedMode};
use nlse_vqa_core::solver::{self, Grid, SolitonSpec, WaveField};
use nlse_vqa_core::statevector::StateVector;

const BOUNDS: (f64, f64) = (-2.0 * PI, 2.0 * PI);

fn canonical_psi_tilde(n: usize, dt: f64) -> StateVector {
    let grid = Grid::for_qubits(n).unwrap();
    let spec = SolitonSpec::new(2.0, 10.0, -1.0, 1.0).unwrap();
    let ic = solver::initial_condition(&spec, &grid);
    let state = StateVector::normalized(ic.psi).unwrap();
    let field = WaveField::new(state.amplitudes().to_vec(), grid, 0.0).unwrap();
    StateVector::from_amplitudes(solver::implicit_substep(&field, dt).psi).unwrap()
}

fn optimize(ctx: &CostContext, n: usize, d: usize, seed: u64, ftol: f64) -> AnsatzParams {
    let x0 = optimizer::seed_parameters(n, d, SeedMode::Random, None, seed, BOUNDS).unwrap();
    let config = OptimizerConfig {
        ftol,
        bounds: BOUNDS,
        ..OptimizerConfig::default()
    };
    let result = optimizer::minimize(
        |lambda| cost::cost_direct_lambda(ctx, lambda).unwrap_or(f64::NAN),
        &x0,
        &config,
    )
    .unwrap();
    AnsatzParams::new(result.lambda_star, n, d, BOUNDS).unwrap()
}

#[test]
fn overdetermined_optimization_reaches_the_substep_target() {
    // n=2, d=3: 16 parameters for 8 real unknowns.
    let (n, d, dt) = (2usize, 3usize, 3e-3);
    let ctx = CostContext::new(canonical_psi_tilde(n, dt), d, 1.0, dt, 2.0).unwrap();
    let best = optimize(&ctx, n, d, 3, 1e-13);
    let fidelity = cost::target_fidelity(&ctx, &best).unwrap();
    assert!(fidelity > 1.0 - 1e-6, "fidelity {fidelity}");
}

#[test]
fn underdetermined_depth_cannot_represent_the_target() {
    // n=6, d=8: 108 parameters for 128 real unknowns.
    let (n, d, dt) = (6usize, 8usize, 3e-3);
    let ctx = CostContext::new(canonical_psi_tilde(n, dt), d, 1.0, dt, 2.0).unwrap();
    let best = optimize(&ctx, n, d, 5, 1e-12);
    let fidelity = cost::target_fidelity(&ctx, &best).unwrap();
    assert!(fidelity < 1.0 - 1e-6, "fidelity {fidelity}");
    assert!(fidelity > 0.5, "fidelity {fidelity} suspiciously low");
}

#[test]
fn first_step_state_matches_normalized_classical_step() {
    let config = RunConfig {
        n: 4,
        d: 3,
        dt: 3e-3,
        num_steps: 1,
        s: 1.0,
        a: 2.0,
        v: 2.0,
        x0: -1.0,
        seed: 3,
        ftol: 1e-13,
        bounds: BOUNDS,
        mode: RunMode::Vqa,
        output_times: vec![],
    };
    let record = driver::run_vqa(&config).unwrap();
    let lambda = record.steps[1].lambda_star.as_ref().unwrap();
    let state = nlse_vqa_core::circuits::ansatz_state(config.n, config.d, lambda).unwrap();

    let grid = Grid::for_qubits(config.n).unwrap();
    let spec = SolitonSpec::new(config.a, config.v, config.x0, config.s).unwrap();
    let ic = solver::initial_condition(&spec, &grid);
    let nc = solver::step_normalized(&ic, config.dt, config.s, 2.0 * config.a);
    let recon = Reconstruction::new(config.a, &grid);
    let nc_state = recon.to_state(&nc).unwrap();

    let fidelity = state.inner_product(&nc_state).unwrap().norm_sqr();
    assert!(fidelity > 0.999, "fidelity vs normalized classical: {fidelity}");
}

#[test]
fn circuit_substep_route_reproduces_the_fft_route() {
    let config = RunConfig {
        n: 3,
        d: 4,
        dt: 3e-3,
        num_steps: 3,
        s: 1.0,
        a: 2.0,
        v: 2.0,
        x0: -1.0,
        seed: 9,
        ftol: 1e-12,
        bounds: BOUNDS,
        mode: RunMode::Vqa,
        output_times: vec![],
    };
    let fft = driver::run_vqa_with(&config, SubstepRoute::ClassicalFft).unwrap();
    let circuit = driver::run_vqa_with(&config, SubstepRoute::Circuit).unwrap();
    // The two routes differ by a global phase on psi~, so the optimized
    // states differ by that phase and the error series agree.
    for (a, b) in fft.steps.iter().zip(&circuit.steps) {
        let (qa, qb) = (a.rmse_q.unwrap(), b.rmse_q.unwrap());
        assert!(
            (qa - qb).abs() < 1e-5,
            "step {}: rmse_q {qa} vs {qb}",
            a.step
        );
    }
}

#[test]
fn linear_wave_packet_broadens_while_soliton_does_not() {
    // Circular variance of |Psi|^2 over the periodic domain.
    fn circular_variance(xs: &[f64], weights: &[f64]) -> f64 {
        let total: f64 = weights.iter().sum();
        let mut re = 0.0;
        let mut im = 0.0;
        for (x, w) in xs.iter().zip(weights) {
            re += w * x.cos();
            im += w * x.sin();
        }
        1.0 - (re * re + im * im).sqrt() / total
    }

    let mut config = RunConfig {
        n: 5,
        d: 6,
        dt: 3e-3,
        num_steps: 100,
        s: 0.0,
        a: 2.0,
        v: 10.0,
        x0: -1.0,
        seed: 21,
        ftol: 1e-12,
        bounds: BOUNDS,
        mode: RunMode::Vqa,
        output_times: vec![0, 100],
    };
    let linear = driver::run_vqa(&config).unwrap();
    let spread = |record: &nlse_vqa_core::driver::RunRecord, step: usize| {
        let snap = record
            .snapshots
            .iter()
            .find(|s| s.step == step)
            .expect("snapshot");
        let weights: Vec<f64> = snap.abs_psi.iter().map(|m| m * m).collect();
        circular_variance(&snap.x, &weights)
    };
    // An a=2 packet has dispersion time ~1/a^2 = 0.25, so by t = 0.3 the
    // envelope variance has grown by roughly half again and the peak has
    // come down accordingly.
    let grew = spread(&linear, 100) / spread(&linear, 0);
    assert!(grew > 1.3, "linear run should broaden, got factor {grew}");
    let peak = |record: &nlse_vqa_core::driver::RunRecord, step: usize| -> f64 {
        record
            .snapshots
            .iter()
            .find(|s| s.step == step)
            .expect("snapshot")
            .abs_psi
            .iter()
            .fold(0.0f64, |m, v| m.max(*v))
    };
    assert!(peak(&linear, 100) < 1.75, "peak {}", peak(&linear, 100));

    // The 32-point grid only marginally resolves the v=10 carrier, so the
    // soliton peak erodes a little; it must still clearly beat the
    // dispersed packet.
    config.s = 1.0;
    config.seed = 22;
    let soliton = driver::run_vqa(&config).unwrap();
    assert!(
        peak(&soliton, 100) > 1.1 * peak(&linear, 100),
        "soliton peak {} vs dispersed peak {}",
        peak(&soliton, 100),
        peak(&linear, 100)
    );
}
