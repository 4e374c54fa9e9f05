use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use nlse_vqa_core::circuits::{self, AnsatzParams};
use nlse_vqa_core::cost::{self, CostContext};
use nlse_vqa_core::solver::{self, Grid, SolitonSpec};
use nlse_vqa_core::statevector::StateVector;

const BOUNDS: (f64, f64) = (-6.283185307179586, 6.283185307179586);

fn random_lambda(seed: u64, n: usize, d: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..AnsatzParams::parameter_count(n, d))
        .map(|_| rng.random_range(BOUNDS.0..BOUNDS.1))
        .collect()
}

fn bench_ansatz_state(c: &mut Criterion) {
    let lambda = random_lambda(1, 6, 12);
    c.bench_function("ansatz_state n=6 d=12", |b| {
        b.iter(|| circuits::ansatz_state(6, 12, black_box(&lambda)).unwrap())
    });
}

fn bench_cost_direct(c: &mut Criterion) {
    let (n, d, dt) = (6, 12, 3e-3);
    let grid = Grid::for_qubits(n).unwrap();
    let spec = SolitonSpec::new(2.0, 10.0, -1.0, 1.0).unwrap();
    let ic = solver::initial_condition(&spec, &grid);
    let state = StateVector::normalized(ic.psi.clone()).unwrap();
    let field = solver::WaveField::new(state.amplitudes().to_vec(), grid, 0.0).unwrap();
    let tilde = StateVector::from_amplitudes(solver::implicit_substep(&field, dt).psi).unwrap();
    let ctx = CostContext::new(tilde, d, 1.0, dt, 2.0).unwrap();
    let lambda = random_lambda(2, n, d);
    c.bench_function("cost_direct n=6 d=12", |b| {
        b.iter(|| cost::cost_direct_lambda(&ctx, black_box(&lambda)).unwrap())
    });
}

fn bench_implicit_substep(c: &mut Criterion) {
    let grid = Grid::new(64).unwrap();
    let spec = SolitonSpec::new(2.0, 10.0, -1.0, 1.0).unwrap();
    let field = solver::initial_condition(&spec, &grid);
    c.bench_function("implicit_substep M=64", |b| {
        b.iter(|| solver::implicit_substep(black_box(&field), 3e-3))
    });
}

fn bench_tilde_u_circuit(c: &mut Criterion) {
    let lambda = random_lambda(3, 6, 12);
    let params = AnsatzParams::new(lambda, 6, 12, BOUNDS).unwrap();
    let circuit = circuits::build_tilde_u(&params, 3e-3).unwrap();
    c.bench_function("tilde_u circuit apply n=6 d=12", |b| {
        b.iter(|| black_box(&circuit).state_from_zero().unwrap())
    });
}

criterion_group!(
    benches,
    bench_ansatz_state,
    bench_cost_direct,
    bench_implicit_substep,
    bench_tilde_u_circuit
);
criterion_main!(benches);
