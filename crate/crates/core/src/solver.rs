//! Classical split-step reference solver on the periodic domain
//! `[-pi, pi)`: analytic soliton oracles, the implicit Fourier substep, the
//! explicit Euler substep, the per-step-normalized variant and the RMSE
//! metric.
//!
//! This module is the ground truth for every quantum-side state
//! comparison. The field's `time` is bookkeeping owned by the caller: the
//! stepping functions leave it untouched so that run loops can assign
//! `t_m = m * dt` from the step counter instead of accumulating floats.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Periodic domain length.
pub const DOMAIN_LENGTH: f64 = 2.0 * std::f64::consts::PI;

/// Uniform periodic grid of `m` points, `x_j = -pi + 2 pi j / m`.
///
/// `wavenumbers` lists the shifted spectrum `k_j = j - m/2`, the ordering
/// in which the implicit substep's phase factor is usually written; the
/// substep itself addresses unshifted FFT bins through
/// [`Grid::signed_wavenumber`].
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    m: usize,
    x: Vec<f64>,
    dx: f64,
    k: Vec<f64>,
}

impl Grid {
    pub fn new(m: usize) -> Result<Grid> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size {m} is not a power of two >= 2"
            )));
        }
        let dx = DOMAIN_LENGTH / m as f64;
        let x = (0..m)
            .map(|j| -std::f64::consts::PI + dx * j as f64)
            .collect();
        let k = (0..m).map(|j| j as f64 - (m / 2) as f64).collect();
        Ok(Grid { m, x, dx, k })
    }

    pub fn for_qubits(n: usize) -> Result<Grid> {
        if n == 0 || n > crate::statevector::MAX_QUBITS {
            return Err(Error::Config(format!("grid for {n} qubits unsupported")));
        }
        Grid::new(1 << n)
    }

    /// Point count M.
    pub fn points(&self) -> usize {
        self.m
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Signed wavenumber carried by unshifted FFT bin `bin`.
    pub fn signed_wavenumber(&self, bin: usize) -> f64 {
        if bin < self.m / 2 {
            bin as f64
        } else {
            bin as f64 - self.m as f64
        }
    }
}

/// Complex samples of the wave function on a [`Grid`] at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    pub psi: Vec<Complex64>,
    pub grid: Grid,
    pub time: f64,
}

impl WaveField {
    pub fn new(psi: Vec<Complex64>, grid: Grid, time: f64) -> Result<WaveField> {
        if psi.len() != grid.points() {
            return Err(Error::Usage(format!(
                "field has {} samples on a {}-point grid",
                psi.len(),
                grid.points()
            )));
        }
        Ok(WaveField { psi, grid, time })
    }

    /// Discrete `integral |psi|^2 dx`.
    pub fn integral_abs_sq(&self) -> f64 {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm()).collect()
    }
}

/// Bright-soliton parameters: amplitude `a > 0`, velocity `v`, initial
/// center `x0` and nonlinearity coupling `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolitonSpec {
    pub a: f64,
    pub v: f64,
    pub x0: f64,
    pub s: f64,
}

impl SolitonSpec {
    pub fn new(a: f64, v: f64, x0: f64, s: f64) -> Result<SolitonSpec> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Usage(format!("soliton amplitude must be > 0, got {a}")));
        }
        Ok(SolitonSpec { a, v, x0, s })
    }

    /// Infinite-line soliton
    /// `a sech(a(x - x0 - vt)) exp(i v (x - x0) + i (a^2 - v^2) t / 2)`.
    /// At `t = 0` this is the initial condition for any coupling; for
    /// `t > 0` it solves the equation at unit coupling.
    pub fn evaluate(&self, x: f64, t: f64) -> Complex64 {
        let envelope = self.a * sech(self.a * (x - self.x0 - self.v * t));
        let phase = self.v * (x - self.x0) + 0.5 * (self.a * self.a - self.v * self.v) * t;
        envelope * Complex64::cis(phase)
    }

    /// Periodized solution: the coherent sum of the images
    /// `x + k L, |k| <= ceil((|x0| + v|t|)/L) + 1`. The envelope decays
    /// exponentially, so the window truncation error is far below the
    /// scheme errors measured against this oracle. Summing (rather than
    /// keeping one dominant image) matters at the domain edge, where the
    /// neighboring tails overlap at the `sech(a pi)` scale and the
    /// periodic-domain evolution reproduces exactly that interference.
    pub fn evaluate_periodized(&self, x: f64, t: f64) -> Complex64 {
        let window = ((self.x0.abs() + (self.v * t).abs()) / DOMAIN_LENGTH).ceil() as i64 + 1;
        (-window..=window)
            .map(|k| self.evaluate(x + k as f64 * DOMAIN_LENGTH, t))
            .sum()
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Periodized initial-condition samples at `t = 0`.
pub fn initial_condition(spec: &SolitonSpec, grid: &Grid) -> WaveField {
    let psi = grid
        .x()
        .iter()
        .map(|&x| spec.evaluate_periodized(x, 0.0))
        .collect();
    WaveField {
        psi,
        grid: grid.clone(),
        time: 0.0,
    }
}

/// Periodized analytic soliton at time `t`; defined for unit coupling only.
pub fn analytic_solution(spec: &SolitonSpec, grid: &Grid, t: f64) -> Result<WaveField> {
    if (spec.s - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "analytic soliton oracle is defined for s=1 only, got s={}",
            spec.s
        )));
    }
    let psi = grid
        .x()
        .iter()
        .map(|&x| spec.evaluate_periodized(x, t))
        .collect();
    Ok(WaveField {
        psi,
        grid: grid.clone(),
        time: t,
    })
}

/// Exact Fourier-space advance of the Laplacian term:
/// `psi <- IFFT(exp(-i k^2 dt / 2) FFT(psi))`. Norm-preserving.
pub fn implicit_substep(field: &WaveField, dt: f64) -> WaveField {
    let m = field.grid.points();
    let mut spectrum = field.psi.clone();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut spectrum);
    for (bin, amp) in spectrum.iter_mut().enumerate() {
        let k = field.grid.signed_wavenumber(bin);
        *amp *= Complex64::cis(-0.5 * k * k * dt);
    }
    planner.plan_fft_inverse(m).process(&mut spectrum);
    let scale = 1.0 / m as f64;
    for amp in &mut spectrum {
        *amp *= scale;
    }
    WaveField {
        psi: spectrum,
        grid: field.grid.clone(),
        time: field.time,
    }
}

/// First-order explicit advance of the nonlinear term:
/// `psi <- psi (1 + i s dt |psi|^2)` elementwise.
pub fn explicit_substep(field: &WaveField, dt: f64, s: f64) -> WaveField {
    let psi = field
        .psi
        .iter()
        .map(|&p| p * Complex64::new(1.0, s * dt * p.norm_sqr()))
        .collect();
    WaveField {
        psi,
        grid: field.grid.clone(),
        time: field.time,
    }
}

/// One full split step: implicit Fourier substep then explicit Euler
/// substep.
pub fn step(field: &WaveField, dt: f64, s: f64) -> WaveField {
    explicit_substep(&implicit_substep(field, dt), dt, s)
}

/// [`step`] followed by a rescale to `integral |psi|^2 dx = target_norm`.
pub fn step_normalized(field: &WaveField, dt: f64, s: f64, target_norm: f64) -> WaveField {
    let mut next = step(field, dt, s);
    let current = next.integral_abs_sq();
    if current > 0.0 {
        let scale = (target_norm / current).sqrt();
        for p in &mut next.psi {
            *p *= scale;
        }
    }
    next
}

/// Root mean square error between the moduli of two fields on the same
/// grid: `sqrt(mean((|a_j| - |b_j|)^2))`. Phase-blind by construction.
pub fn rmse(numerical: &WaveField, reference: &WaveField) -> Result<f64> {
    if numerical.grid != reference.grid {
        return Err(Error::Usage(
            "rmse between fields on different grids".into(),
        ));
    }
    let m = numerical.grid.points() as f64;
    let sum_sq: f64 = numerical
        .psi
        .iter()
        .zip(&reference.psi)
        .map(|(a, b)| {
            let d = a.norm() - b.norm();
            d * d
        })
        .sum();
    Ok((sum_sq / m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn canonical_spec() -> SolitonSpec {
        SolitonSpec::new(2.0, 10.0, -1.0, 1.0).unwrap()
    }

    fn random_field(seed: u64, grid: &Grid) -> WaveField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = (0..grid.points())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        WaveField::new(psi, grid.clone(), 0.0).unwrap()
    }

    #[test]
    fn grid_layout() {
        let grid = Grid::new(64).unwrap();
        assert_eq!(grid.x()[0], -PI);
        assert!((grid.dx() - 2.0 * PI / 64.0).abs() < 1e-15);
        for w in grid.x().windows(2) {
            assert!((w[1] - w[0] - grid.dx()).abs() < 1e-12);
        }
        assert_eq!(grid.wavenumbers()[0], -32.0);
        assert_eq!(grid.wavenumbers()[63], 31.0);
        assert!(Grid::new(48).is_err());
    }

    #[test]
    fn initial_condition_peak_and_phase_at_center() {
        let spec = canonical_spec();
        let val = spec.evaluate_periodized(spec.x0, 0.0);
        // Neighboring images contribute 2 a sech(a L) ~ 1.4e-5 on top of
        // the central peak; at integer velocity they arrive in phase.
        assert!((val.norm() - 2.0).abs() < 1e-4);
        assert!(val.arg().abs() < 1e-12);
    }

    #[test]
    fn initial_condition_mass_is_twice_amplitude() {
        let spec = canonical_spec();
        let grid = Grid::new(64).unwrap();
        let field = initial_condition(&spec, &grid);
        // The image tails overlap coherently at integer velocity, adding
        // an interference cross-term ~7e-4 to the infinite-line mass 2a;
        // the tolerance covers that, not quadrature error.
        assert!((field.integral_abs_sq() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn initial_condition_modulus_symmetric_about_center() {
        let spec = canonical_spec();
        for delta in [0.1, 0.5, 1.0, 2.0] {
            let plus = spec.evaluate_periodized(spec.x0 + delta, 0.0).norm();
            let minus = spec.evaluate_periodized(spec.x0 - delta, 0.0).norm();
            assert!((plus - minus).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_solution_at_time_zero_equals_initial_condition() {
        let spec = canonical_spec();
        let grid = Grid::new(64).unwrap();
        let ic = initial_condition(&spec, &grid);
        let ana = analytic_solution(&spec, &grid, 0.0).unwrap();
        assert_eq!(ic.psi, ana.psi);
    }

    #[test]
    fn analytic_solution_rejects_other_couplings() {
        let spec = SolitonSpec::new(2.0, 10.0, -1.0, 0.0).unwrap();
        let grid = Grid::new(16).unwrap();
        assert!(matches!(
            analytic_solution(&spec, &grid, 0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn analytic_peak_modulus_is_invariant() {
        let spec = canonical_spec();
        for t in [0.0, 0.05, 0.17, 0.3] {
            let center = spec.x0 + spec.v * t;
            let wrapped = (center + PI).rem_euclid(2.0 * PI) - PI;
            let val = spec.evaluate_periodized(wrapped, t);
            assert!((val.norm() - spec.a).abs() < 1e-4);
        }
    }

    #[test]
    fn analytic_peak_position_translates_with_velocity() {
        let spec = canonical_spec();
        let grid = Grid::new(256).unwrap();
        let field = analytic_solution(&spec, &grid, 0.3).unwrap();
        let peak = field
            .abs()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| grid.x()[j])
            .unwrap();
        assert!((peak - 2.0).abs() <= grid.dx());
    }

    #[test]
    fn implicit_substep_at_zero_dt_is_identity() {
        let grid = Grid::new(32).unwrap();
        let field = random_field(3, &grid);
        let out = implicit_substep(&field, 0.0);
        let diff = out
            .psi
            .iter()
            .zip(&field.psi)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn implicit_substep_plane_wave_eigenvalue() {
        let grid = Grid::new(32).unwrap();
        let dt = 4.2e-3;
        for k in [-9i32, -2, 0, 5, 11] {
            let psi: Vec<Complex64> = grid
                .x()
                .iter()
                .map(|&x| Complex64::cis(k as f64 * x))
                .collect();
            let field = WaveField::new(psi.clone(), grid.clone(), 0.0).unwrap();
            let out = implicit_substep(&field, dt);
            let factor = Complex64::cis(-(k as f64).powi(2) * dt / 2.0);
            let diff = out
                .psi
                .iter()
                .zip(&psi)
                .map(|(a, b)| (a - factor * b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "k={k} diff={diff}");
        }
    }

    #[test]
    fn implicit_substep_preserves_norm() {
        let grid = Grid::new(64).unwrap();
        let field = random_field(7, &grid);
        let out = implicit_substep(&field, 3e-3);
        assert!((out.integral_abs_sq() - field.integral_abs_sq()).abs() < 1e-12);
    }

    #[test]
    fn explicit_substep_examples() {
        let grid = Grid::new(16).unwrap();
        let field = random_field(11, &grid);

        // s = 0 leaves the field untouched.
        let out = explicit_substep(&field, 3e-3, 0.0);
        assert_eq!(out.psi, field.psi);

        // Constant field picks up the cubic phase-amplitude factor.
        let c = Complex64::new(0.4, -0.3);
        let constant = WaveField::new(vec![c; 16], grid.clone(), 0.0).unwrap();
        let out = explicit_substep(&constant, 3e-3, 1.0);
        let expect = c * Complex64::new(1.0, 3e-3 * c.norm_sqr());
        for p in &out.psi {
            assert!((p - expect).norm() < 1e-15);
        }

        // Modulus never decreases: |1 + i alpha| >= 1.
        let out = explicit_substep(&field, 0.1, 1.7);
        for (a, b) in out.psi.iter().zip(&field.psi) {
            assert!(a.norm() >= b.norm() - 1e-15);
        }
    }

    #[test]
    fn step_at_zero_coupling_matches_normalized_step() {
        let spec = SolitonSpec::new(2.0, 10.0, -1.0, 0.0).unwrap();
        let grid = Grid::new(64).unwrap();
        let field = initial_condition(&spec, &grid);
        let mass = field.integral_abs_sq();
        let plain = step(&field, 3e-3, 0.0);
        let normalized = step_normalized(&field, 3e-3, 0.0, mass);
        assert!((plain.integral_abs_sq() - mass).abs() < 1e-12);
        let diff = plain
            .psi
            .iter()
            .zip(&normalized.psi)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn hundred_soliton_steps_stay_accurate() {
        let spec = canonical_spec();
        let grid = Grid::new(64).unwrap();
        let dt = 3e-3;
        let mut field = initial_condition(&spec, &grid);
        for _ in 0..100 {
            field = step(&field, dt, spec.s);
        }
        let reference = analytic_solution(&spec, &grid, 100.0 * dt).unwrap();
        let err = rmse(&field, &reference).unwrap();
        assert!(err.is_finite() && err < 0.1, "rmse={err}");
    }

    #[test]
    fn normalized_step_holds_target_mass() {
        let spec = canonical_spec();
        let grid = Grid::new(64).unwrap();
        let mut field = initial_condition(&spec, &grid);
        for _ in 0..20 {
            field = step_normalized(&field, 3e-3, 1.0, 4.0);
            assert!((field.integral_abs_sq() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_mass_never_decreases_at_positive_coupling() {
        let grid = Grid::new(32).unwrap();
        let mut field = random_field(19, &grid);
        let mut last = field.integral_abs_sq();
        for _ in 0..25 {
            field = step(&field, 5e-3, 1.0);
            let mass = field.integral_abs_sq();
            assert!(mass >= last - 1e-13);
            last = mass;
        }
    }

    #[test]
    fn linear_solver_is_exact_on_plane_wave_superpositions() {
        let grid = Grid::new(32).unwrap();
        let dt = 9e-3;
        let modes: [(i32, Complex64); 3] = [
            (-7, Complex64::new(0.3, 0.1)),
            (0, Complex64::new(-0.2, 0.5)),
            (9, Complex64::new(0.8, -0.4)),
        ];
        let sample = |t: f64| -> Vec<Complex64> {
            grid.x()
                .iter()
                .map(|&x| {
                    modes
                        .iter()
                        .map(|&(k, c)| {
                            c * Complex64::cis(k as f64 * x - 0.5 * (k as f64).powi(2) * t)
                        })
                        .sum()
                })
                .collect()
        };
        let mut field = WaveField::new(sample(0.0), grid.clone(), 0.0).unwrap();
        for _ in 0..100 {
            field = step(&field, dt, 0.0);
        }
        let expect = sample(100.0 * dt);
        let diff = field
            .psi
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "diff={diff}");
    }

    #[test]
    fn rmse_examples() {
        let grid = Grid::new(16).unwrap();
        let field = random_field(23, &grid);
        assert_eq!(rmse(&field, &field).unwrap(), 0.0);

        let offset = WaveField::new(
            field
                .psi
                .iter()
                .map(|p| {
                    let n = p.norm();
                    p * ((n + 0.25) / n)
                })
                .collect(),
            grid.clone(),
            0.0,
        )
        .unwrap();
        assert!((rmse(&offset, &field).unwrap() - 0.25).abs() < 1e-12);

        // Phase differences are invisible to the metric.
        let rotated = WaveField::new(
            field.psi.iter().map(|p| p * Complex64::cis(1.1)).collect(),
            grid.clone(),
            0.0,
        )
        .unwrap();
        assert!(rmse(&rotated, &field).unwrap() < 1e-15);

        let other = random_field(5, &Grid::new(32).unwrap());
        assert!(matches!(rmse(&field, &other), Err(Error::Usage(_))));
    }
}
