//! Time-stepping orchestration: a variational run advances the state one
//! step at a time by minimizing the cost against the post-substep state,
//! while classical and per-step-normalized classical companions integrate
//! the same trajectory for error comparison. Also hosts the time-step and
//! circuit-depth sweeps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuits;
use crate::cost::{self, CostContext};
use crate::error::{Error, Result};
use crate::optimizer::{self, OptimizerConfig, SeedMode};
use crate::solver::{self, Grid, SolitonSpec, WaveField};
use crate::statevector::{StateVector, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Vqa,
    Classical,
    ClassicalNormalized,
}

/// Complete description of one experiment; the JSON config schema is
/// exactly these field names, unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub d: usize,
    pub dt: f64,
    pub num_steps: usize,
    pub s: f64,
    pub a: f64,
    pub v: f64,
    pub x0: f64,
    pub seed: u64,
    pub ftol: f64,
    pub bounds: (f64, f64),
    pub mode: RunMode,
    /// Step indices to snapshot (0 = the initial condition).
    #[serde(default)]
    pub output_times: Vec<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count n={} outside supported range 2..={MAX_QUBITS}",
                self.n
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.num_steps == 0 {
            return Err(Error::Config("num_steps must be at least 1".into()));
        }
        if !(self.a > 0.0) {
            return Err(Error::Config(format!("amplitude a must be > 0, got {}", self.a)));
        }
        if !(self.ftol > 0.0) {
            return Err(Error::Config(format!("ftol must be > 0, got {}", self.ftol)));
        }
        let (lo, hi) = self.bounds;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Config(format!("invalid bounds ({lo}, {hi})")));
        }
        if let Some(&bad) = self.output_times.iter().find(|&&m| m > self.num_steps) {
            return Err(Error::Config(format!(
                "output time {bad} beyond the last step {}",
                self.num_steps
            )));
        }
        Ok(())
    }

    fn soliton(&self) -> Result<SolitonSpec> {
        SolitonSpec::new(self.a, self.v, self.x0, self.s)
    }

    fn tracks_error(&self) -> bool {
        (self.s - 1.0).abs() < 1e-12
    }

    fn optimizer_config(&self) -> OptimizerConfig {
        OptimizerConfig {
            ftol: self.ftol,
            bounds: self.bounds,
            ..OptimizerConfig::default()
        }
    }
}

/// Smallest depth at which the ansatz has at least as many free parameters
/// as the state has real unknowns: `2n(d+1) >= 2^(n+1)`.
pub fn overdetermined_threshold(n: usize) -> usize {
    let unknowns = 1usize << (n + 1);
    let per_layer = 2 * n;
    unknowns.div_ceil(per_layer).saturating_sub(1)
}

/// One row of a run: time, per-mode errors and, for variational steps,
/// the optimization outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub rmse_q: Option<f64>,
    pub rmse_c: Option<f64>,
    pub rmse_nc: Option<f64>,
    pub cost: Option<f64>,
    pub iters: Option<usize>,
    pub lambda_star: Option<Vec<f64>>,
    /// The optimizer hit a non-finite cost and kept its best-so-far point.
    pub flagged: bool,
}

/// Modulus samples of the numerical solution at one output step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub x: Vec<f64>,
    pub abs_psi: Vec<f64>,
}

impl Snapshot {
    fn from_field(field: &WaveField, step: usize) -> Snapshot {
        Snapshot {
            step,
            t: field.time,
            x: field.grid.x().to_vec(),
            abs_psi: field.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub steps: Vec<StepRecord>,
    pub snapshots: Vec<Snapshot>,
}

/// The constant factor `sqrt(2a/dx)` relating unit statevectors to
/// physical-normalization fields with `integral |Psi|^2 dx = 2a`.
///
/// The literature writes the normalization as an integral of `|Psi|`; the
/// expansion factor used here is the one consistent with the squared
/// modulus, since `integral a^2 sech^2(a x) dx = 2a`.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    scale: f64,
    grid: Grid,
}

impl Reconstruction {
    pub fn new(a: f64, grid: &Grid) -> Reconstruction {
        Reconstruction {
            scale: (2.0 * a / grid.dx()).sqrt(),
            grid: grid.clone(),
        }
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.scale
    }

    /// Physical field from a unit statevector.
    pub fn to_wave_field(&self, state: &StateVector, time: f64) -> Result<WaveField> {
        if state.amplitudes().len() != self.grid.points() {
            return Err(Error::Usage(format!(
                "state has {} amplitudes, grid has {} points",
                state.amplitudes().len(),
                self.grid.points()
            )));
        }
        let psi = state.amplitudes().iter().map(|a| a * self.scale).collect();
        WaveField::new(psi, self.grid.clone(), time)
    }

    /// Unit statevector from a field carrying exactly the reconstruction
    /// normalization (the inverse of [`Reconstruction::to_wave_field`]).
    pub fn to_state(&self, field: &WaveField) -> Result<StateVector> {
        let amps: Vec<Complex64> = field.psi.iter().map(|p| p / self.scale).collect();
        StateVector::from_amplitudes(amps)
    }
}

/// Which realization of the implicit substep feeds the cost function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstepRoute {
    /// Classical FFT pipeline (the default, and the practical choice).
    ClassicalFft,
    /// The QFT/kinetic-phase circuit; verification runs at small n. Its
    /// global phase relative to the FFT route is irrelevant to the
    /// optimization and invisible to the modulus-based error metric.
    Circuit,
}

/// Dispatch a configured run on its mode.
pub fn run(config: &RunConfig) -> Result<RunRecord> {
    match config.mode {
        RunMode::Vqa => run_vqa(config),
        RunMode::Classical | RunMode::ClassicalNormalized => run_classical(config),
    }
}

/// Variational run with the default FFT substep; also integrates the two
/// classical companions so one record carries the full error comparison.
pub fn run_vqa(config: &RunConfig) -> Result<RunRecord> {
    run_vqa_with(config, SubstepRoute::ClassicalFft)
}

pub fn run_vqa_with(config: &RunConfig, route: SubstepRoute) -> Result<RunRecord> {
    config.validate()?;
    if config.mode != RunMode::Vqa {
        return Err(Error::Usage(format!(
            "run_vqa called with mode {:?}",
            config.mode
        )));
    }
    if route == SubstepRoute::Circuit && config.n > 6 {
        return Err(Error::Config(format!(
            "circuit substep route is a verification path for n <= 6, got n={}",
            config.n
        )));
    }

    let grid = Grid::for_qubits(config.n)?;
    let spec = config.soliton()?;
    let ic = solver::initial_condition(&spec, &grid);
    let recon = Reconstruction::new(config.a, &grid);
    let target_mass = 2.0 * config.a;
    let opt_config = config.optimizer_config();

    let mut c_field = ic.clone();
    let mut nc_field = ic.clone();
    let mut state = StateVector::normalized(ic.psi.clone())?;
    let substep_circuit = match route {
        SubstepRoute::Circuit => Some(circuits::build_implicit_substep(config.n, config.dt)?),
        SubstepRoute::ClassicalFft => None,
    };

    let mut record = RunRecord {
        config: config.clone(),
        steps: Vec::with_capacity(config.num_steps + 1),
        snapshots: Vec::new(),
    };
    push_step_zero(&mut record, config, &spec, &grid, &ic)?;

    let mut lambda_prev: Option<Vec<f64>> = None;
    for m in 1..=config.num_steps {
        let t = m as f64 * config.dt;

        let psi_tilde = match &substep_circuit {
            Some(circuit) => {
                let mut sv = state.clone();
                sv.apply_circuit(circuit)?;
                sv
            }
            None => {
                let field =
                    WaveField::new(state.amplitudes().to_vec(), grid.clone(), t - config.dt)?;
                StateVector::from_amplitudes(solver::implicit_substep(&field, config.dt).psi)?
            }
        };
        let ctx = CostContext::new(psi_tilde, config.d, config.s, config.dt, config.a)?;

        let x0 = match &lambda_prev {
            None => optimizer::seed_parameters(
                config.n,
                config.d,
                SeedMode::Random,
                None,
                config.seed,
                config.bounds,
            )?,
            Some(prev) => optimizer::seed_parameters(
                config.n,
                config.d,
                SeedMode::Warm,
                Some(prev),
                config.seed,
                config.bounds,
            )?,
        };
        let result = optimizer::minimize(
            |lambda| cost::cost_direct_lambda(&ctx, lambda).unwrap_or(f64::NAN),
            &x0,
            &opt_config,
        )?;
        state = circuits::ansatz_state(config.n, config.d, &result.lambda_star)?;

        c_field = solver::step(&c_field, config.dt, config.s);
        c_field.time = t;
        nc_field = solver::step_normalized(&nc_field, config.dt, config.s, target_mass);
        nc_field.time = t;

        let q_field = recon.to_wave_field(&state, t)?;
        let (rmse_q, rmse_c, rmse_nc) = if config.tracks_error() {
            let reference = solver::analytic_solution(&spec, &grid, t)?;
            (
                Some(solver::rmse(&q_field, &reference)?),
                Some(solver::rmse(&c_field, &reference)?),
                Some(solver::rmse(&nc_field, &reference)?),
            )
        } else {
            (None, None, None)
        };

        record.steps.push(StepRecord {
            step: m,
            t,
            rmse_q,
            rmse_c,
            rmse_nc,
            cost: Some(result.cost_star),
            iters: Some(result.iterations),
            lambda_star: Some(result.lambda_star.clone()),
            flagged: result.non_finite_abort,
        });
        if config.output_times.contains(&m) {
            record.snapshots.push(Snapshot::from_field(&q_field, m));
        }
        lambda_prev = Some(result.lambda_star);
    }
    Ok(record)
}

/// Classical run in plain or per-step-normalized mode.
pub fn run_classical(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let normalized = match config.mode {
        RunMode::Classical => false,
        RunMode::ClassicalNormalized => true,
        RunMode::Vqa => {
            return Err(Error::Usage("run_classical called with mode vqa".into()));
        }
    };

    let grid = Grid::for_qubits(config.n)?;
    let spec = config.soliton()?;
    let ic = solver::initial_condition(&spec, &grid);
    let target_mass = 2.0 * config.a;

    let mut record = RunRecord {
        config: config.clone(),
        steps: Vec::with_capacity(config.num_steps + 1),
        snapshots: Vec::new(),
    };
    push_step_zero(&mut record, config, &spec, &grid, &ic)?;

    let mut field = ic;
    for m in 1..=config.num_steps {
        let t = m as f64 * config.dt;
        field = if normalized {
            solver::step_normalized(&field, config.dt, config.s, target_mass)
        } else {
            solver::step(&field, config.dt, config.s)
        };
        field.time = t;

        let err = if config.tracks_error() {
            let reference = solver::analytic_solution(&spec, &grid, t)?;
            Some(solver::rmse(&field, &reference)?)
        } else {
            None
        };
        record.steps.push(StepRecord {
            step: m,
            t,
            rmse_q: None,
            rmse_c: (!normalized).then_some(err).flatten(),
            rmse_nc: normalized.then_some(err).flatten(),
            cost: None,
            iters: None,
            lambda_star: None,
            flagged: false,
        });
        if config.output_times.contains(&m) {
            record.snapshots.push(Snapshot::from_field(&field, m));
        }
    }
    Ok(record)
}

/// Step-0 row and snapshot: the solution at t = 0 is the initial condition
/// itself in every mode.
fn push_step_zero(
    record: &mut RunRecord,
    config: &RunConfig,
    spec: &SolitonSpec,
    grid: &Grid,
    ic: &WaveField,
) -> Result<()> {
    let err0 = if config.tracks_error() {
        let reference = solver::analytic_solution(spec, grid, 0.0)?;
        Some(solver::rmse(ic, &reference)?)
    } else {
        None
    };
    let (rmse_q, rmse_c, rmse_nc) = match config.mode {
        RunMode::Vqa => (err0, err0, err0),
        RunMode::Classical => (None, err0, None),
        RunMode::ClassicalNormalized => (None, None, err0),
    };
    record.steps.push(StepRecord {
        step: 0,
        t: 0.0,
        rmse_q,
        rmse_c,
        rmse_nc,
        cost: None,
        iters: None,
        lambda_star: None,
        flagged: false,
    });
    if config.output_times.contains(&0) {
        record.snapshots.push(Snapshot::from_field(ic, 0));
    }
    Ok(())
}

/// Final-time error for each requested step count over the base config's
/// time interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimestepSweepRow {
    pub steps: usize,
    pub dt: f64,
    pub rmse_q: f64,
    pub rmse_c: f64,
    pub rmse_nc: f64,
}

/// Rerun the variational/classical comparison with `counts[i]` steps
/// spanning the same interval `t_final = base.dt * base.num_steps`, one
/// fixed seed per run, and report the error at the final time.
pub fn sweep_timesteps(base: &RunConfig, counts: &[usize]) -> Result<Vec<TimestepSweepRow>> {
    base.validate()?;
    if !base.tracks_error() {
        return Err(Error::Config(
            "the time-step sweep compares against the soliton and needs s = 1".into(),
        ));
    }
    let t_final = base.dt * base.num_steps as f64;
    let mut rows = Vec::with_capacity(counts.len());
    for &steps in counts {
        if steps == 0 {
            return Err(Error::Config("step counts must be positive".into()));
        }
        let config = RunConfig {
            dt: t_final / steps as f64,
            num_steps: steps,
            mode: RunMode::Vqa,
            output_times: Vec::new(),
            ..base.clone()
        };
        let record = run_vqa(&config)?;
        let last = record.steps.last().expect("runs have at least one step");
        rows.push(TimestepSweepRow {
            steps,
            dt: config.dt,
            rmse_q: last.rmse_q.expect("s=1 run tracks errors"),
            rmse_c: last.rmse_c.expect("s=1 run tracks errors"),
            rmse_nc: last.rmse_nc.expect("s=1 run tracks errors"),
        });
    }
    Ok(rows)
}

/// One depth's full error time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthSweepRun {
    pub depth: usize,
    pub record: RunRecord,
}

/// Rerun the variational algorithm at each depth with the sweep's fixed
/// parameters `dt = 1e-3`, `x0 = 0`, `ftol = 1e-13`.
pub fn sweep_depth(base: &RunConfig, depths: &[usize]) -> Result<Vec<DepthSweepRun>> {
    base.validate()?;
    let mut runs = Vec::with_capacity(depths.len());
    for &depth in depths {
        let config = RunConfig {
            d: depth,
            dt: 1e-3,
            x0: 0.0,
            ftol: 1e-13,
            mode: RunMode::Vqa,
            output_times: Vec::new(),
            ..base.clone()
        };
        runs.push(DepthSweepRun {
            depth,
            record: run_vqa(&config)?,
        });
    }
    Ok(runs)
}
