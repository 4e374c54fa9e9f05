//! Command-line driver: single runs, parameter sweeps and circuit
//! verification. Output files land in `NLSE_VQA_OUTDIR` (default: the
//! working directory).

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use nlse_vqa_core::driver::{self, RunMode, SubstepRoute};
use nlse_vqa_core::report;
use nlse_vqa_core::verify;

#[derive(Parser)]
#[command(
    name = "nlse-vqa",
    about = "Hybrid pseudospectral-variational solver for the 1D nonlinear Schrödinger equation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory (any mode) and write per-step CSV plus the full
    /// JSON record.
    Solve {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output file stem (`<out>.csv`, `<out>.json`).
        #[arg(long, default_value = "run")]
        out: String,
        /// Realize the implicit substep with the QFT/kinetic-phase
        /// circuit instead of the classical FFT (vqa mode, n <= 6).
        #[arg(long)]
        circuit_substep: bool,
    },
    /// Rerun the quantum/classical comparison with each step count
    /// spanning the base config's time interval; write final-time errors.
    SweepSteps {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated step counts.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[arg(long, default_value = "sweep_steps")]
        out: String,
    },
    /// Rerun the variational algorithm per circuit depth (fixed sweep
    /// parameters dt=1e-3, x0=0, ftol=1e-13); write error time series.
    SweepDepth {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated depths.
        #[arg(long, value_delimiter = ',', required = true)]
        depths: Vec<usize>,
        #[arg(long, default_value = "sweep_depth")]
        out: String,
    },
    /// Cross-check the QFT, kinetic-phase, trial-advance and cost
    /// circuits against dense and FFT oracles at width n.
    VerifyCircuits {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1234)]
        seed: u64,
    },
}

fn out_dir() -> PathBuf {
    std::env::var_os("NLSE_VQA_OUTDIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            config,
            out,
            circuit_substep,
        } => {
            let config = report::load_config(&config)?;
            let record = match (config.mode, circuit_substep) {
                (RunMode::Vqa, false) => driver::run_vqa(&config)?,
                (RunMode::Vqa, true) => driver::run_vqa_with(&config, SubstepRoute::Circuit)?,
                (_, true) => bail!("--circuit-substep applies to vqa mode only"),
                (_, false) => driver::run_classical(&config)?,
            };
            let dir = out_dir();
            let csv_path = dir.join(format!("{out}.csv"));
            let json_path = dir.join(format!("{out}.json"));
            report::emit_csv(&record, &csv_path)?;
            report::emit_json(&record, &json_path)?;
            let last = record.steps.last().expect("at least the initial step");
            println!(
                "{} steps to t = {}; wrote {} and {}",
                record.steps.len() - 1,
                last.t,
                csv_path.display(),
                json_path.display()
            );
            if let Some(err) = last.rmse_q.or(last.rmse_c).or(last.rmse_nc) {
                println!("final rmse = {err:.6e}");
            }
        }
        Command::SweepSteps {
            config,
            counts,
            out,
        } => {
            let config = report::load_config(&config)?;
            let rows = driver::sweep_timesteps(&config, &counts)?;
            let path = out_dir().join(format!("{out}.csv"));
            report::emit_timestep_sweep_csv(&rows, &path)?;
            println!("steps      dt       rmse_q       rmse_c       rmse_nc");
            for row in &rows {
                println!(
                    "{:5} {:.6} {:.6e} {:.6e} {:.6e}",
                    row.steps, row.dt, row.rmse_q, row.rmse_c, row.rmse_nc
                );
            }
            println!("wrote {}", path.display());
        }
        Command::SweepDepth {
            config,
            depths,
            out,
        } => {
            let config = report::load_config(&config)?;
            let runs = driver::sweep_depth(&config, &depths)?;
            let path = out_dir().join(format!("{out}.csv"));
            report::emit_depth_sweep_csv(&runs, &path)?;
            for run in &runs {
                let last = run.record.steps.last().expect("steps");
                println!(
                    "depth {:2}: final rmse_q = {:.6e}, rmse_c = {:.6e}",
                    run.depth,
                    last.rmse_q.unwrap_or(f64::NAN),
                    last.rmse_c.unwrap_or(f64::NAN)
                );
            }
            println!("wrote {}", path.display());
        }
        Command::VerifyCircuits { n, seed } => {
            let checks = verify::verify_circuits(n, seed)?;
            let mut all_ok = true;
            for check in &checks {
                let ok = check.passed();
                all_ok &= ok;
                println!(
                    "{:34} {} (max deviation {:.3e}, tolerance {:.0e})",
                    check.name,
                    if ok { "PASS" } else { "FAIL" },
                    check.max_deviation,
                    check.tolerance
                );
            }
            if !all_ok {
                bail!("circuit verification failed at n = {n}");
            }
        }
    }
    Ok(())
}
