//! Result emission: the per-step CSV table, the full JSON record and the
//! sweep tables.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::driver::{DepthSweepRun, RunRecord, TimestepSweepRow};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Write a run record as CSV (fixed `step,t,rmse_q,rmse_c,rmse_nc,cost,iters`
/// schema, empty cells where a column does not apply) or as the complete
/// JSON record.
pub fn emit_results(record: &RunRecord, format: OutputFormat, path: &Path) -> Result<()> {
    match format {
        OutputFormat::Csv => emit_csv(record, path),
        OutputFormat::Json => emit_json(record, path),
    }
}

#[derive(Serialize)]
struct CsvRow {
    step: usize,
    t: f64,
    rmse_q: Option<f64>,
    rmse_c: Option<f64>,
    rmse_nc: Option<f64>,
    cost: Option<f64>,
    iters: Option<usize>,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn csv_fail(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn emit_csv(record: &RunRecord, path: &Path) -> Result<()> {
    let mut writer = csv_writer(path)?;
    for step in &record.steps {
        writer
            .serialize(CsvRow {
                step: step.step,
                t: step.t,
                rmse_q: step.rmse_q,
                rmse_c: step.rmse_c,
                rmse_nc: step.rmse_nc,
                cost: step.cost,
                iters: step.iters,
            })
            .map_err(csv_fail(path))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_json(record: &RunRecord, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, record).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read back a JSON record written by [`emit_json`].
pub fn load_record(path: &Path) -> Result<RunRecord> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Parse and validate a JSON run configuration (exact field names,
/// unknown keys rejected).
pub fn load_config(path: &Path) -> Result<crate::driver::RunConfig> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: crate::driver::RunConfig = serde_json::from_reader(BufReader::new(file))
        .map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    config.validate()?;
    Ok(config)
}

/// `steps,dt,rmse_q,rmse_c,rmse_nc` table of a time-step sweep.
pub fn emit_timestep_sweep_csv(rows: &[TimestepSweepRow], path: &Path) -> Result<()> {
    let mut writer = csv_writer(path)?;
    for row in rows {
        writer.serialize(row).map_err(csv_fail(path))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct DepthRow {
    depth: usize,
    step: usize,
    t: f64,
    rmse_q: Option<f64>,
    rmse_c: Option<f64>,
}

/// `depth,step,t,rmse_q,rmse_c` time series of a depth sweep.
pub fn emit_depth_sweep_csv(runs: &[DepthSweepRun], path: &Path) -> Result<()> {
    let mut writer = csv_writer(path)?;
    for run in runs {
        for step in &run.record.steps {
            writer
                .serialize(DepthRow {
                    depth: run.depth,
                    step: step.step,
                    t: step.t,
                    rmse_q: step.rmse_q,
                    rmse_c: step.rmse_c,
                })
                .map_err(csv_fail(path))?;
        }
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
