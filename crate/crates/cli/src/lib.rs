//! Scenario runner: resolves a flat configuration, dispatches to the
//! solvers and writes CSV tables, a manifest and optional SVG plots.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical guard
//! (truncation, boundary wrap, stability), 4 statistics error.

pub mod config;
pub mod output;
pub mod plot;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use rayon::prelude::*;
use tachyon_core::ErrorKind;

use config::{parse_lines, parse_overrides, parse_sweep, Config, Scenario};
use output::{manifest_body, write_manifest, write_table, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tachyon_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical guard: {0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::NumericalGuard => 3,
                ErrorKind::Statistics => 4,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub summary: Table,
}

/// Runs the configured scenario and writes its outputs. Guard trips that
/// still produce data (boundary wraps) are reported as errors after the
/// files are written.
pub fn run(config: &Config) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let dir = PathBuf::from(config.str("output_dir"));
    fs::create_dir_all(&dir)?;
    let plots = config.bool("emit_plots")?;
    let scenario = config.scenario()?;
    let result = if scenario == Scenario::Sweep {
        run_sweep(config, &dir, plots)
    } else {
        scenarios::run_single(scenario, config, &dir, plots)
    };
    write_manifest(&dir, config, started.elapsed().as_secs_f64())?;
    let outcome = result?;
    write_table(&dir, "summary.csv", &outcome.summary)?;
    if let Some(msg) = outcome.guard {
        return Err(CliError::Guard(msg));
    }
    Ok(RunReport { output_dir: dir, summary: outcome.summary })
}

fn run_sweep(config: &Config, dir: &Path, plots: bool) -> Result<scenarios::Outcome, CliError> {
    let axes = parse_sweep(config.str("sweep"))?;
    let scenario: Scenario = config.str("sweep_scenario").parse()?;
    if scenario == Scenario::Dispersion {
        return Err(CliError::Config("dispersion produces a table, not a sweep row".into()));
    }
    let mut cells: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in &axes {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                values.iter().map(move |v| {
                    let mut c = cell.clone();
                    c.push((key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    let results: Vec<Result<scenarios::Outcome, CliError>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, assignment)| {
            let cell_dir = dir.join(format!("cell_{i:03}"));
            let mut cell = config.with("scenario", scenario.as_str())?.with("output_dir", &cell_dir.to_string_lossy())?;
            for (k, v) in assignment {
                cell = cell.with(k, v)?;
            }
            fs::create_dir_all(&cell_dir)?;
            fs::write(cell_dir.join("manifest.txt"), manifest_body(&cell))?;
            let out = scenarios::run_single(scenario, &cell, &cell_dir, plots)?;
            write_table(&cell_dir, "summary.csv", &out.summary)?;
            Ok(out)
        })
        .collect();
    let mut table: Option<Table> = None;
    let mut guard = None;
    for (assignment, result) in cells.iter().zip(results) {
        let out = result?;
        guard = guard.or(out.guard);
        // Summary columns that repeat a swept key are dropped.
        let keep: Vec<usize> = (0..out.summary.header.len())
            .filter(|&i| !axes.iter().any(|(k, _)| *k == out.summary.header[i]))
            .collect();
        let t = table.get_or_insert_with(|| {
            let mut header: Vec<String> = vec!["cell".into()];
            header.extend(axes.iter().map(|(k, _)| k.clone()));
            header.extend(keep.iter().map(|&i| out.summary.header[i].clone()));
            Table { header, rows: Vec::new() }
        });
        for row in &out.summary.rows {
            let mut r = vec![t.rows.len().to_string()];
            r.extend(assignment.iter().map(|(_, v)| v.clone()));
            r.extend(keep.iter().map(|&i| row[i].clone()));
            t.rows.push(r);
        }
    }
    Ok(scenarios::Outcome { summary: table.unwrap_or_default(), guard })
}

#[derive(Parser, Debug)]
#[command(name = "tachyon", version, about = "Dirac and tachyon wavepacket scenarios")]
struct Args {
    /// Configuration file with key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    manifest_only: bool,
    /// Overrides: key=value, --key value or --key=value.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    settings: Vec<String>,
}

/// Resolves a configuration from an optional file plus overrides.
pub fn resolve(file: Option<&Path>, overrides: &[String]) -> Result<Config, CliError> {
    let mut settings = match file {
        Some(path) => parse_lines(&fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    settings.extend(parse_overrides(overrides)?);
    Config::resolve(&settings)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let config = match resolve(args.config.as_deref(), &args.settings) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if args.manifest_only {
        print!("{}", manifest_body(&config));
        return 0;
    }
    match run(&config) {
        Ok(report) => {
            print!("{}", report.summary.to_csv());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
