//! Command-line front end. `run` is kept separate from `main` so the whole
//! pipeline, exit codes included, can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{apply_overrides, parse_scenario_file, Override, ScenarioFile};
use crate::error::{Error, Result};
use crate::geometry::normalize_angle;
use crate::output::{self, CsvTable, Field};
use crate::propagation::{coverage_grid, CoverageSetup, Execution};
use crate::scenario::{all_selections, distance_run, rotation_sweep, run_comparison, run_scenario, RunMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "v2x-beam", version, about = "Switched sector-antenna V2X link simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-element gain over azimuth at 0.1° resolution.
    Pattern(CommonArgs),
    /// Turntable sweep of all elements.
    Sweep(CommonArgs),
    /// Straight-ahead received power over distance for every radiator.
    Link(CommonArgs),
    /// Received-power raster around one transmitter.
    Coverage(CoverageArgs),
    /// Trajectory run with automatic switching (or omni only).
    Run(CommonArgs),
    /// Switched minus omni-only RSSI along the trajectory.
    Compare(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override a configuration key, e.g. `antenna.peak_gain=12`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, value_parser = ["switched", "omni"])]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write a north-up `;`-separated raster.
    #[arg(long, value_name = "PATH")]
    pub raster: Option<PathBuf>,
}

fn load(args: &CommonArgs, required: bool) -> Result<ScenarioFile> {
    let mut overrides = args
        .overrides
        .iter()
        .map(|s| s.parse::<Override>())
        .collect::<Result<Vec<_>>>()?;
    if let Some(mode) = &args.mode {
        let mode: RunMode = mode.parse()?;
        overrides.push(Override {
            key: "mode".into(),
            value: format!("\"{mode}\""),
        });
    }
    match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            parse_scenario_file(&text, &overrides)
        }
        None if required => Err(Error::Config("--config is required for this subcommand".into())),
        None => apply_overrides(&ScenarioFile::default(), &overrides),
    }
}

fn pattern_table(file: &ScenarioFile) -> Result<CsvTable> {
    let array = &file.scenario.array;
    let mut csv = CsvTable::new(output::SWEEP_HEADER);
    // (−180, 180] in tenths of a degree
    for i in -1799..=1800 {
        let theta = f64::from(i) / 10.0;
        let rel = normalize_angle(theta)?;
        for sel in all_selections() {
            csv.push(vec![
                Field::Num(theta),
                Field::Text(sel.to_string()),
                Field::Num(array.gain(sel, rel)),
            ]);
        }
    }
    Ok(csv)
}

fn write(text: &str, out: Option<&Path>) -> Result<()> {
    output::emit(text, out).map_err(Error::from)
}

/// Executes one parsed command.
pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Pattern(args) => {
            let file = load(args, false)?;
            write(&pattern_table(&file)?.render(), args.out.as_deref())
        }
        Command::Sweep(args) => {
            let file = load(args, false)?;
            let table = rotation_sweep(&file.scenario.array, file.sweep.half_range, file.sweep.step)?;
            write(&output::sweep_table(&table).render(), args.out.as_deref())
        }
        Command::Link(args) => {
            let file = load(args, false)?;
            let rows = distance_run(&file.scenario, &file.link.distances)?;
            write(&output::link_table(&rows).render(), args.out.as_deref())
        }
        Command::Coverage(cov) => {
            let file = load(&cov.common, true)?;
            let s = &file.scenario;
            let c = &file.coverage;
            let setup = CoverageSetup {
                environment: &s.environment,
                tx: c.tx,
                array: &s.array,
                selection: c.selection,
                heading: c.heading()?,
                budget_template: s.budget_template(c.selection),
                frequency: s.frequency,
                region: c.region(),
            };
            let grid = coverage_grid(&setup, Execution::Parallel)?;
            if let Some(path) = &cov.raster {
                write(&output::coverage_raster(&grid), Some(path))?;
            }
            write(&output::coverage_table(&grid).render(), cov.common.out.as_deref())
        }
        Command::Run(args) => {
            let file = load(args, true)?;
            let results = run_scenario(&file.scenario)?;
            write(&output::run_table(&results).render(), args.out.as_deref())
        }
        Command::Compare(args) => {
            let file = load(args, true)?;
            let (_, _, cmp) = run_comparison(&file.scenario)?;
            write(&output::compare_table(&cmp).render(), args.out.as_deref())
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
