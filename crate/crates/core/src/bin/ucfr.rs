//! Command-line front end: run, sweep, verify and export scenarios.
//!
//! Exit status is 0 on success, 1 for invalid input or usage, 2 when a
//! solve or a frequency verification fails.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use uc_core::mip::{
    export_model, ExportFormat, HighsBackend, SolveOptions, SolverBackend, SubprocessBackend,
    SOLVER_PATH_ENV,
};
use uc_core::runner::{
    build_model, effectiveness_grid, efr_sweep, read_hourly_csv, run_scenario, seasonal_report,
    verify_saved, write_grid_csv, write_hourly_csv, write_seasonal_csv, write_summary_json,
    write_sweep_csv, RunError, RunOptions, Verification,
};
use uc_core::fr::segments_with;
use uc_core::system::{load_scenario, validate_scenario, Scenario};

#[derive(Parser)]
#[command(name = "ucfr", version, about = "Unit commitment with multi-speed frequency response")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and verify every hour.
    Run {
        config: PathBuf,
        /// EFR capacity in MW.
        #[arg(long, default_value_t = 0.0)]
        efr: f64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Effectiveness grid bins per axis (with --efr > 0).
        #[arg(long, default_value_t = 5)]
        bins: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the scenario at several EFR levels.
    Sweep {
        config: PathBuf,
        /// Comma-separated MW, ascending, starting at 0.
        #[arg(long, value_delimiter = ',', default_value = "0,100,200")]
        levels: Vec<f64>,
        /// Directory for sweep.csv; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-simulate the hours of a saved hourly.csv.
    Verify { config: PathBuf, hourly: PathBuf },
    /// Write the first window's model without solving.
    ExportModel {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Lp)]
        format: Format,
        #[arg(long, default_value_t = 0.0)]
        efr: f64,
        /// Leave out the frequency-response constraints.
        #[arg(long)]
        no_fr: bool,
        #[arg(long)]
        windows: Option<usize>,
        #[arg(long)]
        segments: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Solver::Highs)]
    solver: Solver,
    /// External solver executable (default: $UC_SOLVER_PATH, then the
    /// bundled `mipsolve`).
    #[arg(long)]
    solver_path: Option<PathBuf>,
    /// Rolling window length in hours.
    #[arg(long)]
    windows: Option<usize>,
    /// Chord segments of the nadir linearisation.
    #[arg(long)]
    segments: Option<usize>,
    /// Relative MIP gap.
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    /// Seconds per window.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u32,
    /// Plain unit commitment without frequency constraints.
    #[arg(long)]
    no_fr: bool,
    /// Fail on the first hour that breaches a frequency limit.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Highs,
    Subprocess,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lp,
    Mps,
}

/// Error with its exit status.
struct Failure(u8, String);

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure(e.exit_code() as u8, e.to_string())
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure(1, e.to_string())
}

fn output<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure(1, format!("cannot write {}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let s = load_scenario(path).map_err(input)?;
    let v = validate_scenario(&s);
    if !v.is_empty() {
        return Err(RunError::Validation(v).into());
    }
    Ok(s)
}

impl Common {
    fn backend(&self) -> Result<Box<dyn SolverBackend>, Failure> {
        match self.solver {
            Solver::Highs => Ok(Box::new(HighsBackend::default())),
            Solver::Subprocess => {
                let exe = self
                    .solver_path
                    .clone()
                    .or_else(|| std::env::var_os(SOLVER_PATH_ENV).map(PathBuf::from))
                    .or_else(bundled_solver)
                    .ok_or_else(|| {
                        Failure(1, format!("no solver executable: pass --solver-path or set {SOLVER_PATH_ENV}"))
                    })?;
                Ok(Box::new(SubprocessBackend::highs(exe)))
            }
        }
    }

    fn options(&self) -> Result<RunOptions, Failure> {
        if !(self.gap >= 0.0 && self.time_limit > 0.0) {
            return Err(Failure(1, "--gap must be ≥ 0 and --time-limit > 0".into()));
        }
        Ok(RunOptions {
            solve: SolveOptions {
                gap_tolerance: self.gap,
                time_limit: Duration::from_secs_f64(self.time_limit),
                seed: self.seed,
                initial_solution: None,
            },
            window_hours: self.windows,
            chord_segments: self.segments,
            frequency_constraints: !self.no_fr,
            verification: if self.strict {
                Verification::Strict
            } else {
                Verification::Report
            },
        })
    }
}

fn bundled_solver() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let sibling = exe.with_file_name(format!("mipsolve{}", std::env::consts::EXE_SUFFIX));
    sibling.is_file().then_some(sibling)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(output(path))
}

fn run(config: &Path, efr: f64, out: &Path, bins: usize, common: &Common) -> Result<(), Failure> {
    let s = load(config)?;
    let backend = common.backend()?;
    let opts = common.options()?;
    fs::create_dir_all(out).map_err(output(out))?;
    let (result, reference) = if efr > 0.0 && !common.no_fr {
        let mut sw = efr_sweep(&s, &[0.0, efr], backend.as_ref(), &opts)?;
        let with = sw.results.pop().expect("two levels");
        let without = sw.results.pop().expect("two levels");
        (with, Some(without))
    } else {
        (run_scenario(&s, efr, backend.as_ref(), &opts)?, None)
    };
    let summary = out.join("summary.json");
    write_summary_json(&result, &summary).map_err(output(&summary))?;
    let hourly = out.join("hourly.csv");
    write_hourly_csv(&result, create(&hourly)?).map_err(output(&hourly))?;
    if let Some(without) = reference {
        let path = out.join("hourly_no_efr.csv");
        write_hourly_csv(&without, create(&path)?).map_err(output(&path))?;
        let path = out.join("seasonal.csv");
        let rows = seasonal_report(&without, &result)?;
        write_seasonal_csv(&rows, create(&path)?).map_err(output(&path))?;
        let path = out.join("grid.csv");
        let grid = effectiveness_grid(&without, &result, efr, bins)?;
        write_grid_csv(&grid, create(&path)?).map_err(output(&path))?;
    }
    let t = &result.totals;
    println!(
        "{}: total £{:.0} (energy £{:.0}, balancing £{:.0}) over {} h",
        result.scenario,
        t.total_cost_gbp,
        t.energy_cost_gbp,
        t.balancing_cost_gbp,
        result.horizon()
    );
    if let Some(c) = &result.compliance {
        println!(
            "frequency check: {}/{} hours within limits (worst nadir margin {:.4} Hz, worst QSS margin {:.4} Hz)",
            c.hours_passed, c.hours_checked, c.worst_nadir_margin_hz, c.worst_qss_margin_hz
        );
    }
    info!("results written to {}", out.display());
    Ok(())
}

fn sweep(config: &Path, levels: &[f64], out: Option<&Path>, common: &Common) -> Result<(), Failure> {
    let s = load(config)?;
    let backend = common.backend()?;
    let sw = efr_sweep(&s, levels, backend.as_ref(), &common.options()?)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(output(dir))?;
            let path = dir.join("sweep.csv");
            write_sweep_csv(&sw.rows, create(&path)?).map_err(output(&path))?;
        }
        None => match write_sweep_csv(&sw.rows, io::stdout().lock()) {
            Err(e) if !matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe) => {
                return Err(Failure(1, e.to_string()))
            }
            _ => {}
        },
    }
    Ok(())
}

fn verify(config: &Path, hourly: &Path) -> Result<(), Failure> {
    let s = load(config)?;
    let file = File::open(hourly).map_err(|e| Failure(1, format!("cannot read {}: {e}", hourly.display())))?;
    let saved = read_hourly_csv(file).map_err(input)?;
    let checks = verify_saved(&s, &saved)?;
    let mut failed = 0;
    for (h, c) in saved.iter().zip(&checks) {
        if !c.passed {
            failed += 1;
            println!(
                "hour {}: nadir {:.4} Hz (margin {:.4}), QSS {:.4} Hz (margin {:.4})",
                h.hour, c.nadir_hz, c.nadir_margin_hz, c.qss_hz, c.qss_margin_hz
            );
        }
    }
    println!("{}/{} hours within limits", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(Failure(2, format!("{failed} hours breach a frequency limit")));
    }
    Ok(())
}

fn export(
    config: &Path,
    format: Format,
    efr: f64,
    no_fr: bool,
    windows: Option<usize>,
    segments: Option<usize>,
) -> Result<(), Failure> {
    let s = load(config)?.with_efr(efr);
    let len = windows.unwrap_or(s.settings.window_hours).clamp(1, s.horizon());
    let seg = if no_fr {
        None
    } else {
        Some(segments_with(&s, segments.unwrap_or(s.settings.chord_segments)).map_err(RunError::from)?)
    };
    let w = s.window(0, len, s.initial_state.clone());
    let (m, _) = build_model(&w, seg.as_ref())?;
    let format = match format {
        Format::Lp => ExportFormat::Lp,
        Format::Mps => ExportFormat::Mps,
    };
    let text = export_model(&m, format).map_err(|e| Failure(2, e.to_string()))?;
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure(1, e.to_string())),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Run {
            config,
            efr,
            out,
            bins,
            common,
        } => run(config, *efr, out, *bins, common),
        Command::Sweep {
            config,
            levels,
            out,
            common,
        } => sweep(config, levels, out.as_deref(), common),
        Command::Verify { config, hourly } => verify(config, hourly),
        Command::ExportModel {
            config,
            format,
            efr,
            no_fr,
            windows,
            segments,
        } => export(config, *format, *efr, *no_fr, *windows, *segments),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
