//! Minimal HiGHS front end that accepts the same flags as the `highs` command
//! line and writes a raw solution file. Used as the default external solver
//! when the real executable is not installed.

use std::ffi::{c_void, CString};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use highs_sys::*;

#[derive(Parser)]
#[command(about = "Solve an LP/MPS model with HiGHS")]
struct Args {
    #[arg(long = "model_file")]
    model_file: PathBuf,
    #[arg(long = "solution_file")]
    solution_file: Option<PathBuf>,
    #[arg(long = "options_file")]
    options_file: Option<PathBuf>,
    #[arg(long = "time_limit")]
    time_limit: Option<f64>,
}

struct Highs(*mut c_void);

impl Drop for Highs {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.0) }
    }
}

fn cstr(p: &std::path::Path) -> CString {
    CString::new(p.to_string_lossy().as_bytes()).expect("path contains NUL")
}

fn main() -> ExitCode {
    let args = Args::parse();
    let h = Highs(unsafe { Highs_create() });
    let ok = |status: HighsInt| status != kHighsStatusError;
    unsafe {
        let flag = CString::new("output_flag").unwrap();
        Highs_setBoolOptionValue(h.0, flag.as_ptr(), 0);
        if let Some(opts) = &args.options_file {
            if !ok(Highs_readOptions(h.0, cstr(opts).as_ptr())) {
                eprintln!("cannot read options file {}", opts.display());
                return ExitCode::FAILURE;
            }
        }
        if let Some(limit) = args.time_limit {
            let name = CString::new("time_limit").unwrap();
            Highs_setDoubleOptionValue(h.0, name.as_ptr(), limit);
        }
        if !ok(Highs_readModel(h.0, cstr(&args.model_file).as_ptr())) {
            eprintln!("cannot read model {}", args.model_file.display());
            return ExitCode::FAILURE;
        }
        if !ok(Highs_run(h.0)) {
            eprintln!("HiGHS run failed");
            return ExitCode::FAILURE;
        }
        if let Some(sol) = &args.solution_file {
            if !ok(Highs_writeSolution(h.0, cstr(sol).as_ptr())) {
                eprintln!("cannot write {}", sol.display());
                return ExitCode::FAILURE;
            }
        }
    }
    ExitCode::SUCCESS
}
