//! External solver run as a child process.
//!
//! The model is written to a scratch directory, the executable is started with
//! an argument template and the solution file it leaves behind is parsed. The
//! defaults follow the HiGHS command line (`highs --model_file … --solution_file
//! … --options_file …`) and its raw solution format.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use super::{
    export_model, ExportFormat, MipError, MipModel, Solution, SolveOptions, SolveStatus,
    SolverBackend,
};

/// Environment variable naming the external solver executable.
pub const SOLVER_PATH_ENV: &str = "UC_SOLVER_PATH";

#[derive(Debug, Clone)]
pub struct SubprocessBackend {
    pub executable: PathBuf,
    /// Arguments; `{model}`, `{solution}`, `{options}`, `{time_limit}`, `{gap}`
    /// and `{seed}` are substituted.
    pub args: Vec<String>,
    pub format: ExportFormat,
}

impl SubprocessBackend {
    pub fn highs(executable: impl Into<PathBuf>) -> Self {
        SubprocessBackend {
            executable: executable.into(),
            args: [
                "--model_file",
                "{model}",
                "--solution_file",
                "{solution}",
                "--options_file",
                "{options}",
                "--time_limit",
                "{time_limit}",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            format: ExportFormat::Mps,
        }
    }

    /// HiGHS-style backend for the executable named by `UC_SOLVER_PATH`.
    pub fn from_env() -> Result<Self, MipError> {
        std::env::var_os(SOLVER_PATH_ENV)
            .map(Self::highs)
            .ok_or_else(|| MipError::BackendUnavailable(format!("{SOLVER_PATH_ENV} is not set")))
    }
}

impl SolverBackend for SubprocessBackend {
    fn name(&self) -> &str {
        "subprocess"
    }

    fn solve(&self, model: &MipModel, options: &SolveOptions) -> Result<Solution, MipError> {
        let start = Instant::now();
        let text = export_model(model, self.format)?;
        let dir = tempfile::tempdir()?;
        let model_path = dir
            .path()
            .join(format!("model.{}", self.format.extension()));
        let solution_path = dir.path().join("model.sol");
        let options_path = dir.path().join("highs.opt");
        fs::write(&model_path, text)?;
        fs::write(
            &options_path,
            format!(
                "mip_rel_gap = {}\nrandom_seed = {}\nwrite_solution_style = 0\n",
                options.gap_tolerance, options.seed
            ),
        )?;

        let subst = |arg: &str| {
            arg.replace("{model}", &model_path.to_string_lossy())
                .replace("{solution}", &solution_path.to_string_lossy())
                .replace("{options}", &options_path.to_string_lossy())
                .replace(
                    "{time_limit}",
                    &options.time_limit.as_secs_f64().to_string(),
                )
                .replace("{gap}", &options.gap_tolerance.to_string())
                .replace("{seed}", &options.seed.to_string())
        };
        let output = Command::new(&self.executable)
            .args(self.args.iter().map(|a| subst(a)))
            .output()
            .map_err(|e| {
                MipError::BackendUnavailable(format!("{}: {e}", self.executable.display()))
            })?;
        if !output.status.success() && !solution_path.exists() {
            return Ok(Solution::without_values(
                SolveStatus::Error,
                start.elapsed(),
                Some(format!(
                    "{} exited with {}: {}",
                    self.executable.display(),
                    output.status,
                    String::from_utf8_lossy(&output.stderr).trim()
                )),
            ));
        }
        let text = fs::read_to_string(&solution_path).map_err(|e| {
            MipError::Backend(format!(
                "no solution file from {}: {e}",
                self.executable.display()
            ))
        })?;
        let mut sol = parse_highs_solution(&text, model)?;
        sol.wall_time = start.elapsed();
        Ok(sol)
    }
}

/// Parses a HiGHS raw-style solution file and orders the column values like
/// `model`'s variables.
pub fn parse_highs_solution(text: &str, model: &MipModel) -> Result<Solution, MipError> {
    let bad = |msg: &str| MipError::Backend(format!("malformed solution file: {msg}"));
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    let mut i = 0;
    let next_after = |i: &mut usize, header: &str| -> Option<usize> {
        while *i < lines.len() {
            if lines[*i] == header {
                *i += 1;
                return Some(*i);
            }
            *i += 1;
        }
        None
    };

    let at = next_after(&mut i, "Model status").ok_or_else(|| bad("missing model status"))?;
    let model_status = lines.get(at).copied().unwrap_or("").to_ascii_lowercase();
    let at = next_after(&mut i, "# Primal solution values")
        .ok_or_else(|| bad("missing primal section"))?;
    let primal = lines.get(at).copied().unwrap_or("").to_ascii_lowercase();

    let status = if model_status == "optimal" {
        SolveStatus::Optimal
    } else if model_status.contains("infeasible") && !model_status.contains("unbounded") {
        SolveStatus::Infeasible
    } else if model_status.contains("unbounded") && !model_status.contains("infeasible") {
        SolveStatus::Unbounded
    } else if model_status.contains("infeasible") {
        SolveStatus::Infeasible
    } else if primal == "feasible" {
        SolveStatus::Feasible
    } else {
        return Ok(Solution::without_values(
            SolveStatus::Error,
            Default::default(),
            Some(format!(
                "solver reported `{model_status}` without a solution"
            )),
        ));
    };
    if !status.has_values() || primal != "feasible" {
        let status = if status.has_values() {
            SolveStatus::Error
        } else {
            status
        };
        return Ok(Solution::without_values(status, Default::default(), None));
    }

    i = at + 1;
    let objective = lines
        .get(i)
        .and_then(|l| l.strip_prefix("Objective"))
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(|| bad("missing objective"))?;
    i += 1;
    let count = lines
        .get(i)
        .and_then(|l| l.strip_prefix("# Columns"))
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(|| bad("missing column count"))?;
    i += 1;

    let mut by_name: HashMap<&str, f64> = HashMap::with_capacity(count);
    for k in 0..count {
        let line = lines
            .get(i + k)
            .ok_or_else(|| bad("truncated column list"))?;
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(&format!("bad column line `{line}`")));
        };
        let value = value
            .parse::<f64>()
            .map_err(|_| bad(&format!("bad value in `{line}`")))?;
        by_name.insert(name, value);
    }

    let values = model
        .variables()
        .iter()
        .map(|v| {
            by_name
                .get(v.name.as_str())
                .copied()
                .ok_or_else(|| bad(&format!("no value for {}", v.name)))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(Solution {
        status,
        objective,
        values,
        wall_time: Default::default(),
        mip_gap: 0.0,
        detail: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::ConstraintSense;

    fn model() -> MipModel {
        let mut m = MipModel::new("t");
        let x = m.continuous("x", 0.0, 10.0).unwrap();
        let y = m.integer("y", 0.0, 5.0).unwrap();
        m.add_constraint("c", [(x, 1.0), (y, 1.0)], ConstraintSense::Ge, 3.0)
            .unwrap();
        m
    }

    #[test]
    fn parses_raw_solution() {
        let text = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 4.5\n# Columns 2\ny 2\nx 1.5\n# Rows 1\nc 3.5\n\n# Dual solution values\nNone\n";
        let s = parse_highs_solution(text, &model()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, 4.5);
        assert_eq!(s.values, vec![1.5, 2.0]);
    }

    #[test]
    fn infeasible_has_no_values() {
        let text = "Model status\nInfeasible\n\n# Primal solution values\nNone\n";
        let s = parse_highs_solution(text, &model()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.values.is_empty());
    }

    #[test]
    fn missing_column_is_an_error() {
        let text = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 1\n# Columns 1\nx 1\n";
        assert!(parse_highs_solution(text, &model()).is_err());
    }

    #[test]
    fn missing_executable_reports_unavailable() {
        let b = SubprocessBackend::highs("/nonexistent/solver-binary");
        let r = b.solve(&model(), &SolveOptions::default());
        assert!(matches!(r, Err(MipError::BackendUnavailable(_))));
    }
}
