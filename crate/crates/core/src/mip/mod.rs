//! Solver-independent MIP container, LP/MPS export and solve backends.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

mod check;
mod export;
mod highs_backend;
mod model;
mod subprocess;

pub use check::{check_solution, FeasibilityViolation};
pub use export::{export_model, ExportFormat};
pub use highs_backend::HighsBackend;
pub use model::{Constraint, ConstraintSense, MipModel, VarId, VarKind, Variable};
pub use subprocess::{parse_highs_solution, SubprocessBackend, SOLVER_PATH_ENV};

/// Absolute tolerance for constraint and integrality checks.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MipError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    InvalidBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("integer variable `{0}` needs finite bounds")]
    UnboundedInteger(String),
    #[error("reference to unknown variable index {0}")]
    UnknownVariable(usize),
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("name `{name}` cannot be written in {format} format")]
    IllegalName { name: String, format: &'static str },
    #[error("solver backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("solver failed: {0}")]
    Backend(String),
    #[error("i/o while talking to the solver: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
    Error,
}

impl SolveStatus {
    pub fn has_values(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: f64,
    /// Values indexed by [`VarId`]; empty unless `status.has_values()`.
    pub values: Vec<f64>,
    pub wall_time: Duration,
    pub mip_gap: f64,
    /// Free-form detail, set for `Error` statuses.
    pub detail: Option<String>,
}

impl Solution {
    pub fn without_values(
        status: SolveStatus,
        wall_time: Duration,
        detail: Option<String>,
    ) -> Self {
        Solution {
            status,
            objective: f64::NAN,
            values: Vec::new(),
            wall_time,
            mip_gap: f64::NAN,
            detail,
        }
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    pub fn values_by_name(&self, model: &MipModel) -> BTreeMap<String, f64> {
        model
            .variables()
            .iter()
            .zip(&self.values)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub gap_tolerance: f64,
    pub time_limit: Duration,
    pub seed: u32,
    /// Warm start; ignored unless it has one value per variable.
    pub initial_solution: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap_tolerance: 1e-4,
            time_limit: Duration::from_secs(600),
            seed: 0,
            initial_solution: None,
        }
    }
}

/// A MIP solver. Implementations must honour the model's variable order when
/// returning values.
pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MipModel, options: &SolveOptions) -> Result<Solution, MipError>;
}

/// Validates the model, runs the backend and snaps integer variables that are
/// within tolerance of an integer.
pub fn solve(
    model: &MipModel,
    backend: &dyn SolverBackend,
    options: &SolveOptions,
) -> Result<Solution, MipError> {
    model.validate()?;
    let mut sol = backend.solve(model, options)?;
    if sol.status.has_values() {
        if sol.values.len() != model.num_vars() {
            return Err(MipError::Backend(format!(
                "{} returned {} values for {} variables",
                backend.name(),
                sol.values.len(),
                model.num_vars()
            )));
        }
        for (v, x) in model.variables().iter().zip(sol.values.iter_mut()) {
            if v.kind == VarKind::Integer && (*x - x.round()).abs() <= FEASIBILITY_TOL {
                *x = x.round();
            }
        }
    }
    Ok(sol)
}
