use std::time::Instant;

use highs::{HighsModelStatus, HighsOptionValue, HighsSolutionStatus, RowProblem, Sense};

use super::{
    ConstraintSense, MipError, MipModel, Solution, SolveOptions, SolveStatus, SolverBackend,
    VarKind,
};

/// In-process HiGHS.
#[derive(Debug, Clone, Default)]
pub struct HighsBackend {
    /// Feasibility tolerance passed to HiGHS for primal rows and integrality.
    pub feasibility_tolerance: Option<f64>,
}

impl SolverBackend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &MipModel, options: &SolveOptions) -> Result<Solution, MipError> {
        let start = Instant::now();
        if model.num_vars() == 0 {
            return Ok(Solution {
                status: SolveStatus::Optimal,
                objective: 0.0,
                values: Vec::new(),
                wall_time: start.elapsed(),
                mip_gap: 0.0,
                detail: None,
            });
        }
        let first = run(model, options, self.feasibility_tolerance, true)?;
        // HiGHS presolve may only prove "infeasible or unbounded"; settle it
        // without presolve.
        let outcome = if first.0 == HighsModelStatus::UnboundedOrInfeasible {
            run(model, options, self.feasibility_tolerance, false)?
        } else {
            first
        };
        let (status, has_solution, objective, values, gap) = outcome;
        let wall_time = start.elapsed();

        let mapped = match status {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded => SolveStatus::Unbounded,
            HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Infeasible,
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget
                if has_solution =>
            {
                SolveStatus::Feasible
            }
            HighsModelStatus::ReachedTimeLimit => {
                return Ok(Solution::without_values(
                    SolveStatus::Error,
                    wall_time,
                    Some("time limit reached with no incumbent".into()),
                ))
            }
            other => {
                return Ok(Solution::without_values(
                    SolveStatus::Error,
                    wall_time,
                    Some(format!("HiGHS status {other:?}")),
                ))
            }
        };
        if !mapped.has_values() {
            return Ok(Solution::without_values(mapped, wall_time, None));
        }
        Ok(Solution {
            status: mapped,
            objective,
            values,
            wall_time,
            mip_gap: if gap.is_finite() { gap } else { 0.0 },
            detail: None,
        })
    }
}

type RunOutcome = (HighsModelStatus, bool, f64, Vec<f64>, f64);

fn run(
    model: &MipModel,
    options: &SolveOptions,
    feasibility_tolerance: Option<f64>,
    presolve: bool,
) -> Result<RunOutcome, MipError> {
    let mut pb = RowProblem::default();
    let cols: Vec<_> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let cost = model.objective_coef(super::VarId(j));
            let bounds = v.lower..=v.upper;
            match v.kind {
                VarKind::Continuous => pb.add_column(cost, bounds),
                VarKind::Integer => pb.add_integer_column(cost, bounds),
            }
        })
        .collect();
    for c in model.constraints() {
        let row = c.terms.iter().map(|&(v, a)| (cols[v.0], a));
        match c.sense {
            ConstraintSense::Le => pb.add_row(..=c.rhs, row),
            ConstraintSense::Ge => pb.add_row(c.rhs.., row),
            ConstraintSense::Eq => pb.add_row(c.rhs..=c.rhs, row),
        }
    }

    let mut hm = pb.optimise(Sense::Minimise);
    hm.make_quiet();
    set_option(&mut hm, "mip_rel_gap", options.gap_tolerance)?;
    set_option(&mut hm, "time_limit", options.time_limit.as_secs_f64())?;
    set_option(&mut hm, "random_seed", options.seed as i32)?;
    if let Some(tol) = feasibility_tolerance {
        set_option(&mut hm, "primal_feasibility_tolerance", tol)?;
        set_option(&mut hm, "mip_feasibility_tolerance", tol)?;
    }
    if !presolve {
        set_option(&mut hm, "presolve", "off")?;
    }
    if let Some(start) = &options.initial_solution {
        if start.len() == model.num_vars() {
            hm.try_set_solution(Some(start), None, None, None)
                .map_err(|e| MipError::Backend(format!("HiGHS rejected start point: {e:?}")))?;
        }
    }

    let solved = hm
        .try_solve()
        .map_err(|e| MipError::Backend(format!("HiGHS run failed: {e:?}")))?;
    let status = solved.status();
    let has_solution = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
    let (objective, values, gap) = if has_solution {
        let sol = solved.get_solution();
        let gap = if model.num_integer_vars() > 0 {
            solved.mip_gap()
        } else {
            0.0
        };
        (solved.objective_value(), sol.columns().to_vec(), gap)
    } else {
        (f64::NAN, Vec::new(), f64::NAN)
    };
    Ok((status, has_solution, objective, values, gap))
}

fn set_option<V: HighsOptionValue>(
    hm: &mut highs::Model,
    name: &str,
    value: V,
) -> Result<(), MipError> {
    hm.try_set_option(name, value)
        .map_err(|_| MipError::Backend(format!("HiGHS rejected option {name}")))
}
