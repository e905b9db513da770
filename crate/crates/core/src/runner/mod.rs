//! End-to-end scenario runs: rolling-window solves with and without the
//! frequency constraints, per-hour swing verification, cost accounting and
//! the EFR analyses built on top.

use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fr::{
    add_fr_constraints, efr_inertia_shift, requirement_breakdown, segments_with, BindingTag,
    ChordSegmentSet, FrError, FrRequirementHour,
};
use crate::mip::{solve, MipError, MipModel, SolveOptions, SolveStatus, SolverBackend};
use crate::swing::{
    check_compliance, simulate_until_settled, FrequencyLimit, ResponsePortfolio, SwingError,
    DEFAULT_DT_S, DEFAULT_T_END_S,
};
use crate::system::{validate_scenario, InitialGroupState, Scenario, Violation};
use crate::uc::{build_uc, ident, UcVariableIndex};

mod analysis;
mod output;
pub mod stats;

pub use analysis::{
    effectiveness_grid, efr_sweep, hourly_offsets, season_of_hour, seasonal_report, EfrSweep,
    EffectivenessGrid, GridBin, Season, SeasonRow, SweepRow,
};
pub use output::{
    read_hourly_csv, verify_saved, write_grid_csv, write_hourly_csv, write_seasonal_csv,
    write_summary_json, write_sweep_csv, SavedHour, Summary, HOURLY_FIXED_COLUMNS,
};

/// Verification runs until the mean rate of change of frequency over the
/// last 10 s is below this, so slow approaches to the QSS are not cut short.
pub const SETTLE_ROCOF_HZ_PER_S: f64 = 2e-6;
/// Upper limit on the settling run.
pub const SETTLE_MAX_S: f64 = 1800.0;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid scenario:\n{}", list(.0))]
    Validation(Vec<Violation>),
    #[error("hour {hour}: {reason}")]
    InfeasibleHour { hour: usize, reason: String },
    #[error("window covering hours {first}..={last} is infeasible: {diagnostic}")]
    InfeasibleWindow {
        first: usize,
        last: usize,
        diagnostic: String,
    },
    #[error("window covering hours {first}..={last}: solver returned {status:?}{}", .detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default())]
    SolverFailed {
        first: usize,
        last: usize,
        status: SolveStatus,
        detail: Option<String>,
    },
    #[error("hour {hour} fails the {} (nadir margin {nadir_margin_hz:.4} Hz, QSS margin {qss_margin_hz:.4} Hz)", limits(.violated))]
    Verification {
        hour: usize,
        nadir_margin_hz: f64,
        qss_margin_hz: f64,
        violated: Vec<FrequencyLimit>,
    },
    #[error("EFR levels must be ascending and start at 0, got {0:?}")]
    BadLevels(Vec<f64>),
    #[error("results cover {0} and {1} hours")]
    HorizonMismatch(usize, usize),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Fr(#[from] FrError),
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error(transparent)]
    Swing(#[from] SwingError),
}

fn list(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn limits(v: &[FrequencyLimit]) -> String {
    v.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" and ")
}

impl RunError {
    /// 1 for bad input, 2 for anything the solve or verification produced.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_)
            | RunError::BadLevels(_)
            | RunError::HorizonMismatch(..)
            | RunError::InvalidArgument(_) => 1,
            RunError::Fr(FrError::NoSegments | FrError::InvalidRange { .. }) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verification {
    Off,
    /// Check every hour and record the outcome.
    #[default]
    Report,
    /// As `Report`, but the first failing hour is an error.
    Strict,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub solve: SolveOptions,
    /// Overrides the scenario's window length.
    pub window_hours: Option<usize>,
    /// Overrides the scenario's chord count.
    pub chord_segments: Option<usize>,
    /// Solve the scheduled case with frequency constraints. Without them
    /// the run is a plain unit commitment and nothing is verified.
    pub frequency_constraints: bool,
    pub verification: Verification,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            solve: SolveOptions::default(),
            window_hours: None,
            chord_segments: None,
            frequency_constraints: true,
            verification: Verification::Report,
        }
    }
}

impl RunOptions {
    fn window(&self, s: &Scenario) -> usize {
        self.window_hours.unwrap_or(s.settings.window_hours).max(1)
    }

    fn segments(&self, s: &Scenario) -> usize {
        self.chord_segments.unwrap_or(s.settings.chord_segments)
    }
}

/// UC model with the frequency constraints added when `segments` is given.
pub fn build_model(
    s: &Scenario,
    segments: Option<&ChordSegmentSet<f64>>,
) -> Result<(MipModel, UcVariableIndex), RunError> {
    let (mut m, idx) = build_uc(s, segments.is_some())?;
    if let Some(seg) = segments {
        add_fr_constraints(&mut m, &idx, s, seg)?;
    }
    Ok((m, idx))
}

/// Operating cost split by component, £.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub startup: f64,
    pub no_load: f64,
    pub marginal: f64,
    pub curtailment: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.startup + self.no_load + self.marginal + self.curtailment
    }

    fn add(&mut self, o: &CostBreakdown) {
        self.startup += o.startup;
        self.no_load += o.no_load;
        self.marginal += o.marginal;
        self.curtailment += o.curtailment;
    }
}

/// One solved hour, before verification.
#[derive(Debug, Clone, PartialEq)]
struct SolvedHour {
    dispatch_mw: Vec<f64>,
    online: Vec<u32>,
    startups: Vec<u32>,
    charge_mw: Vec<f64>,
    discharge_mw: Vec<f64>,
    energy_mwh: Vec<f64>,
    curtailment_mw: f64,
    inertia_mva_s: f64,
    /// `(Σ thermal PFR, Σ storage PFR, Σ thermal SFR, Σ storage SFR)`.
    provision: Option<[f64; 4]>,
    cost: CostBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowMeta {
    pub first_hour: usize,
    pub last_hour: usize,
    pub status: SolveStatus,
    pub objective: f64,
    pub mip_gap: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
struct Chain {
    hours: Vec<SolvedHour>,
    windows: Vec<WindowMeta>,
}

/// Largest net demand the fleet can meet and the largest FR holdings it can
/// offer in any hour; used to name hours that no schedule can serve.
fn prescreen(s: &Scenario, segments: Option<&ChordSegmentSet<f64>>) -> Result<(), RunError> {
    let Some(seg) = segments else { return Ok(()) };
    let f = &s.freq;
    let shift = efr_inertia_shift(f);
    let pfr_cap = s.pfr_capability();
    let sfr_cap: f64 = s
        .groups
        .iter()
        .filter(|g| !g.must_run())
        .map(|g| g.n_units as f64 * g.sfr_max_mw.min(g.unit_capacity_mw - g.msg_mw).max(0.0))
        .sum::<f64>()
        + s.storage.iter().map(|st| st.fr_max_mw.min(st.p_discharge_max_mw)).sum::<f64>();
    for (t, &d) in s.profile.demand_mw.iter().enumerate() {
        let h = s.max_inertia(d);
        let nadir = if seg.k() == 0.0 { 0.0 } else { seg.value(h - shift) };
        let pfr = nadir.max(f.pfr_floor(d) - f.efr_mw).max(0.0);
        if pfr > pfr_cap + 1e-6 {
            return Err(RunError::InfeasibleHour {
                hour: t + 1,
                reason: format!(
                    "primary requirement {pfr:.1} MW with every unit online exceeds the {pfr_cap:.1} MW the fleet can hold"
                ),
            });
        }
        let sfr = f.sfr_requirement(d);
        if sfr > sfr_cap + 1e-6 {
            return Err(RunError::InfeasibleHour {
                hour: t + 1,
                reason: format!(
                    "secondary requirement {sfr:.1} MW exceeds the {sfr_cap:.1} MW the fleet can hold"
                ),
            });
        }
    }
    Ok(())
}

/// Names the first hour of an infeasible window: the shortest prefix (with
/// storage free to end anywhere) that no schedule satisfies, and whether
/// dropping the frequency constraints repairs it.
fn diagnose(
    w: &Scenario,
    segments: Option<&ChordSegmentSet<f64>>,
    backend: &dyn SolverBackend,
    opts: &SolveOptions,
) -> String {
    let feasible = |len: usize, seg: Option<&ChordSegmentSet<f64>>| -> bool {
        let prefix = w.window(0, len, w.initial_state.clone());
        let Ok((mut m, _)) = build_model(&prefix, seg) else {
            return false;
        };
        if len < w.horizon() {
            for st in &w.storage {
                m.remove_constraint(&format!("soc_end_{}", ident(&st.name)));
            }
        }
        solve(&m, backend, opts).is_ok_and(|sol| sol.status.has_values())
    };
    for len in 1..=w.horizon() {
        if !feasible(len, segments) {
            let why = if segments.is_some() && feasible(len, None) {
                "frequency-response requirements cannot be met by any reachable commitment"
            } else if len == w.horizon() && !w.storage.is_empty() {
                "storage cannot return to its initial energy by the end of the window"
            } else {
                "demand cannot be balanced within ramp, minimum up/down and storage limits"
            };
            return format!("hour {} of the window: {why}", len);
        }
    }
    "no single hour is infeasible; the window fails only as a whole".into()
}

fn solve_chain(
    s: &Scenario,
    segments: Option<&ChordSegmentSet<f64>>,
    backend: &dyn SolverBackend,
    opts: &RunOptions,
) -> Result<Chain, RunError> {
    let len = opts.window(s);
    let total = s.horizon();
    let mut init = s.initial_state.clone();
    let mut hours = Vec::with_capacity(total);
    let mut windows = Vec::new();
    let mut start = 0;
    while start < total {
        let n = len.min(total - start);
        let w = s.window(start, n, init.clone());
        let (m, idx) = build_model(&w, segments)?;
        let sol = solve(&m, backend, &opts.solve)?;
        let (first, last) = (start + 1, start + n);
        match sol.status {
            SolveStatus::Optimal | SolveStatus::Feasible => {}
            SolveStatus::Infeasible => {
                let local = diagnose(&w, segments, backend, &opts.solve);
                return Err(RunError::InfeasibleWindow {
                    first,
                    last,
                    diagnostic: local,
                });
            }
            status => {
                return Err(RunError::SolverFailed {
                    first,
                    last,
                    status,
                    detail: sol.detail,
                })
            }
        }
        log::info!(
            "{} E={} hours {first}-{last}: {:?} objective {:.2} gap {:.2e} in {:.1} s",
            s.name,
            s.freq.efr_mw,
            sol.status,
            sol.objective,
            sol.mip_gap,
            sol.wall_time.as_secs_f64()
        );
        windows.push(WindowMeta {
            first_hour: first,
            last_hour: last,
            status: sol.status,
            objective: sol.objective,
            mip_gap: sol.mip_gap,
            wall_time_s: sol.wall_time.as_secs_f64(),
        });
        for t in 0..n {
            hours.push(extract_hour(&w, &idx, &sol.values, t));
        }
        let end = hours.last().expect("window has at least one hour");
        init = s
            .groups
            .iter()
            .enumerate()
            .map(|(g, grp)| {
                let online = end.online[g];
                let lo = online as f64 * grp.msg_mw;
                let hi = online as f64 * grp.unit_capacity_mw;
                InitialGroupState {
                    online,
                    output_mw: end.dispatch_mw[g].clamp(lo, hi),
                }
            })
            .collect();
        start += n;
    }
    Ok(Chain { hours, windows })
}

fn count(x: f64) -> u32 {
    x.round().max(0.0) as u32
}

/// Recomputes the hour's cost from the schedule rather than reading the
/// solver's objective.
fn extract_hour(s: &Scenario, idx: &UcVariableIndex, x: &[f64], t: usize) -> SolvedHour {
    let groups = 0..s.groups.len();
    let stores = 0..s.storage.len();
    let dispatch_mw: Vec<f64> = groups.clone().map(|g| x[idx.pgen(t, g).0]).collect();
    let online: Vec<u32> = groups.clone().map(|g| count(x[idx.u(t, g).0])).collect();
    let startups: Vec<u32> = groups.clone().map(|g| count(x[idx.son(t, g).0])).collect();
    let curtailment_mw = x[idx.curtailment(t).0];
    let mut cost = CostBreakdown {
        curtailment: s.settings.curtailment_cost * curtailment_mw,
        ..CostBreakdown::default()
    };
    for (g, grp) in s.groups.iter().enumerate() {
        cost.startup += grp.startup_cost * startups[g] as f64;
        cost.no_load += grp.no_load_cost * online[g] as f64;
        cost.marginal += grp.marginal_cost * dispatch_mw[g];
    }
    let inertia_mva_s = s
        .groups
        .iter()
        .zip(&online)
        .map(|(g, &u)| g.unit_inertia() * u as f64)
        .sum::<f64>()
        + s.profile.demand_mw[t] * s.freq.load_inertia_s;
    let provision = idx.has_fr().then(|| {
        let sum = |f: &dyn Fn(usize) -> f64, r: std::ops::Range<usize>| r.map(f).sum::<f64>();
        [
            sum(&|g| x[idx.pth(t, g).0], groups.clone()),
            sum(&|k| x[idx.ps(t, k).0], stores.clone()),
            sum(&|g| x[idx.sth(t, g).0], groups.clone()),
            sum(&|k| x[idx.ss(t, k).0], stores.clone()),
        ]
    });
    SolvedHour {
        dispatch_mw,
        online,
        startups,
        charge_mw: stores.clone().map(|k| x[idx.charge(t, k).0]).collect(),
        discharge_mw: stores.clone().map(|k| x[idx.discharge(t, k).0]).collect(),
        energy_mwh: stores.map(|k| x[idx.energy(t, k).0]).collect(),
        curtailment_mw,
        inertia_mva_s,
        provision,
        cost,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourCheck {
    pub nadir_hz: f64,
    pub qss_hz: f64,
    pub nadir_margin_hz: f64,
    pub qss_margin_hz: f64,
    pub passed: bool,
    pub sfr_below_pfr: bool,
}

/// Simulates the loss of the largest infeed against the hour's minimum
/// holdings and checks both limits.
pub fn verify_hour(
    s: &Scenario,
    demand_mw: f64,
    inertia_mva_s: f64,
    pfr_mw: f64,
    sfr_mw: f64,
) -> Result<(HourCheck, Vec<FrequencyLimit>), SwingError> {
    let f = &s.freq;
    let p = ResponsePortfolio::from_params(f, inertia_mva_s, demand_mw, pfr_mw, sfr_mw);
    let trace = simulate_until_settled(
        &p,
        DEFAULT_DT_S,
        DEFAULT_T_END_S,
        SETTLE_MAX_S,
        SETTLE_ROCOF_HZ_PER_S,
    )?;
    let r = check_compliance(&trace, f.nadir_deviation_hz, f.qss_deviation_hz);
    Ok((
        HourCheck {
            nadir_hz: r.nadir_deviation_hz,
            qss_hz: r.qss_deviation_hz,
            nadir_margin_hz: r.nadir_margin_hz,
            qss_margin_hz: r.qss_margin_hz,
            passed: r.passed,
            sfr_below_pfr: r.sfr_below_pfr,
        },
        r.violated,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HourResult {
    /// 1-based within the run.
    pub hour: usize,
    pub demand_mw: f64,
    pub wind_mw: f64,
    pub solar_mw: f64,
    pub interconnector_mw: f64,
    pub dispatch_mw: Vec<f64>,
    pub online: Vec<u32>,
    pub startups: Vec<u32>,
    pub charge_mw: Vec<f64>,
    pub discharge_mw: Vec<f64>,
    pub energy_mwh: Vec<f64>,
    pub curtailment_mw: f64,
    pub inertia_mva_s: f64,
    /// Minimum primary requirement at the scheduled inertia; NaN when the
    /// fleet could not meet any requirement (plain UC runs only).
    pub pfr_req_mw: f64,
    pub sfr_req_mw: f64,
    pub binding: Option<BindingTag>,
    pub pfr_thermal_mw: f64,
    pub pfr_storage_mw: f64,
    pub sfr_thermal_mw: f64,
    pub sfr_storage_mw: f64,
    /// Cost of the scheduled (frequency-constrained) hour.
    pub cost_gbp: f64,
    /// Cost of the same hour without frequency constraints.
    pub energy_cost_gbp: f64,
    pub balancing_cost_gbp: f64,
    pub check: Option<HourCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostTotals {
    /// Cost without frequency constraints.
    pub energy_cost_gbp: f64,
    /// Extra cost of the frequency constraints.
    pub balancing_cost_gbp: f64,
    pub total_cost_gbp: f64,
    pub scheduled: CostBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverMetadata {
    pub backend: String,
    pub gap_tolerance: f64,
    pub time_limit_s: f64,
    pub seed: u32,
    pub window_hours: usize,
    pub chord_segments: usize,
    pub frequency_constraints: bool,
    /// Sum of the scheduled windows' solver objectives.
    pub objective_gbp: f64,
    pub max_mip_gap: f64,
    pub wall_time_s: f64,
    pub windows: Vec<WindowMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceSummary {
    pub hours_checked: usize,
    pub hours_passed: usize,
    pub failing_hours: Vec<usize>,
    pub worst_nadir_margin_hz: f64,
    pub worst_qss_margin_hz: f64,
    pub sfr_below_pfr_hours: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub efr_mw: f64,
    pub start_hour_of_year: usize,
    pub group_names: Vec<String>,
    pub storage_names: Vec<String>,
    pub hours: Vec<HourResult>,
    pub totals: CostTotals,
    pub solver: SolverMetadata,
    pub compliance: Option<ComplianceSummary>,
}

impl ScenarioResult {
    pub fn horizon(&self) -> usize {
        self.hours.len()
    }

    pub fn mean_pfr_req(&self) -> f64 {
        mean(self.hours.iter().map(|h| h.pfr_req_mw))
    }

    pub fn mean_sfr_req(&self) -> f64 {
        mean(self.hours.iter().map(|h| h.sfr_req_mw))
    }

    pub fn mean_inertia(&self) -> f64 {
        mean(self.hours.iter().map(|h| h.inertia_mva_s))
    }
}

pub(crate) fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (n, s) = it.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn checked(s: &Scenario) -> Result<(), RunError> {
    let v = validate_scenario(s);
    if v.is_empty() {
        Ok(())
    } else {
        Err(RunError::Validation(v))
    }
}

/// Chord set for the scenario, or `None` when frequency constraints are off.
fn chord_set(s: &Scenario, opts: &RunOptions) -> Result<Option<ChordSegmentSet<f64>>, RunError> {
    if opts.frequency_constraints {
        Ok(Some(segments_with(s, opts.segments(s))?))
    } else {
        Ok(None)
    }
}

/// Solves the scenario with `efr_mw` of EFR, with and without the frequency
/// constraints, and verifies every scheduled hour.
pub fn run_scenario(
    s: &Scenario,
    efr_mw: f64,
    backend: &dyn SolverBackend,
    opts: &RunOptions,
) -> Result<ScenarioResult, RunError> {
    let s = s.with_efr(efr_mw);
    checked(&s)?;
    let segments = chord_set(&s, opts)?;
    prescreen(&s, segments.as_ref())?;
    let (with, without) = if segments.is_some() {
        let (a, b) = rayon::join(
            || solve_chain(&s, segments.as_ref(), backend, opts),
            || solve_chain(&s, None, backend, opts),
        );
        (Some(a?), b?)
    } else {
        (None, solve_chain(&s, None, backend, opts)?)
    };
    assemble(&s, segments.as_ref(), with, &without, backend.name(), opts)
}

fn assemble(
    s: &Scenario,
    segments: Option<&ChordSegmentSet<f64>>,
    with: Option<Chain>,
    without: &Chain,
    backend: &str,
    opts: &RunOptions,
) -> Result<ScenarioResult, RunError> {
    let scheduled = with.as_ref().unwrap_or(without);
    let inertia: Vec<f64> = scheduled.hours.iter().map(|h| h.inertia_mva_s).collect();
    // a plain UC run still reports what its schedule would have required,
    // when the fleet can meet the requirement at all
    let owned;
    let seg = match segments {
        Some(seg) => Some(seg),
        None => {
            owned = segments_with(s, opts.segments(s)).ok();
            owned.as_ref()
        }
    };
    let breakdown: Vec<Option<FrRequirementHour>> = match seg {
        Some(seg) => requirement_breakdown(s, seg, &inertia)
            .into_iter()
            .map(Some)
            .collect(),
        None => vec![None; inertia.len()],
    };
    let verify = with.is_some() && opts.verification != Verification::Off;
    let checks: Vec<Option<(HourCheck, Vec<FrequencyLimit>)>> = if verify {
        breakdown
            .par_iter()
            .zip(&s.profile.demand_mw)
            .map(|(r, &d)| {
                let r = r.expect("frequency-constrained runs have a chord set");
                verify_hour(s, d, r.inertia, r.pfr_req, r.sfr_req).map(Some)
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![None; breakdown.len()]
    };
    if opts.verification == Verification::Strict {
        if let Some((t, (c, v))) = checks
            .iter()
            .enumerate()
            .find_map(|(t, c)| c.as_ref().filter(|c| !c.0.passed).map(|c| (t, c)))
        {
            return Err(RunError::Verification {
                hour: t + 1,
                nadir_margin_hz: c.nadir_margin_hz,
                qss_margin_hz: c.qss_margin_hz,
                violated: v.clone(),
            });
        }
    }

    let p = &s.profile;
    let mut scheduled_cost = CostBreakdown::default();
    let mut energy = 0.0;
    let hours: Vec<HourResult> = scheduled
        .hours
        .iter()
        .zip(&without.hours)
        .zip(breakdown.iter().zip(&checks))
        .enumerate()
        .map(|(t, ((h, base), (r, c)))| {
            scheduled_cost.add(&h.cost);
            energy += base.cost.total();
            let [pt, ps, st, ss] = h.provision.unwrap_or([0.0; 4]);
            HourResult {
                hour: t + 1,
                demand_mw: p.demand_mw[t],
                wind_mw: p.wind_mw[t],
                solar_mw: p.solar_mw[t],
                interconnector_mw: p.interconnector_mw[t],
                dispatch_mw: h.dispatch_mw.clone(),
                online: h.online.clone(),
                startups: h.startups.clone(),
                charge_mw: h.charge_mw.clone(),
                discharge_mw: h.discharge_mw.clone(),
                energy_mwh: h.energy_mwh.clone(),
                curtailment_mw: h.curtailment_mw,
                inertia_mva_s: h.inertia_mva_s,
                pfr_req_mw: r.map_or(f64::NAN, |r| r.pfr_req),
                sfr_req_mw: r.map_or(f64::NAN, |r| r.sfr_req),
                binding: r.map(|r| r.binding),
                pfr_thermal_mw: pt,
                pfr_storage_mw: ps,
                sfr_thermal_mw: st,
                sfr_storage_mw: ss,
                cost_gbp: h.cost.total(),
                energy_cost_gbp: base.cost.total(),
                balancing_cost_gbp: h.cost.total() - base.cost.total(),
                check: c.as_ref().map(|c| c.0),
            }
        })
        .collect();
    let total = scheduled_cost.total();

    let compliance = verify.then(|| {
        let done: Vec<&HourCheck> = hours.iter().filter_map(|h| h.check.as_ref()).collect();
        ComplianceSummary {
            hours_checked: done.len(),
            hours_passed: done.iter().filter(|c| c.passed).count(),
            failing_hours: hours
                .iter()
                .filter(|h| h.check.is_some_and(|c| !c.passed))
                .map(|h| h.hour)
                .collect(),
            worst_nadir_margin_hz: done.iter().map(|c| c.nadir_margin_hz).fold(f64::INFINITY, f64::min),
            worst_qss_margin_hz: done.iter().map(|c| c.qss_margin_hz).fold(f64::INFINITY, f64::min),
            sfr_below_pfr_hours: done.iter().filter(|c| c.sfr_below_pfr).count(),
        }
    });

    let wall: Duration = scheduled
        .windows
        .iter()
        .chain(if with.is_some() { &without.windows[..] } else { &[] })
        .map(|w| Duration::from_secs_f64(w.wall_time_s))
        .sum();
    Ok(ScenarioResult {
        scenario: s.name.clone(),
        efr_mw: s.freq.efr_mw,
        start_hour_of_year: p.start_hour_of_year,
        group_names: s.groups.iter().map(|g| g.name.clone()).collect(),
        storage_names: s.storage.iter().map(|st| st.name.clone()).collect(),
        hours,
        totals: CostTotals {
            energy_cost_gbp: energy,
            balancing_cost_gbp: total - energy,
            total_cost_gbp: total,
            scheduled: scheduled_cost,
        },
        solver: SolverMetadata {
            backend: backend.to_string(),
            gap_tolerance: opts.solve.gap_tolerance,
            time_limit_s: opts.solve.time_limit.as_secs_f64(),
            seed: opts.solve.seed,
            window_hours: opts.window(s),
            chord_segments: opts.segments(s),
            frequency_constraints: with.is_some(),
            objective_gbp: scheduled.windows.iter().map(|w| w.objective).sum(),
            max_mip_gap: scheduled.windows.iter().map(|w| w.mip_gap).fold(0.0, f64::max),
            wall_time_s: wall.as_secs_f64(),
            windows: scheduled.windows.clone(),
        },
        compliance,
    })
}

#[cfg(test)]
mod tests;
