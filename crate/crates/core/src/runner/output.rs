use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{EffectivenessGrid, SeasonRow, SweepRow};
use super::{
    verify_hour, ComplianceSummary, CostTotals, HourCheck, RunError, ScenarioResult,
    SolverMetadata,
};
use crate::system::Scenario;

/// Leading columns of `hourly.csv`, in order. They are followed by
/// `online_<group>`, `dispatch_<group>_mw` and `startups_<group>` for each
/// group, then `charge_<store>_mw`, `discharge_<store>_mw` and
/// `energy_<store>_mwh` for each store.
pub const HOURLY_FIXED_COLUMNS: [&str; 25] = [
    "hour",
    "demand_mw",
    "wind_mw",
    "solar_mw",
    "interconnector_mw",
    "curtailment_mw",
    "efr_mw",
    "inertia_mva_s",
    "pfr_req_mw",
    "sfr_req_mw",
    "binding",
    "pfr_thermal_mw",
    "pfr_storage_mw",
    "sfr_thermal_mw",
    "sfr_storage_mw",
    "cost_gbp",
    "energy_cost_gbp",
    "balancing_cost_gbp",
    "nadir_hz",
    "qss_hz",
    "nadir_margin_hz",
    "qss_margin_hz",
    "compliant",
    "sfr_below_pfr",
    "season",
];

/// Everything in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary<'a> {
    pub scenario: &'a str,
    pub efr_mw: f64,
    pub hours: usize,
    pub start_hour_of_year: usize,
    pub totals: &'a CostTotals,
    pub mean_inertia_mva_s: f64,
    pub min_inertia_mva_s: f64,
    pub mean_pfr_req_mw: f64,
    pub mean_sfr_req_mw: f64,
    pub solver: &'a SolverMetadata,
    pub compliance: Option<&'a ComplianceSummary>,
}

impl<'a> Summary<'a> {
    pub fn of(r: &'a ScenarioResult) -> Self {
        Summary {
            scenario: &r.scenario,
            efr_mw: r.efr_mw,
            hours: r.horizon(),
            start_hour_of_year: r.start_hour_of_year,
            totals: &r.totals,
            mean_inertia_mva_s: r.mean_inertia(),
            min_inertia_mva_s: r
                .hours
                .iter()
                .map(|h| h.inertia_mva_s)
                .fold(f64::INFINITY, f64::min),
            mean_pfr_req_mw: r.mean_pfr_req(),
            mean_sfr_req_mw: r.mean_sfr_req(),
            solver: &r.solver,
            compliance: r.compliance.as_ref(),
        }
    }
}

pub fn write_summary_json(r: &ScenarioResult, path: &Path) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&Summary::of(r)).map_err(std::io::Error::other)?;
    fs::write(path, text + "\n")
}

fn num(x: f64) -> String {
    x.to_string()
}

pub fn write_hourly_csv<W: Write>(r: &ScenarioResult, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = HOURLY_FIXED_COLUMNS.iter().map(|c| c.to_string()).collect();
    for g in &r.group_names {
        header.push(format!("online_{g}"));
        header.push(format!("dispatch_{g}_mw"));
        header.push(format!("startups_{g}"));
    }
    for st in &r.storage_names {
        header.push(format!("charge_{st}_mw"));
        header.push(format!("discharge_{st}_mw"));
        header.push(format!("energy_{st}_mwh"));
    }
    w.write_record(&header)?;
    for h in &r.hours {
        let c = h.check;
        let opt = |f: fn(&HourCheck) -> f64| c.as_ref().map(|c| num(f(c))).unwrap_or_default();
        let mut row = vec![
            h.hour.to_string(),
            num(h.demand_mw),
            num(h.wind_mw),
            num(h.solar_mw),
            num(h.interconnector_mw),
            num(h.curtailment_mw),
            num(r.efr_mw),
            num(h.inertia_mva_s),
            num(h.pfr_req_mw),
            num(h.sfr_req_mw),
            h.binding.map(|b| b.to_string()).unwrap_or_default(),
            num(h.pfr_thermal_mw),
            num(h.pfr_storage_mw),
            num(h.sfr_thermal_mw),
            num(h.sfr_storage_mw),
            num(h.cost_gbp),
            num(h.energy_cost_gbp),
            num(h.balancing_cost_gbp),
            opt(|c| c.nadir_hz),
            opt(|c| c.qss_hz),
            opt(|c| c.nadir_margin_hz),
            opt(|c| c.qss_margin_hz),
            c.map(|c| c.passed.to_string()).unwrap_or_default(),
            c.map(|c| c.sfr_below_pfr.to_string()).unwrap_or_default(),
            super::season_of_hour(r.start_hour_of_year + h.hour - 1)
                .as_str()
                .to_string(),
        ];
        for g in 0..r.group_names.len() {
            row.push(h.online[g].to_string());
            row.push(num(h.dispatch_mw[g]));
            row.push(h.startups[g].to_string());
        }
        for k in 0..r.storage_names.len() {
            row.push(num(h.charge_mw[k]));
            row.push(num(h.discharge_mw[k]));
            row.push(num(h.energy_mwh[k]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_seasonal_csv<W: Write>(rows: &[SeasonRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_grid_csv<W: Write>(g: &EffectivenessGrid, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for b in &g.bins {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

/// The columns of `hourly.csv` needed to re-verify an hour.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SavedHour {
    pub hour: usize,
    pub demand_mw: f64,
    pub efr_mw: f64,
    pub inertia_mva_s: f64,
    pub pfr_req_mw: f64,
    pub sfr_req_mw: f64,
}

pub fn read_hourly_csv<R: Read>(input: R) -> Result<Vec<SavedHour>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Re-simulates saved hours against the scenario's frequency parameters.
pub fn verify_saved(s: &Scenario, hours: &[SavedHour]) -> Result<Vec<HourCheck>, RunError> {
    hours
        .par_iter()
        .map(|h| {
            if !(h.pfr_req_mw.is_finite() && h.sfr_req_mw.is_finite()) {
                return Err(RunError::InvalidArgument(format!(
                    "hour {} has no requirement to verify",
                    h.hour
                )));
            }
            let sc = s.with_efr(h.efr_mw);
            Ok(verify_hour(&sc, h.demand_mw, h.inertia_mva_s, h.pfr_req_mw, h.sfr_req_mw)?.0)
        })
        .collect()
}
