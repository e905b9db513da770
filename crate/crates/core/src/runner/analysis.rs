use rayon::prelude::*;
use serde::Serialize;

use super::stats::pearson;
use super::{assemble, chord_set, checked, mean, prescreen, solve_chain, RunError, RunOptions, ScenarioResult};
use crate::mip::SolverBackend;
use crate::system::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub efr_mw: f64,
    pub total_cost_gbp: f64,
    pub energy_cost_gbp: f64,
    pub balancing_cost_gbp: f64,
    pub mean_pfr_req_mw: f64,
    pub mean_sfr_req_mw: f64,
    pub mean_inertia_mva_s: f64,
    /// `cost(0) − cost(E)`.
    pub abatement_gbp: f64,
    /// Abatement per MW of EFR; `None` at zero.
    pub value_per_mw_gbp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfrSweep {
    pub rows: Vec<SweepRow>,
    pub results: Vec<ScenarioResult>,
}

/// Runs every EFR level. The unconstrained reference does not depend on EFR,
/// so it is solved once and shared; the levels run concurrently.
pub fn efr_sweep(
    s: &Scenario,
    levels: &[f64],
    backend: &dyn SolverBackend,
    opts: &RunOptions,
) -> Result<EfrSweep, RunError> {
    let ascending = levels.windows(2).all(|w| w[0] < w[1]);
    if levels.first() != Some(&0.0) || !ascending || levels.iter().any(|e| !e.is_finite()) {
        return Err(RunError::BadLevels(levels.to_vec()));
    }
    let scenarios: Vec<Scenario> = levels.iter().map(|&e| s.with_efr(e)).collect();
    for sc in &scenarios {
        checked(sc)?;
    }
    let base = solve_chain(&scenarios[0], None, backend, opts)?;
    let results = scenarios
        .par_iter()
        .map(|sc| {
            let seg = chord_set(sc, opts)?;
            prescreen(sc, seg.as_ref())?;
            let with = match &seg {
                Some(seg) => Some(solve_chain(sc, Some(seg), backend, opts)?),
                None => None,
            };
            assemble(sc, seg.as_ref(), with, &base, backend.name(), opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cost0 = results[0].totals.total_cost_gbp;
    let rows = results
        .iter()
        .map(|r| {
            let abatement = cost0 - r.totals.total_cost_gbp;
            SweepRow {
                efr_mw: r.efr_mw,
                total_cost_gbp: r.totals.total_cost_gbp,
                energy_cost_gbp: r.totals.energy_cost_gbp,
                balancing_cost_gbp: r.totals.balancing_cost_gbp,
                mean_pfr_req_mw: r.mean_pfr_req(),
                mean_sfr_req_mw: r.mean_sfr_req(),
                mean_inertia_mva_s: r.mean_inertia(),
                abatement_gbp: abatement,
                value_per_mw_gbp: (r.efr_mw > 0.0).then(|| abatement / r.efr_mw),
            }
        })
        .collect();
    Ok(EfrSweep { rows, results })
}

/// Meteorological seasons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Winter, Season::Spring, Season::Summer, Season::Autumn];

    pub fn as_str(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Autumn => "autumn",
        }
    }
}

const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Season of an hour of a 365-day year (wrapping), counted from 1 January
/// 00:00.
pub fn season_of_hour(hour_of_year: usize) -> Season {
    let mut day = (hour_of_year / 24) % 365;
    let mut month = 0;
    while day >= MONTH_DAYS[month] {
        day -= MONTH_DAYS[month];
        month += 1;
    }
    match month {
        11 | 0 | 1 => Season::Winter,
        2..=4 => Season::Spring,
        5..=7 => Season::Summer,
        _ => Season::Autumn,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeasonRow {
    pub season: Season,
    pub hours: usize,
    pub pfr_before_mw: f64,
    pub pfr_after_mw: f64,
    /// `before − after`.
    pub pfr_offset_mw: f64,
    pub sfr_before_mw: f64,
    pub sfr_after_mw: f64,
    pub sfr_offset_mw: f64,
}

/// Mean requirements per season before and after EFR, for seasons the runs
/// cover.
pub fn seasonal_report(
    without: &ScenarioResult,
    with: &ScenarioResult,
) -> Result<Vec<SeasonRow>, RunError> {
    aligned(without, with)?;
    let rows = Season::ALL
        .iter()
        .filter_map(|&season| {
            let hours: Vec<usize> = (0..without.horizon())
                .filter(|&t| season_of_hour(without.start_hour_of_year + t) == season)
                .collect();
            if hours.is_empty() {
                return None;
            }
            let avg = |r: &ScenarioResult, f: fn(&super::HourResult) -> f64| {
                mean(hours.iter().map(|&t| f(&r.hours[t])))
            };
            let pfr_before_mw = avg(without, |h| h.pfr_req_mw);
            let pfr_after_mw = avg(with, |h| h.pfr_req_mw);
            let sfr_before_mw = avg(without, |h| h.sfr_req_mw);
            let sfr_after_mw = avg(with, |h| h.sfr_req_mw);
            Some(SeasonRow {
                season,
                hours: hours.len(),
                pfr_before_mw,
                pfr_after_mw,
                pfr_offset_mw: pfr_before_mw - pfr_after_mw,
                sfr_before_mw,
                sfr_after_mw,
                sfr_offset_mw: sfr_before_mw - sfr_after_mw,
            })
        })
        .collect();
    Ok(rows)
}

fn aligned(a: &ScenarioResult, b: &ScenarioResult) -> Result<(), RunError> {
    if a.horizon() != b.horizon() || a.start_hour_of_year != b.start_hour_of_year {
        return Err(RunError::HorizonMismatch(a.horizon(), b.horizon()));
    }
    Ok(())
}

/// `(P_req without − P_req with) / E` per hour.
pub fn hourly_offsets(
    without: &ScenarioResult,
    with: &ScenarioResult,
    efr_mw: f64,
) -> Result<Vec<f64>, RunError> {
    aligned(without, with)?;
    if !(efr_mw > 0.0) {
        return Err(RunError::InvalidArgument(format!(
            "EFR must be positive, got {efr_mw}"
        )));
    }
    Ok(without
        .hours
        .iter()
        .zip(&with.hours)
        .map(|(a, b)| (a.pfr_req_mw - b.pfr_req_mw) / efr_mw)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridBin {
    pub h_index: usize,
    pub d_index: usize,
    pub h_lo: f64,
    pub h_hi: f64,
    pub d_lo: f64,
    pub d_hi: f64,
    pub count: usize,
    /// MW of PFR displaced per MW of EFR; `None` for empty bins.
    pub mean_offset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectivenessGrid {
    pub efr_mw: f64,
    pub n_bins: usize,
    pub hours: usize,
    /// Row-major over `(h_index, d_index)`.
    pub bins: Vec<GridBin>,
    /// Correlation of hourly inertia and demand; `None` without spread.
    pub h_d_correlation: Option<f64>,
}

fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn bin_of(x: f64, lo: f64, hi: f64, n: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    (((x - lo) / (hi - lo) * n as f64).floor() as usize).min(n - 1)
}

/// Bins the hourly offsets by the reference run's inertia and demand on an
/// `n_bins × n_bins` grid spanning the observed ranges.
pub fn effectiveness_grid(
    without: &ScenarioResult,
    with: &ScenarioResult,
    efr_mw: f64,
    n_bins: usize,
) -> Result<EffectivenessGrid, RunError> {
    if n_bins == 0 {
        return Err(RunError::InvalidArgument("need at least one bin".into()));
    }
    let offsets = hourly_offsets(without, with, efr_mw)?;
    let h: Vec<f64> = without.hours.iter().map(|x| x.inertia_mva_s).collect();
    let d: Vec<f64> = without.hours.iter().map(|x| x.demand_mw).collect();
    let (h_lo, h_hi) = span(&h);
    let (d_lo, d_hi) = span(&d);
    let mut sums = vec![(0usize, 0.0); n_bins * n_bins];
    for ((&hx, &dx), &o) in h.iter().zip(&d).zip(&offsets) {
        let cell = &mut sums[bin_of(hx, h_lo, h_hi, n_bins) * n_bins + bin_of(dx, d_lo, d_hi, n_bins)];
        cell.0 += 1;
        cell.1 += o;
    }
    let width = |lo: f64, hi: f64| (hi - lo) / n_bins as f64;
    let (hw, dw) = (width(h_lo, h_hi), width(d_lo, d_hi));
    let bins = sums
        .iter()
        .enumerate()
        .map(|(i, &(count, sum))| {
            let (hi_, di) = (i / n_bins, i % n_bins);
            GridBin {
                h_index: hi_,
                d_index: di,
                h_lo: h_lo + hw * hi_ as f64,
                h_hi: h_lo + hw * (hi_ + 1) as f64,
                d_lo: d_lo + dw * di as f64,
                d_hi: d_lo + dw * (di + 1) as f64,
                count,
                mean_offset: (count > 0).then(|| sum / count as f64),
            }
        })
        .collect();
    Ok(EffectivenessGrid {
        efr_mw,
        n_bins,
        hours: offsets.len(),
        bins,
        h_d_correlation: pearson(&h, &d),
    })
}
