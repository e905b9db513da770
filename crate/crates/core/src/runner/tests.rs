use super::*;
use crate::mip::HighsBackend;
use crate::system::{
    DampingDemand, GeneratorGroup, StorageUnit, Technology, TimeSeriesProfile,
};

fn phs(e0: f64) -> StorageUnit {
    StorageUnit {
        name: "phs".into(),
        e_max_mwh: 9000.0,
        e_min_mwh: 0.0,
        p_charge_max_mw: 2700.0,
        p_discharge_max_mw: 2700.0,
        efficiency: StorageUnit::PHS_EFFICIENCY,
        fr_max_mw: 500.0,
        e_initial_mwh: e0,
    }
}

/// GB-sized fleet, warm start with a realistic commitment.
fn gb(demand: Vec<f64>) -> Scenario {
    let n = demand.len();
    let wind = (0..n).map(|t| 3000.0 + 500.0 * (t % 5) as f64).collect();
    let mut s = Scenario::new(
        "gb",
        vec![
            GeneratorGroup::baseline(Technology::Nuclear, 5),
            GeneratorGroup::baseline(Technology::Ccgt, 50),
            GeneratorGroup::baseline(Technology::Coal, 30),
            GeneratorGroup::baseline(Technology::Ocgt, 20),
        ],
        vec![phs(4000.0)],
        TimeSeriesProfile::new(demand, wind, vec![0.0; n], vec![0.0; n]),
    );
    s.initial_state[1] = InitialGroupState {
        online: 30,
        output_mw: 10_000.0,
    };
    s.initial_state[2] = InitialGroupState {
        online: 10,
        output_mw: 3000.0,
    };
    s
}

fn hourly(mut s: Scenario) -> Scenario {
    s.freq.damping_demand = DampingDemand::Hourly;
    s
}

fn day(n: usize) -> Vec<f64> {
    (0..n)
        .map(|t| 27_000.0 + 5000.0 * ((t as f64 - 6.0) * std::f64::consts::PI / 12.0).sin())
        .collect()
}

fn run(s: &Scenario, efr: f64, opts: &RunOptions) -> ScenarioResult {
    run_scenario(s, efr, &HighsBackend::default(), opts).unwrap()
}

#[test]
fn flat_day_keeps_one_unit_on() {
    let mut s = Scenario::new(
        "toy",
        vec![GeneratorGroup::baseline(Technology::Ccgt, 2)],
        // too small to carry an hour, so it cannot replace the unit at the end
        vec![StorageUnit {
            e_max_mwh: 100.0,
            p_charge_max_mw: 100.0,
            p_discharge_max_mw: 100.0,
            ..phs(0.0)
        }],
        TimeSeriesProfile::demand_only(vec![300.0; 24]),
    );
    s.settings.window_hours = 24;
    let opts = RunOptions {
        frequency_constraints: false,
        ..RunOptions::default()
    };
    let r = run(&s, 0.0, &opts);
    assert!(r.hours.iter().all(|h| h.online == vec![1]));
    let expected = 12564.0 + 24.0 * (2476.0 + 18.93 * 300.0);
    assert!((r.totals.total_cost_gbp - expected).abs() < 1e-6 * expected);
    assert_eq!(r.totals.balancing_cost_gbp, 0.0);
    assert!(r.compliance.is_none());
}

#[test]
fn shortfall_names_the_hour() {
    let mut s = gb(day(4));
    for d in &mut s.profile.demand_mw {
        *d *= 10.0;
    }
    let err = run_scenario(&s, 0.0, &HighsBackend::default(), &RunOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("hour 1:"), "{err}");
}

#[test]
fn response_shortfall_is_prescreened() {
    let mut s = gb(day(3));
    for g in &mut s.groups {
        g.pfr_max_mw *= 0.2;
    }
    s.storage.clear();
    let err = run_scenario(&s, 0.0, &HighsBackend::default(), &RunOptions::default()).unwrap_err();
    assert!(
        matches!(err, RunError::InfeasibleHour { hour: 1, .. } | RunError::Fr(_)),
        "{err}"
    );
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn ramp_wall_is_diagnosed() {
    let mut s = Scenario::new(
        "ramp",
        vec![GeneratorGroup::baseline(Technology::Ccgt, 3)],
        Vec::new(),
        TimeSeriesProfile::demand_only(vec![400.0, 400.0, 1400.0]),
    );
    s.initial_state[0] = InitialGroupState {
        online: 1,
        output_mw: 400.0,
    };
    let opts = RunOptions {
        frequency_constraints: false,
        ..RunOptions::default()
    };
    let err = run_scenario(&s, 0.0, &HighsBackend::default(), &opts);
    // two extra units can start in hour 3, but each only reaches its ramp
    match err {
        Ok(r) => assert!(r.hours[2].online[0] >= 3),
        Err(RunError::InfeasibleWindow { diagnostic, .. }) => {
            assert!(diagnostic.starts_with("hour 3"), "{diagnostic}")
        }
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn accounting_identities_hold() {
    let s = gb(day(6));
    let r = run(&s, 100.0, &RunOptions::default());
    let t = &r.totals;
    let sum: f64 = r.hours.iter().map(|h| h.cost_gbp).sum();
    assert!((sum - t.total_cost_gbp).abs() < 1e-3);
    let energy: f64 = r.hours.iter().map(|h| h.energy_cost_gbp).sum();
    assert!((energy - t.energy_cost_gbp).abs() < 1e-3);
    assert!((t.energy_cost_gbp + t.balancing_cost_gbp - t.total_cost_gbp).abs() < 1e-3);
    assert!((r.solver.objective_gbp - t.total_cost_gbp).abs() < 1e-3);
    assert!(t.balancing_cost_gbp >= -1e-6 * t.total_cost_gbp);
    for h in &r.hours {
        assert!(h.pfr_thermal_mw + h.pfr_storage_mw >= h.pfr_req_mw - 1e-5);
        assert!(h.sfr_thermal_mw + h.sfr_storage_mw >= h.sfr_req_mw - 1e-5);
    }
}

#[test]
fn hourly_damping_schedule_passes_verification() {
    let s = hourly(gb(day(6)));
    let opts = RunOptions {
        verification: Verification::Strict,
        ..RunOptions::default()
    };
    let r = run(&s, 0.0, &opts);
    let c = r.compliance.unwrap();
    assert_eq!(c.hours_checked, 6);
    assert_eq!(c.hours_passed, 6);
    assert!(c.worst_nadir_margin_hz >= -1e-3);
}

#[test]
fn identical_inputs_identical_results() {
    let s = gb(day(4));
    let strip = |mut r: ScenarioResult| {
        r.solver.wall_time_s = 0.0;
        for w in &mut r.solver.windows {
            w.wall_time_s = 0.0;
        }
        r
    };
    let a = strip(run(&s, 50.0, &RunOptions::default()));
    let b = strip(run(&s, 50.0, &RunOptions::default()));
    assert_eq!(a, b);
}

#[test]
fn stitched_windows_close_to_single_solve() {
    let s = gb(day(48));
    let one = run(
        &s,
        0.0,
        &RunOptions {
            window_hours: Some(48),
            verification: Verification::Off,
            ..RunOptions::default()
        },
    );
    let two = run(
        &s,
        0.0,
        &RunOptions {
            window_hours: Some(24),
            verification: Verification::Off,
            ..RunOptions::default()
        },
    );
    assert_eq!(two.solver.windows.len(), 2);
    let (a, b) = (one.totals.total_cost_gbp, two.totals.total_cost_gbp);
    assert!((a - b).abs() / a <= 0.02, "{a} vs {b}");
}

#[test]
fn sweep_levels_validated() {
    let s = gb(day(2));
    let backend = HighsBackend::default();
    for bad in [vec![100.0, 200.0], vec![0.0, 200.0, 100.0], vec![]] {
        assert!(matches!(
            efr_sweep(&s, &bad, &backend, &RunOptions::default()),
            Err(RunError::BadLevels(_))
        ));
    }
}

#[test]
fn sweep_keeps_secondary_requirement() {
    let s = gb(day(4));
    let opts = RunOptions {
        verification: Verification::Off,
        ..RunOptions::default()
    };
    let sw = efr_sweep(&s, &[0.0, 100.0, 200.0], &HighsBackend::default(), &opts).unwrap();
    assert_eq!(sw.rows[0].abatement_gbp, 0.0);
    assert_eq!(sw.rows[0].value_per_mw_gbp, None);
    for r in &sw.results[1..] {
        for (a, b) in sw.results[0].hours.iter().zip(&r.hours) {
            assert!((a.sfr_req_mw - b.sfr_req_mw).abs() <= 1e-6);
        }
    }
    // the reference case is shared
    let e0 = sw.rows[0].energy_cost_gbp;
    assert!(sw.rows.iter().all(|r| r.energy_cost_gbp == e0));
}

fn synthetic(inertia: &[f64], pfr: &[f64], demand: &[f64], start: usize) -> ScenarioResult {
    let hours = inertia
        .iter()
        .zip(pfr)
        .zip(demand)
        .enumerate()
        .map(|(t, ((&h, &p), &d))| HourResult {
            hour: t + 1,
            demand_mw: d,
            wind_mw: 0.0,
            solar_mw: 0.0,
            interconnector_mw: 0.0,
            dispatch_mw: Vec::new(),
            online: Vec::new(),
            startups: Vec::new(),
            charge_mw: Vec::new(),
            discharge_mw: Vec::new(),
            energy_mwh: Vec::new(),
            curtailment_mw: 0.0,
            inertia_mva_s: h,
            pfr_req_mw: p,
            sfr_req_mw: 1159.0,
            binding: Some(BindingTag::NadirChord(0)),
            pfr_thermal_mw: p,
            pfr_storage_mw: 0.0,
            sfr_thermal_mw: 1159.0,
            sfr_storage_mw: 0.0,
            cost_gbp: 0.0,
            energy_cost_gbp: 0.0,
            balancing_cost_gbp: 0.0,
            check: None,
        })
        .collect();
    ScenarioResult {
        scenario: "synthetic".into(),
        efr_mw: 0.0,
        start_hour_of_year: start,
        group_names: Vec::new(),
        storage_names: Vec::new(),
        hours,
        totals: CostTotals {
            energy_cost_gbp: 0.0,
            balancing_cost_gbp: 0.0,
            total_cost_gbp: 0.0,
            scheduled: CostBreakdown::default(),
        },
        solver: SolverMetadata {
            backend: "none".into(),
            gap_tolerance: 0.0,
            time_limit_s: 0.0,
            seed: 0,
            window_hours: 0,
            chord_segments: 0,
            frequency_constraints: true,
            objective_gbp: 0.0,
            max_mip_gap: 0.0,
            wall_time_s: 0.0,
            windows: Vec::new(),
        },
        compliance: None,
    }
}

#[test]
fn seasons_follow_calendar() {
    assert_eq!(season_of_hour(0), Season::Winter);
    assert_eq!(season_of_hour(59 * 24), Season::Spring);
    assert_eq!(season_of_hour(59 * 24 - 1), Season::Winter);
    assert_eq!(season_of_hour(152 * 24), Season::Summer);
    assert_eq!(season_of_hour(244 * 24), Season::Autumn);
    assert_eq!(season_of_hour(334 * 24), Season::Winter);
    assert_eq!(season_of_hour(8760 + 5), Season::Winter);
}

#[test]
fn identical_runs_have_zero_offsets() {
    let a = synthetic(&[150e3, 200e3], &[1800.0, 1400.0], &[30e3, 35e3], 0);
    let rows = seasonal_report(&a, &a).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].pfr_offset_mw, 0.0);
    assert_eq!(rows[0].sfr_offset_mw, 0.0);
    let short = synthetic(&[150e3], &[1800.0], &[30e3], 0);
    assert!(matches!(
        seasonal_report(&a, &short),
        Err(RunError::HorizonMismatch(2, 1))
    ));
}

#[test]
fn low_inertia_summer_has_largest_offset() {
    // one day per season, summer with the least inertia
    let starts = [10 * 24, 100 * 24, 180 * 24, 280 * 24];
    let hs = [250e3, 200e3, 120e3, 210e3];
    let f = crate::system::FrequencyParams::gb_default(30_000.0);
    let mut rows = Vec::new();
    for (&start, &h) in starts.iter().zip(&hs) {
        let before = crate::fr::nadir_requirement(&f, h);
        let after = crate::fr::nadir_requirement(&f.with_efr(100.0), h);
        let a = synthetic(&[h; 24], &[before; 24], &[30e3; 24], start);
        let b = synthetic(&[h; 24], &[after; 24], &[30e3; 24], start);
        rows.extend(seasonal_report(&a, &b).unwrap());
    }
    let best = rows
        .iter()
        .max_by(|a, b| a.pfr_offset_mw.total_cmp(&b.pfr_offset_mw))
        .unwrap();
    assert_eq!(best.season, Season::Summer);
}

#[test]
fn grid_counts_every_hour() {
    let h = [120e3, 150e3, 180e3, 210e3, 240e3, 270e3];
    let d = [20e3, 24e3, 28e3, 32e3, 36e3, 40e3];
    let a = synthetic(&h, &[2000.0; 6], &d, 0);
    let b = synthetic(&h, &[1800.0; 6], &d, 0);
    let g = effectiveness_grid(&a, &b, 100.0, 3).unwrap();
    assert_eq!(g.bins.len(), 9);
    assert_eq!(g.bins.iter().map(|b| b.count).sum::<usize>(), 6);
    assert!(g.bins.iter().filter(|b| b.count > 0).all(|b| b.mean_offset == Some(2.0)));
    assert!(g.h_d_correlation.unwrap() > 0.99);
    assert!(effectiveness_grid(&a, &b, 0.0, 3).is_err());

    let flat = synthetic(&[150e3; 6], &[2000.0; 6], &d, 0);
    let g = effectiveness_grid(&flat, &flat, 100.0, 4).unwrap();
    assert!(g.bins.iter().filter(|b| b.count > 0).all(|b| b.h_index == 0));
    assert_eq!(g.h_d_correlation, None);
}

#[test]
fn hourly_csv_round_trips_verification_inputs() {
    let a = synthetic(&[150e3, 200e3], &[1815.0, 1400.0], &[30e3, 35e3], 0);
    let mut buf = Vec::new();
    write_hourly_csv(&a, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with(&HOURLY_FIXED_COLUMNS.join(",")));
    let saved = read_hourly_csv(&buf[..]).unwrap();
    assert_eq!(saved.len(), 2);
    assert_eq!(saved[1].inertia_mva_s, 200e3);
    assert_eq!(saved[0].pfr_req_mw, 1815.0);
}
