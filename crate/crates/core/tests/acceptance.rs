//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines reach the test log; exits non-zero when any criterion fails.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_tiny_uc, spearman_permutation_p, uc_enumerate};
use uc_core::fr::{
    nadir_constant, pfr_offset_between, pfr_offset_per_mw, requirement_breakdown, segments_with,
    BindingTag, ChordSegmentSet,
};
use uc_core::mip::{solve, ConstraintSense, HighsBackend, MipModel, SolveOptions, SolveStatus};
use uc_core::runner::{
    build_model, effectiveness_grid, efr_sweep, hourly_offsets, verify_hour, RunOptions,
    ScenarioResult,
};
use uc_core::swing::{simulate, ResponsePortfolio, DEFAULT_DT_S, DEFAULT_T_END_S};
use uc_core::system::{load_scenario, DampingDemand, FrequencyParams, Scenario};

/// Gap and per-window time limit for the week runs. Criteria 3 to 6 compare
/// quantities far larger than what a 0.1 % gap can move.
const WEEK_GAP: f64 = 1e-3;
const WEEK_LIMIT_S: u64 = 150;
/// Criterion 8 measures a 0.1 % difference, so it solves tighter.
const CONVERGENCE_GAP: f64 = 5e-4;
const TOL_HZ: f64 = 1e-3;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn scenario(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn week_options() -> RunOptions {
    RunOptions {
        solve: SolveOptions {
            gap_tolerance: WEEK_GAP,
            time_limit: Duration::from_secs(WEEK_LIMIT_S),
            ..SolveOptions::default()
        },
        ..RunOptions::default()
    }
}

fn worst_gap(results: &[ScenarioResult]) -> f64 {
    results
        .iter()
        .map(|r| r.solver.max_mip_gap)
        .fold(0.0, f64::max)
}

fn nadir_anchor() -> Result<Outcome, String> {
    let f = FrequencyParams::gb_default(35_000.0);
    let k = nadir_constant(&f);
    let h = 198_000.0;
    let set = ChordSegmentSet::build(k, 128_000.0, 340_000.0, 64).map_err(|e| e.to_string())?;
    let mut m = MipModel::new("anchor");
    let p = m.continuous("preq", 0.0, f64::INFINITY).map_err(|e| e.to_string())?;
    m.add_objective_term(p, 1.0).map_err(|e| e.to_string())?;
    for (i, (a, b)) in set.segments().enumerate() {
        m.add_constraint(format!("chord{i}"), [(p, 1.0)], ConstraintSense::Ge, a + b * h)
            .map_err(|e| e.to_string())?;
    }
    let floor = f.pfr_floor(35_000.0);
    m.add_constraint("floor", [(p, 1.0)], ConstraintSense::Ge, floor)
        .map_err(|e| e.to_string())?;
    let sol = solve(&m, &HighsBackend::default(), &SolveOptions::default()).map_err(|e| e.to_string())?;
    let preq = sol.objective;
    let analytic = k / h;
    let paper_rel = (preq - 1366.0).abs() / 1366.0;
    Ok(outcome(
        sol.status == SolveStatus::Optimal && (preq - 1375.0).abs() <= 1.0 && paper_rel <= 0.02,
        format!("P_req {preq:.3} MW at 198 GVA·s (k/H {analytic:.3}), {:.2} % from 1366 MW", 100.0 * paper_rel),
    ))
}

fn qss_anchor(runs: &[&ScenarioResult]) -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["toy_week.toml", "baseline_week.toml"] {
        let s = scenario(name);
        for e in [0.0, 100.0, 200.0, 500.0] {
            let f = s.freq.with_efr(e);
            for &d in &s.profile.demand_mw {
                worst = worst.max((f.sfr_requirement(d) - 1159.0).abs());
            }
        }
    }
    let calibrated = FrequencyParams::<f64>::gb_default(30_000.0).sfr_requirement(30_000.0);
    let mut hours = 0;
    for r in runs {
        for h in &r.hours {
            worst = worst.max((h.sfr_req_mw - 1159.0).abs());
            hours += 1;
        }
    }
    worst = worst.max((calibrated - 1159.0).abs());
    outcome(
        worst <= 1e-9,
        format!("S_req = 1159 MW in every hour of both week scenarios at E ∈ {{0, 100, 200, 500}} and in {hours} solved hours (max deviation {worst:.1e} MW)"),
    )
}

fn offset_structure(without: &ScenarioResult, with: &ScenarioResult) -> Result<Outcome, String> {
    let base = scenario("baseline_week.toml");
    let s0 = base.with_efr(0.0);
    let s1 = base.with_efr(100.0);
    let seg0 = segments_with(&s0, s0.settings.chord_segments).map_err(|e| e.to_string())?;
    let seg1 = segments_with(&s1, s1.settings.chord_segments).map_err(|e| e.to_string())?;
    let sfr_diff = without
        .hours
        .iter()
        .zip(&with.hours)
        .map(|(a, b)| (a.sfr_req_mw - b.sfr_req_mw).abs())
        .fold(0.0, f64::max);
    // requirement with and without EFR at the inertia the EFR run scheduled
    let h: Vec<f64> = with.hours.iter().map(|x| x.inertia_mva_s).collect();
    let before = requirement_breakdown(&s0, &seg0, &h);
    let after = requirement_breakdown(&s1, &seg1, &h);
    let mut binding = 0;
    let mut reduced = 0;
    let mut smallest = f64::INFINITY;
    for (b, a) in before.iter().zip(&after) {
        if matches!(a.binding, BindingTag::NadirChord(_)) {
            binding += 1;
            let cut = b.pfr_req - a.pfr_req;
            smallest = smallest.min(cut);
            if cut > 0.0 {
                reduced += 1;
            }
        }
    }
    let cross = without
        .hours
        .iter()
        .zip(&with.hours)
        .filter(|(a, b)| a.pfr_req_mw > b.pfr_req_mw)
        .count();
    let (m0, m1) = (without.mean_pfr_req(), with.mean_pfr_req());
    Ok(outcome(
        m1 < m0 && sfr_diff <= 1e-6 && binding > 0 && reduced == binding,
        format!(
            "mean P_req {m0:.1} → {m1:.1} MW; S_req max difference {sfr_diff:.1e} MW; chord binds in {binding}/{} hours, P_req lower at the scheduled inertia in {reduced} of them (smallest cut {smallest:.1} MW); across the two schedules P_req fell in {cross}/{} hours; worst MIP gap {:.1e}",
            h.len(),
            h.len(),
            worst_gap(&[without.clone(), with.clone()])
        ),
    ))
}

fn effectiveness(without: &ScenarioResult, with: &ScenarioResult) -> Result<Outcome, String> {
    let f = FrequencyParams::gb_default(30_000.0);
    let grid_h: Vec<f64> = (0..=30).map(|i| 100_000.0 + 10_000.0 * i as f64).collect();
    let closed = grid_h.windows(2).all(|w| {
        pfr_offset_per_mw(&f, w[1]) < pfr_offset_per_mw(&f, w[0])
            && pfr_offset_between(&f, w[1], 0.0, 100.0) < pfr_offset_between(&f, w[0], 0.0, 100.0)
    });

    let grid = effectiveness_grid(without, with, 100.0, 5).map_err(|e| e.to_string())?;
    let (bh, bo): (Vec<f64>, Vec<f64>) = grid
        .bins
        .iter()
        .filter_map(|b| b.mean_offset.map(|o| (0.5 * (b.h_lo + b.h_hi), o)))
        .unzip();
    let (rho, p) = spearman_permutation_p(&bh, &bo, 9_999, 4);

    let offsets = hourly_offsets(without, with, 100.0).map_err(|e| e.to_string())?;
    let hh: Vec<f64> = without.hours.iter().map(|x| x.inertia_mva_s).collect();
    let (rho_h, p_h) = spearman_permutation_p(&hh, &offsets, 9_999, 4);
    // how far the EFR run lowers inertia, against the reference inertia
    let drop: Vec<f64> = without
        .hours
        .iter()
        .zip(&with.hours)
        .map(|(a, b)| a.inertia_mva_s - b.inertia_mva_s)
        .collect();
    let (rho_drop, _) = spearman_permutation_p(&hh, &drop, 999, 4);
    let mean_drop = drop.iter().sum::<f64>() / drop.len() as f64;
    Ok(outcome(
        closed && rho < 0.0 && p < 0.05,
        format!(
            "closed form strictly falling over 100–400 GVA·s: {closed}; binned ({} bins) Spearman {rho:.3}, permutation p {p:.4}; hourly Spearman {rho_h:.3}, p {p_h:.4}; EFR run lowers H by {mean_drop:.0} MVA·s on average, Spearman of the drop against H {rho_drop:.3}",
            bh.len()
        ),
    ))
}

fn saturation(results: &[ScenarioResult]) -> Outcome {
    let exact = |x: f64| BigRational::from_float(x).expect("finite cost");
    let c: Vec<BigRational> = results.iter().map(|r| exact(r.totals.total_cost_gbp)).collect();
    let first = &c[0] - &c[1];
    let second = &c[1] - &c[2];
    let f = |q: &BigRational| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
    outcome(
        second <= first,
        format!(
            "abatement 0→100 MW £{:.0}, 100→200 MW £{:.0}; worst MIP gap {:.1e}",
            f(&first),
            f(&second),
            worst_gap(results)
        ),
    )
}

fn swing_consistency(runs: &[(Scenario, ScenarioResult)]) -> Result<Outcome, String> {
    let pool: Vec<(&Scenario, &uc_core::runner::HourResult)> = runs
        .iter()
        .flat_map(|(s, r)| r.hours.iter().map(move |h| (s, h)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let picks = rand::seq::index::sample(&mut rng, pool.len(), 200.min(pool.len()));
    let start = Instant::now();
    let (mut worst_nadir, mut worst_qss) = (0.0_f64, f64::NEG_INFINITY);
    let mut failures = 0;
    for i in picks.iter() {
        let (s, h) = pool[i];
        let (c, _) = verify_hour(s, h.demand_mw, h.inertia_mva_s, h.pfr_req_mw, h.sfr_req_mw)
            .map_err(|e| e.to_string())?;
        worst_nadir = worst_nadir.max(c.nadir_hz);
        worst_qss = worst_qss.max(c.qss_hz);
        if c.nadir_hz > 0.8 + TOL_HZ || c.qss_hz > s.freq.qss_deviation_hz + TOL_HZ {
            failures += 1;
        }
    }
    let mut f = FrequencyParams::gb_default(30_000.0);
    f.damping_per_hz = 0.0;
    let k = nadir_constant(&f);
    let mut exact_err: f64 = 0.0;
    // the closed form holds while the nadir falls before T_p, i.e. k/H ≥ ΔP
    let h_max = k / f.infeed_loss_mw;
    for h in [100_000.0, 128_000.0, 160_000.0, 198_000.0, h_max] {
        let p = ResponsePortfolio::from_params(&f, h, 30_000.0, k / h, f.infeed_loss_mw);
        let tr = simulate(&p, DEFAULT_DT_S, DEFAULT_T_END_S).map_err(|e| e.to_string())?;
        exact_err = exact_err.max((tr.nadir_deviation - 0.8).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(outcome(
        failures == 0 && picks.len() == 200 && exact_err <= 0.002 && elapsed < 60.0,
        format!(
            "{} sampled hours: worst nadir {worst_nadir:.4} Hz, worst QSS {worst_qss:.4} Hz, {failures} over a limit; H·P = k with D = 0: nadir within {exact_err:.1e} Hz of 0.8; {elapsed:.1} s",
            picks.len()
        ),
    ))
}

fn oracle_equivalence() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut with_storage = 0;
    let opts = SolveOptions {
        gap_tolerance: 0.0,
        ..SolveOptions::default()
    };
    for case in 0..25 {
        let s = random_tiny_uc(&mut rng);
        with_storage += usize::from(!s.storage.is_empty());
        let (m, _) = build_model(&s, None).map_err(|e| e.to_string())?;
        let sol = solve(&m, &HighsBackend::default(), &opts).map_err(|e| e.to_string())?;
        let oracle = uc_enumerate(&s).ok_or(format!("case {case}: oracle found no schedule"))?;
        if sol.status != SolveStatus::Optimal {
            return Ok(outcome(false, format!("case {case}: HiGHS {:?}", sol.status)));
        }
        worst = worst.max((sol.objective - oracle).abs() / oracle.abs().max(1.0));
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(outcome(
        worst <= 1e-4 && elapsed < 300.0,
        format!("25 instances ({with_storage} with storage): worst relative difference {worst:.1e}; {elapsed:.1} s"),
    ))
}

fn convergence() -> Result<Outcome, String> {
    let s = scenario("toy_week.toml");
    let mut start_point: Option<Vec<f64>> = None;
    let mut objectives = Vec::new();
    let mut gaps = Vec::new();
    for n in [2, 4, 8, 16, 32] {
        let seg = segments_with(&s, n).map_err(|e| e.to_string())?;
        let (m, _) = build_model(&s, Some(&seg)).map_err(|e| e.to_string())?;
        let opts = SolveOptions {
            gap_tolerance: CONVERGENCE_GAP,
            time_limit: Duration::from_secs(WEEK_LIMIT_S),
            initial_solution: start_point.take(),
            ..SolveOptions::default()
        };
        eprintln!("  {n} segments");
        let sol = solve(&m, &HighsBackend::default(), &opts).map_err(|e| e.to_string())?;
        if !sol.status.has_values() {
            return Ok(outcome(false, format!("{n} segments: {:?}", sol.status)));
        }
        objectives.push(sol.objective);
        gaps.push(sol.mip_gap);
        // a coarser grid's optimum stays feasible on the refined grid
        start_point = Some(sol.values);
    }
    let monotone = objectives.windows(2).all(|w| w[1] <= w[0]);
    let diff = (objectives[3] - objectives[4]) / objectives[3];
    let shown: Vec<String> = objectives.iter().map(|o| format!("{o:.0}")).collect();
    Ok(outcome(
        monotone && diff < 1e-3,
        format!(
            "objectives n = 2..32: {}; 16→32 difference {:.4} %; worst MIP gap {:.1e}",
            shown.join(", "),
            100.0 * diff,
            gaps.iter().copied().fold(0.0, f64::max)
        ),
    ))
}

fn main() -> ExitCode {
    let backend = HighsBackend::default();
    let opts = week_options();

    eprintln!("baseline week, EFR 0 and 100 MW");
    let baseline = efr_sweep(&scenario("baseline_week.toml"), &[0.0, 100.0], &backend, &opts);
    eprintln!("toy week, EFR 0, 100 and 200 MW");
    let toy = efr_sweep(&scenario("toy_week.toml"), &[0.0, 100.0, 200.0], &backend, &opts);
    eprintln!("toy week with hourly damping, EFR 0 and 100 MW");
    let mut hourly = scenario("toy_week.toml");
    hourly.freq.damping_demand = DampingDemand::Hourly;
    let damped = efr_sweep(&hourly, &[0.0, 100.0], &backend, &opts);
    eprintln!("toy week chord refinement");
    let c8 = convergence();

    let failed = |e: &dyn std::fmt::Display| outcome(false, format!("run failed: {e}"));
    let mut lines: Vec<(&str, Outcome)> = Vec::new();
    lines.push(("nadir requirement anchor", nadir_anchor().unwrap_or_else(|e| failed(&e))));
    let mut solved: Vec<&ScenarioResult> = Vec::new();
    for sweep in [&baseline, &toy].into_iter().flatten() {
        solved.extend(sweep.results.iter());
    }
    lines.push(("QSS anchor", qss_anchor(&solved)));
    match &baseline {
        Ok(b) => {
            lines.push((
                "offset structure",
                offset_structure(&b.results[0], &b.results[1]).unwrap_or_else(|e| failed(&e)),
            ));
            lines.push((
                "effectiveness monotonicity",
                effectiveness(&b.results[0], &b.results[1]).unwrap_or_else(|e| failed(&e)),
            ));
        }
        Err(e) => {
            lines.push(("offset structure", failed(e)));
            lines.push(("effectiveness monotonicity", failed(e)));
        }
    }
    lines.push((
        "saturation",
        match &toy {
            Ok(t) => saturation(&t.results),
            Err(e) => failed(e),
        },
    ));
    lines.push((
        "swing-oracle consistency",
        match damped {
            Ok(d) => {
                let runs: Vec<(Scenario, ScenarioResult)> = d
                    .results
                    .into_iter()
                    .map(|r| (hourly.with_efr(r.efr_mw), r))
                    .collect();
                swing_consistency(&runs).unwrap_or_else(|e| failed(&e))
            }
            Err(e) => failed(&e),
        },
    ));
    lines.push(("MILP oracle equivalence", oracle_equivalence().unwrap_or_else(|e| failed(&e))));
    lines.push(("linearization convergence", c8.unwrap_or_else(|e| failed(&e))));

    let mut all = true;
    for (i, (title, o)) in lines.iter().enumerate() {
        all &= o.passed;
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {title}: {}", i + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
