//! Independent oracles shared by the integration tests. None of them call
//! the formulation builders or HiGHS.

#![allow(dead_code)]

pub mod simplex;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uc_core::mip::{ConstraintSense, MipModel, VarKind};
use uc_core::runner::stats::spearman;
use uc_core::system::{
    GeneratorGroup, InitialGroupState, Scenario, StorageUnit, Technology, TimeSeriesProfile,
};

use simplex::{Lp, LpOutcome, Rel};

/// The LP of `m` with integers fixed to `fixed` (in integer-variable order)
/// or relaxed when `fixed` is `None`.
pub fn lp_of(m: &MipModel, fixed: Option<&[f64]>) -> Lp<f64> {
    let n = m.num_vars();
    let mut lp = Lp::new(n);
    let mut ints = fixed.map(|f| f.iter());
    for (j, v) in m.variables().iter().enumerate() {
        assert!(v.lower.is_finite(), "oracle needs finite lower bounds");
        lp.lower[j] = v.lower;
        lp.upper[j] = v.upper.is_finite().then_some(v.upper);
        if v.kind == VarKind::Integer {
            if let Some(it) = ints.as_mut() {
                let x = *it.next().expect("one value per integer");
                lp.lower[j] = x;
                lp.upper[j] = Some(x);
            }
        }
    }
    for (id, c) in m.objective() {
        lp.c[id.index()] = c;
    }
    for con in m.constraints() {
        let rel = match con.sense {
            ConstraintSense::Le => Rel::Le,
            ConstraintSense::Ge => Rel::Ge,
            ConstraintSense::Eq => Rel::Eq,
        };
        let terms: Vec<(usize, f64)> = con.terms.iter().map(|(v, a)| (v.index(), *a)).collect();
        lp.row(&terms, rel, con.rhs);
    }
    lp
}

/// Optimum of a small MILP by enumerating every integer assignment and
/// solving the remaining LP. `None` when infeasible.
pub fn brute_force_mip(m: &MipModel) -> Option<f64> {
    let ranges: Vec<(i64, i64)> = m
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| (v.lower.ceil() as i64, v.upper.floor() as i64))
        .collect();
    assert!(ranges.len() <= 12, "too many integers to enumerate");
    let mut best: Option<f64> = None;
    for_each_assignment(&ranges, |vals| {
        let fixed: Vec<f64> = vals.iter().map(|&x| x as f64).collect();
        if let LpOutcome::Optimal { objective, .. } = lp_of(m, Some(&fixed)).solve() {
            best = Some(best.map_or(objective, |b: f64| b.min(objective)));
        }
    });
    best
}

fn for_each_assignment(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&cur);
        let mut k = 0;
        loop {
            if k == cur.len() {
                return;
            }
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Optimal operating cost of a scenario without frequency constraints,
/// found by enumerating every commitment trajectory with the fewest
/// start-ups and shut-downs it implies and dispatching each by LP.
pub fn uc_enumerate(s: &Scenario) -> Option<f64> {
    let (nt, ng) = (s.horizon(), s.groups.len());
    let ranges: Vec<(i64, i64)> = (0..nt)
        .flat_map(|_| {
            s.groups.iter().map(|g| {
                let n = g.n_units as i64;
                (if g.must_run() { n } else { 0 }, n)
            })
        })
        .collect();
    let mut best: Option<f64> = None;
    for_each_assignment(&ranges, |flat| {
        let u = |t: usize, g: usize| flat[t * ng + g] as f64;
        let prev = |t: usize, g: usize| {
            if t == 0 {
                s.initial_state[g].online as f64
            } else {
                u(t - 1, g)
            }
        };
        let son = |t: usize, g: usize| (u(t, g) - prev(t, g)).max(0.0);
        let soff = |t: usize, g: usize| (prev(t, g) - u(t, g)).max(0.0);
        let mut fixed = 0.0;
        for t in 0..nt {
            for (g, grp) in s.groups.iter().enumerate() {
                let up_from = (t + 1).saturating_sub(grp.startup_time_h as usize);
                let recent_on: f64 = (up_from..t).map(|k| son(k, g)).sum();
                let dn_from = (t + 1).saturating_sub(grp.shutdown_time_h as usize);
                let recent_off: f64 = (dn_from..t).map(|k| soff(k, g)).sum();
                if u(t, g) < recent_on || u(t, g) + recent_off > grp.n_units as f64 {
                    return;
                }
                fixed += son(t, g) * grp.startup_cost + u(t, g) * grp.no_load_cost;
            }
        }
        if let Some(c) = dispatch_cost(s, &u) {
            let total = fixed + c;
            best = Some(best.map_or(total, |b: f64| b.min(total)));
        }
    });
    best
}

/// Cheapest dispatch for a fixed commitment.
fn dispatch_cost(s: &Scenario, u: &dyn Fn(usize, usize) -> f64) -> Option<f64> {
    let (nt, ng, nk) = (s.horizon(), s.groups.len(), s.storage.len());
    let per = ng + 3 * nk + 1;
    let p = |t: usize, g: usize| t * per + g;
    let pc = |t: usize, k: usize| t * per + ng + 3 * k;
    let pd = |t: usize, k: usize| t * per + ng + 3 * k + 1;
    let e = |t: usize, k: usize| t * per + ng + 3 * k + 2;
    let curt = |t: usize| t * per + ng + 3 * nk;
    let mut lp: Lp<f64> = Lp::new(nt * per);
    let prof = &s.profile;
    for t in 0..nt {
        for (g, grp) in s.groups.iter().enumerate() {
            lp.lower[p(t, g)] = u(t, g) * grp.msg_mw;
            lp.upper[p(t, g)] = Some(u(t, g) * grp.unit_capacity_mw);
            lp.c[p(t, g)] = grp.marginal_cost;
            let (p_prev, u_prev) = if t == 0 {
                let init: InitialGroupState = s.initial_state[g];
                (None, init.online as f64)
            } else {
                (Some(p(t - 1, g)), u(t - 1, g))
            };
            let p0 = if t == 0 { s.initial_state[g].output_mw } else { 0.0 };
            // output may rise by V_up per unit online and fall by V_dn per
            // unit online plus the MSG of each unit that comes off
            let mut up = vec![(p(t, g), 1.0)];
            let mut dn = vec![(p(t, g), -1.0)];
            if let Some(q) = p_prev {
                up.push((q, -1.0));
                dn.push((q, 1.0));
            }
            lp.row(&up, Rel::Le, u(t, g) * grp.ramp_up_mw_per_h + p0);
            let fall = u(t, g) * grp.ramp_down_mw_per_h + (u_prev - u(t, g)) * grp.msg_mw;
            lp.row(&dn, Rel::Le, fall - p0);
        }
        for (k, st) in s.storage.iter().enumerate() {
            lp.upper[pc(t, k)] = Some(st.p_charge_max_mw);
            lp.upper[pd(t, k)] = Some(st.p_discharge_max_mw);
            lp.lower[e(t, k)] = st.e_min_mwh;
            lp.upper[e(t, k)] = Some(st.e_max_mwh);
            let mut terms = vec![
                (e(t, k), 1.0),
                (pc(t, k), -st.efficiency),
                (pd(t, k), 1.0 / st.efficiency),
            ];
            let rhs = if t == 0 {
                st.e_initial_mwh
            } else {
                terms.push((e(t - 1, k), -1.0));
                0.0
            };
            lp.row(&terms, Rel::Eq, rhs);
        }
        lp.upper[curt(t)] = Some(prof.wind_mw[t] + prof.solar_mw[t]);
        lp.c[curt(t)] = s.settings.curtailment_cost;
        let mut bal: Vec<(usize, f64)> = (0..ng).map(|g| (p(t, g), 1.0)).collect();
        for k in 0..nk {
            bal.push((pd(t, k), 1.0));
            bal.push((pc(t, k), -1.0));
        }
        bal.push((curt(t), -1.0));
        let net = prof.demand_mw[t] - prof.wind_mw[t] - prof.solar_mw[t] - prof.interconnector_mw[t];
        lp.row(&bal, Rel::Eq, net);
    }
    for (k, st) in s.storage.iter().enumerate() {
        lp.row(&[(e(nt - 1, k), 1.0)], Rel::Eq, st.e_initial_mwh);
    }
    lp.solve().objective()
}

/// A random instance with at most two groups of at most two units, three
/// hours and an optional store, always feasible with everything online.
pub fn random_tiny_uc(rng: &mut ChaCha8Rng) -> Scenario {
    let techs = [Technology::Ccgt, Technology::Coal, Technology::Ocgt];
    let n_groups = rng.gen_range(1..=2);
    let mut groups = Vec::new();
    for i in 0..n_groups {
        let mut g = GeneratorGroup::baseline(*techs.choose(rng).unwrap(), rng.gen_range(1..=2));
        g.name = format!("g{i}");
        g.unit_capacity_mw = rng.gen_range(100.0..300.0_f64).round();
        g.msg_mw = (g.unit_capacity_mw * rng.gen_range(0.0..0.5_f64)).round();
        g.marginal_cost = rng.gen_range(10.0..60.0_f64).round();
        g.no_load_cost = rng.gen_range(0.0..2000.0_f64).round();
        g.startup_cost = rng.gen_range(0.0..5000.0_f64).round();
        g.startup_time_h = rng.gen_range(0..=2);
        g.shutdown_time_h = rng.gen_range(0..=2);
        g.ramp_up_mw_per_h = g.unit_capacity_mw;
        g.ramp_down_mw_per_h = g.unit_capacity_mw;
        groups.push(g);
    }
    let capacity: f64 = groups
        .iter()
        .map(|g| g.unit_capacity_mw * g.n_units as f64)
        .sum();
    let storage = if rng.gen_bool(0.5) {
        vec![StorageUnit {
            name: "st".into(),
            e_max_mwh: 200.0,
            e_min_mwh: 0.0,
            p_charge_max_mw: 50.0,
            p_discharge_max_mw: 50.0,
            efficiency: 0.9,
            fr_max_mw: 0.0,
            e_initial_mwh: 100.0,
        }]
    } else {
        Vec::new()
    };
    let demand: Vec<f64> = (0..3)
        .map(|_| (capacity * rng.gen_range(0.3..0.9_f64)).round())
        .collect();
    let wind: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..60.0_f64).round()).collect();
    let profile = TimeSeriesProfile::new(demand, wind, vec![0.0; 3], vec![0.0; 3]);
    let mut s = Scenario::new("tiny-random", groups, storage, profile);
    for (st, g) in s.initial_state.iter_mut().zip(&s.groups) {
        // start fully online at full output so hour one is always reachable
        *st = InitialGroupState {
            online: g.n_units,
            output_mw: g.n_units as f64 * g.unit_capacity_mw,
        };
    }
    s
}

/// One-sided permutation p-value for a negative Spearman correlation: the
/// share of shuffles of `y` at least as negative as the observed one.
pub fn spearman_permutation_p(x: &[f64], y: &[f64], shuffles: usize, seed: u64) -> (f64, f64) {
    let observed = spearman(x, y).expect("samples have spread");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = y.to_vec();
    let mut hits = 0;
    for _ in 0..shuffles {
        y.shuffle(&mut rng);
        if spearman(x, &y).unwrap_or(0.0) <= observed {
            hits += 1;
        }
    }
    (observed, (hits + 1) as f64 / (shuffles + 1) as f64)
}
