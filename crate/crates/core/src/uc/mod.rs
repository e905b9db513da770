//! Unit-commitment formulation: variables, cost, balance, commitment logic,
//! ramping and storage.
//!
//! Periods are hours `t = 1..=T` in names and `0..T` in indices. The state
//! before the first period comes from `Scenario::initial_state`.

use crate::mip::{ConstraintSense, MipError, MipModel, VarId};
use crate::system::Scenario;

mod index;

pub use index::UcVariableIndex;

use ConstraintSense::{Eq, Ge, Le};

/// Makes a scenario name usable inside LP/MPS identifiers.
pub(crate) fn ident(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Start-up, no-load and marginal cost of every group and period, plus the
/// configured curtailment penalty.
pub fn add_objective(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), MipError> {
    for t in 0..idx.periods() {
        for (g, grp) in s.groups.iter().enumerate() {
            m.add_objective_term(idx.son(t, g), grp.startup_cost)?;
            m.add_objective_term(idx.u(t, g), grp.no_load_cost)?;
            m.add_objective_term(idx.pgen(t, g), grp.marginal_cost)?;
        }
        if s.settings.curtailment_cost != 0.0 {
            m.add_objective_term(idx.curtailment(t), s.settings.curtailment_cost)?;
        }
    }
    Ok(())
}

/// `Σ P_gen + Σ P_d + I + w + O − ξ = d + Σ P_c` for every period.
pub fn add_power_balance(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), MipError> {
    let p = &s.profile;
    for t in 0..idx.periods() {
        let mut terms: Vec<(VarId, f64)> =
            (0..s.groups.len()).map(|g| (idx.pgen(t, g), 1.0)).collect();
        for k in 0..s.storage.len() {
            terms.push((idx.discharge(t, k), 1.0));
            terms.push((idx.charge(t, k), -1.0));
        }
        terms.push((idx.curtailment(t), -1.0));
        let rhs = p.demand_mw[t] - p.interconnector_mw[t] - p.wind_mw[t] - p.solar_mw[t];
        m.add_constraint(format!("bal_t{}", t + 1), terms, Eq, rhs)?;
    }
    Ok(())
}

/// Output limits, start-up/shut-down counting and the start-up/shut-down
/// windows. Must-run groups are pinned fully online through the bounds set at
/// registration.
pub fn add_commitment_constraints(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), MipError> {
    for (g, grp) in s.groups.iter().enumerate() {
        let name = ident(&grp.name);
        let u0 = s.initial_state[g].online as f64;
        let n = grp.n_units as f64;
        for t in 0..idx.periods() {
            let tag = format!("{name}_t{}", t + 1);
            let (p, u) = (idx.pgen(t, g), idx.u(t, g));
            if grp.msg_mw > 0.0 {
                m.add_constraint(format!("msg_{tag}"), [(p, 1.0), (u, -grp.msg_mw)], Ge, 0.0)?;
            }
            m.add_constraint(
                format!("cap_{tag}"),
                [(p, 1.0), (u, -grp.unit_capacity_mw)],
                Le,
                0.0,
            )?;

            // s_on ≥ u_t − u_{t−1}, s_off ≥ u_{t−1} − u_t
            let (son, soff) = (idx.son(t, g), idx.soff(t, g));
            if t == 0 {
                m.add_constraint(format!("son_{tag}"), [(son, 1.0), (u, -1.0)], Ge, -u0)?;
                m.add_constraint(format!("soff_{tag}"), [(soff, 1.0), (u, 1.0)], Ge, u0)?;
            } else {
                let prev = idx.u(t - 1, g);
                m.add_constraint(
                    format!("son_{tag}"),
                    [(son, 1.0), (u, -1.0), (prev, 1.0)],
                    Ge,
                    0.0,
                )?;
                m.add_constraint(
                    format!("soff_{tag}"),
                    [(soff, 1.0), (u, 1.0), (prev, -1.0)],
                    Ge,
                    0.0,
                )?;
            }

            // windows [t − t_start + 1, t − 1], truncated at the first period
            let up_from = (t + 1).saturating_sub(grp.startup_time_h as usize);
            if up_from < t {
                let mut terms = vec![(u, 1.0)];
                terms.extend((up_from..t).map(|k| (idx.son(k, g), -1.0)));
                m.add_constraint(format!("minup_{tag}"), terms, Ge, 0.0)?;
            }
            let dn_from = (t + 1).saturating_sub(grp.shutdown_time_h as usize);
            if dn_from < t {
                let mut terms = vec![(u, 1.0)];
                terms.extend((dn_from..t).map(|k| (idx.soff(k, g), 1.0)));
                m.add_constraint(format!("mindn_{tag}"), terms, Le, n)?;
            }
        }
    }
    Ok(())
}

/// Ramp limits scaled by the number of units online. A net decrease in units
/// online additionally lets output fall by the MSG of each unit leaving,
/// otherwise the last unit of a group with a positive MSG could never come
/// off.
pub fn add_ramp_constraints(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), MipError> {
    for (g, grp) in s.groups.iter().enumerate() {
        let name = ident(&grp.name);
        let init = s.initial_state[g];
        let (v_up, v_dn, msg) = (grp.ramp_up_mw_per_h, grp.ramp_down_mw_per_h, grp.msg_mw);
        for t in 0..idx.periods() {
            let tag = format!("{name}_t{}", t + 1);
            let (p, u) = (idx.pgen(t, g), idx.u(t, g));
            // P_t − P_{t−1} ≤ u_t·V_up
            // P_{t−1} − P_t ≤ u_t·V_dn + (u_{t−1} − u_t)·MSG
            let mut up = vec![(p, 1.0), (u, -v_up)];
            let mut dn = vec![(p, -1.0), (u, msg - v_dn)];
            let (up_rhs, dn_rhs) = if t == 0 {
                (init.output_mw, msg * init.online as f64 - init.output_mw)
            } else {
                let (prev_p, prev_u) = (idx.pgen(t - 1, g), idx.u(t - 1, g));
                up.push((prev_p, -1.0));
                dn.push((prev_p, 1.0));
                dn.push((prev_u, -msg));
                (0.0, 0.0)
            };
            m.add_constraint(format!("rampup_{tag}"), up, Le, up_rhs)?;
            m.add_constraint(format!("rampdn_{tag}"), dn, Le, dn_rhs)?;
        }
    }
    Ok(())
}

/// Energy balance of each store and return to the initial energy at the end
/// of the horizon. Energy and power limits are variable bounds.
pub fn add_storage_constraints(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), MipError> {
    let periods = idx.periods();
    for (k, st) in s.storage.iter().enumerate() {
        let name = ident(&st.name);
        for t in 0..periods {
            let mut terms = vec![
                (idx.energy(t, k), 1.0),
                (idx.charge(t, k), -st.efficiency),
                (idx.discharge(t, k), 1.0 / st.efficiency),
            ];
            let rhs = if t == 0 {
                st.e_initial_mwh
            } else {
                terms.push((idx.energy(t - 1, k), -1.0));
                0.0
            };
            m.add_constraint(format!("soc_{name}_t{}", t + 1), terms, Eq, rhs)?;
        }
        if periods > 0 {
            m.add_constraint(
                format!("soc_end_{name}"),
                [(idx.energy(periods - 1, k), 1.0)],
                Eq,
                st.e_initial_mwh,
            )?;
        }
    }
    Ok(())
}

/// Registers the variables and adds every unit-commitment constraint and the
/// cost. Frequency-response variables are registered but left unconstrained
/// when `with_fr` is set; see [`crate::fr`] for their constraints.
pub fn build_uc(s: &Scenario, with_fr: bool) -> Result<(MipModel, UcVariableIndex), MipError> {
    let mut m = MipModel::new(ident(&s.name));
    let idx = UcVariableIndex::register(&mut m, s, with_fr)?;
    add_objective(&mut m, &idx, s)?;
    add_power_balance(&mut m, &idx, s)?;
    add_commitment_constraints(&mut m, &idx, s)?;
    add_ramp_constraints(&mut m, &idx, s)?;
    add_storage_constraints(&mut m, &idx, s)?;
    Ok((m, idx))
}
