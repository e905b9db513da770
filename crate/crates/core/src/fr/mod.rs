//! Inertia and frequency-response scheduling: the nadir condition through a
//! chord envelope, the quasi-steady-state floor, provision limits and
//! adequacy.
//!
//! Requirement directions are floors: `P_req` and `S_req` are bounded from
//! below by the physics and from above by what the fleet holds.

use serde::Serialize;
use thiserror::Error;

use crate::mip::{ConstraintSense, MipError, MipModel, VarId};
use crate::system::Scenario;
use crate::uc::{ident, UcVariableIndex};

mod chord;

pub use chord::{
    efr_inertia_shift, nadir_constant, nadir_requirement, pfr_offset_between, pfr_offset_per_mw,
    ChordSegmentSet,
};

use ConstraintSense::{Eq, Ge, Le};

/// Relative slack allowed when checking that a chord set covers the
/// inertia range a model can reach.
const RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FrError {
    #[error("chord set needs at least one segment")]
    NoSegments,
    #[error("invalid inertia range [{h_min}, {h_max}]")]
    InvalidRange { h_min: f64, h_max: f64 },
    #[error("no unit or store can provide primary response")]
    NoResponseCapability,
    #[error(
        "even with every unit online (H = {available:.0} MVA·s) the primary requirement exceeds \
         the {capability:.0} MW the fleet can hold"
    )]
    InsufficientInertia { available: f64, capability: f64 },
    #[error(
        "chord set covers [{have_min:.1}, {have_max:.1}] MVA·s but the model can reach \
         [{need_min:.1}, {need_max:.1}]"
    )]
    CoverageGap {
        have_min: f64,
        have_max: f64,
        need_min: f64,
        need_max: f64,
    },
    #[error(transparent)]
    Mip(#[from] MipError),
}

/// Range of shifted inertia `H − H_e` over which the nadir cuts must be valid:
/// from the least inertia the scenario can have (or the inertia below which
/// the requirement exceeds the fleet's capability) to the most it can have.
pub fn required_inertia_range(s: &Scenario) -> Result<(f64, f64), FrError> {
    let f = &s.freq;
    let shift = efr_inertia_shift(f);
    let d = &s.profile.demand_mw;
    let h_low = d
        .iter()
        .map(|&x| s.min_inertia(x))
        .fold(f64::INFINITY, f64::min);
    let h_high = d.iter().map(|&x| s.max_inertia(x)).fold(0.0, f64::max);
    let k = nadir_constant(f);
    if k == 0.0 {
        return Ok((h_low - shift, h_high - shift));
    }
    let cap = s.pfr_capability();
    if cap <= 0.0 {
        return Err(FrError::NoResponseCapability);
    }
    let lo = (h_low - shift).max(k / cap);
    let hi = h_high - shift;
    if hi <= lo {
        return Err(FrError::InsufficientInertia {
            available: h_high,
            capability: cap,
        });
    }
    Ok((lo, hi))
}

/// Chord set for the scenario's EFR level over its whole reachable range,
/// with `settings.chord_segments` segments.
pub fn scenario_segments(s: &Scenario) -> Result<ChordSegmentSet<f64>, FrError> {
    segments_with(s, s.settings.chord_segments)
}

pub fn segments_with(s: &Scenario, n_segments: usize) -> Result<ChordSegmentSet<f64>, FrError> {
    let (lo, hi) = required_inertia_range(s)?;
    ChordSegmentSet::build(nadir_constant(&s.freq), lo, hi, n_segments)
}

/// `H_t = Σ_g C_g·h_g·u_{t,g} + d_t·h_l`.
pub fn add_inertia_expression(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), FrError> {
    for t in 0..idx.periods() {
        let mut terms = vec![(idx.inertia(t), 1.0)];
        terms.extend(
            s.groups
                .iter()
                .enumerate()
                .map(|(g, grp)| (idx.u(t, g), -grp.unit_inertia())),
        );
        let rhs = s.profile.demand_mw[t] * s.freq.load_inertia_s;
        m.add_constraint(format!("inertia_t{}", t + 1), terms, Eq, rhs)?;
    }
    Ok(())
}

/// Nadir cuts `P_req ≥ α_i + β_i·(H − shift)` for every segment, plus a lower
/// bound `H ≥ H_0 + shift` below which the cuts would not be conservative.
pub fn add_nadir_cuts(
    m: &mut MipModel,
    inertia: VarId,
    preq: VarId,
    segments: &ChordSegmentSet<f64>,
    shift: f64,
    tag: &str,
) -> Result<(), MipError> {
    for (i, (alpha, beta)) in segments.segments().enumerate() {
        m.add_constraint(
            format!("nadir_c{i}_{tag}"),
            [(preq, 1.0), (inertia, -beta)],
            Ge,
            alpha - beta * shift,
        )?;
    }
    if segments.k() > 0.0 {
        let v = m.variable(inertia);
        let (lo, hi) = (v.lower.max(segments.h_min() + shift), v.upper);
        m.set_bounds(inertia, lo, hi)?;
    }
    Ok(())
}

/// Chord cuts and the damping floor `P_req + E ≥ P_l − D·d_ref·Δf_max` for
/// every period. Fails if `segments` does not cover the inertia the model
/// can reach.
pub fn add_nadir_constraints(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
    segments: &ChordSegmentSet<f64>,
) -> Result<(), FrError> {
    let f = &s.freq;
    let shift = efr_inertia_shift(f);
    if segments.k() != nadir_constant(f) {
        return Err(FrError::InvalidRange {
            h_min: segments.h_min(),
            h_max: segments.h_max(),
        });
    }
    if segments.k() > 0.0 {
        let (need_min, need_max) = required_inertia_range(s)?;
        let slack = RANGE_TOL * need_max;
        if segments.h_min() > need_min + slack || segments.h_max() < need_max - slack {
            return Err(FrError::CoverageGap {
                have_min: segments.h_min(),
                have_max: segments.h_max(),
                need_min,
                need_max,
            });
        }
    }
    for t in 0..idx.periods() {
        let tag = format!("t{}", t + 1);
        add_nadir_cuts(m, idx.inertia(t), idx.preq(t), segments, shift, &tag)?;
        let floor = f.pfr_floor(s.profile.demand_mw[t]) - f.efr_mw;
        m.add_constraint(
            format!("nadir_floor_{tag}"),
            [(idx.preq(t), 1.0)],
            Ge,
            floor,
        )?;
    }
    Ok(())
}

/// `S_req ≥ P_l − D·d_ref·Δf_ss`, minus `E` only in the include-EFR mode.
pub fn add_qss_constraint(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), FrError> {
    for t in 0..idx.periods() {
        let req = s.freq.sfr_requirement(s.profile.demand_mw[t]);
        m.add_constraint(format!("qss_t{}", t + 1), [(idx.sreq(t), 1.0)], Ge, req)?;
    }
    Ok(())
}

/// Response each unit group and store can hold.
///
/// Thermal: `P_th ≤ u·F_pr`, `P_th ≤ ρ·(u·C − P_gen)`, `S_th ≤ u·F_se`,
/// `S_th ≤ u·C − P_gen`. Storage: `P_s + S_s ≤ F_max` and
/// `P_s + S_s ≤ P_dmax − P_d`. Must-run groups hold nothing (bounds).
pub fn add_provision_limits(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), FrError> {
    for t in 0..idx.periods() {
        for (g, grp) in s.groups.iter().enumerate() {
            if grp.must_run() {
                continue;
            }
            let tag = format!("{}_t{}", ident(&grp.name), t + 1);
            let (u, p) = (idx.u(t, g), idx.pgen(t, g));
            let (pth, sth) = (idx.pth(t, g), idx.sth(t, g));
            let (cap, rho) = (grp.unit_capacity_mw, grp.governor_slope);
            m.add_constraint(
                format!("pfr_max_{tag}"),
                [(pth, 1.0), (u, -grp.pfr_max_mw)],
                Le,
                0.0,
            )?;
            m.add_constraint(
                format!("pfr_slope_{tag}"),
                [(pth, 1.0), (u, -rho * cap), (p, rho)],
                Le,
                0.0,
            )?;
            m.add_constraint(
                format!("sfr_max_{tag}"),
                [(sth, 1.0), (u, -grp.sfr_max_mw)],
                Le,
                0.0,
            )?;
            m.add_constraint(
                format!("sfr_head_{tag}"),
                [(sth, 1.0), (u, -cap), (p, 1.0)],
                Le,
                0.0,
            )?;
        }
        for (k, st) in s.storage.iter().enumerate() {
            let tag = format!("{}_t{}", ident(&st.name), t + 1);
            let (ps, ss) = (idx.ps(t, k), idx.ss(t, k));
            m.add_constraint(
                format!("fr_max_{tag}"),
                [(ps, 1.0), (ss, 1.0)],
                Le,
                st.fr_max_mw,
            )?;
            m.add_constraint(
                format!("fr_head_{tag}"),
                [(ps, 1.0), (ss, 1.0), (idx.discharge(t, k), 1.0)],
                Le,
                st.p_discharge_max_mw,
            )?;
        }
    }
    Ok(())
}

/// `Σ P_th + Σ P_s ≥ P_req` and `Σ S_th + Σ S_s ≥ S_req`.
pub fn add_adequacy_constraints(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
) -> Result<(), FrError> {
    let (ng, ns) = (s.groups.len(), s.storage.len());
    for t in 0..idx.periods() {
        let mut primary: Vec<(VarId, f64)> = (0..ng).map(|g| (idx.pth(t, g), 1.0)).collect();
        primary.extend((0..ns).map(|k| (idx.ps(t, k), 1.0)));
        primary.push((idx.preq(t), -1.0));
        m.add_constraint(format!("pfr_adeq_t{}", t + 1), primary, Ge, 0.0)?;

        let mut secondary: Vec<(VarId, f64)> = (0..ng).map(|g| (idx.sth(t, g), 1.0)).collect();
        secondary.extend((0..ns).map(|k| (idx.ss(t, k), 1.0)));
        secondary.push((idx.sreq(t), -1.0));
        m.add_constraint(format!("sfr_adeq_t{}", t + 1), secondary, Ge, 0.0)?;
    }
    Ok(())
}

/// Every frequency-response constraint for a model registered with FR
/// variables.
pub fn add_fr_constraints(
    m: &mut MipModel,
    idx: &UcVariableIndex,
    s: &Scenario,
    segments: &ChordSegmentSet<f64>,
) -> Result<(), FrError> {
    add_inertia_expression(m, idx, s)?;
    add_nadir_constraints(m, idx, s, segments)?;
    add_qss_constraint(m, idx, s)?;
    add_provision_limits(m, idx, s)?;
    add_adequacy_constraints(m, idx, s)?;
    Ok(())
}

/// Which lower bound sets the primary requirement in an hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingTag {
    NadirChord(usize),
    AdequacyFloor,
}

impl Serialize for BindingTag {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl std::fmt::Display for BindingTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BindingTag::NadirChord(i) => write!(f, "nadir_chord_{i}"),
            BindingTag::AdequacyFloor => f.write_str("adequacy_floor"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrRequirementHour {
    pub inertia: f64,
    pub pfr_req: f64,
    pub sfr_req: f64,
    pub binding: BindingTag,
}

/// Smallest requirements the constraints allow at the scheduled inertia,
/// hour by hour. This is what a solution's `P_req`/`S_req` converge to; the
/// variables themselves may sit above it when slack costs nothing.
pub fn requirement_breakdown(
    s: &Scenario,
    segments: &ChordSegmentSet<f64>,
    inertia: &[f64],
) -> Vec<FrRequirementHour> {
    let f = &s.freq;
    let shift = efr_inertia_shift(f);
    inertia
        .iter()
        .zip(&s.profile.demand_mw)
        .map(|(&h, &d)| {
            let floor = f.pfr_floor(d) - f.efr_mw;
            let (chord, i) = segments.envelope(h - shift);
            let (pfr_req, binding) = if chord > floor && chord > 0.0 {
                (chord, BindingTag::NadirChord(i))
            } else {
                (floor.max(0.0), BindingTag::AdequacyFloor)
            };
            FrRequirementHour {
                inertia: h,
                pfr_req,
                sfr_req: f.sfr_requirement(d),
                binding,
            }
        })
        .collect()
}
