use crate::mip::{MipError, MipModel, VarId};
use crate::system::Scenario;

use super::ident;

/// Variables that only exist when frequency response is co-scheduled.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FrVariables {
    inertia: Vec<VarId>,
    pfr_group: Vec<VarId>,
    sfr_group: Vec<VarId>,
    pfr_storage: Vec<VarId>,
    sfr_storage: Vec<VarId>,
}

/// Where every decision variable of a scenario lives in the [`MipModel`].
///
/// Per-group vectors are laid out `t·G + g`, per-store vectors `t·S + s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UcVariableIndex {
    periods: usize,
    groups: usize,
    stores: usize,
    pgen: Vec<VarId>,
    u: Vec<VarId>,
    son: Vec<VarId>,
    soff: Vec<VarId>,
    charge: Vec<VarId>,
    discharge: Vec<VarId>,
    energy: Vec<VarId>,
    curtailment: Vec<VarId>,
    preq: Vec<VarId>,
    sreq: Vec<VarId>,
    fr: Option<FrVariables>,
}

impl UcVariableIndex {
    /// Adds all variables with their bounds, period by period.
    pub fn register(m: &mut MipModel, s: &Scenario, with_fr: bool) -> Result<Self, MipError> {
        let (periods, groups, stores) = (s.horizon(), s.groups.len(), s.storage.len());
        let gnames: Vec<String> = s.groups.iter().map(|g| ident(&g.name)).collect();
        let snames: Vec<String> = s.storage.iter().map(|st| ident(&st.name)).collect();
        let cap = periods * groups;
        let scap = periods * stores;
        let mut idx = UcVariableIndex {
            periods,
            groups,
            stores,
            pgen: Vec::with_capacity(cap),
            u: Vec::with_capacity(cap),
            son: Vec::with_capacity(cap),
            soff: Vec::with_capacity(cap),
            charge: Vec::with_capacity(scap),
            discharge: Vec::with_capacity(scap),
            energy: Vec::with_capacity(scap),
            curtailment: Vec::with_capacity(periods),
            preq: Vec::with_capacity(periods),
            sreq: Vec::with_capacity(periods),
            fr: None,
        };
        let mut fr = with_fr.then(|| FrVariables {
            inertia: Vec::with_capacity(periods),
            pfr_group: Vec::with_capacity(cap),
            sfr_group: Vec::with_capacity(cap),
            pfr_storage: Vec::with_capacity(scap),
            sfr_storage: Vec::with_capacity(scap),
        });

        for t in 0..periods {
            let h = t + 1;
            for (g, grp) in s.groups.iter().enumerate() {
                let n = grp.n_units as f64;
                let name = &gnames[g];
                idx.pgen.push(m.continuous(
                    format!("pgen_{name}_t{h}"),
                    0.0,
                    n * grp.unit_capacity_mw,
                )?);
                let u_lo = if grp.must_run() { n } else { 0.0 };
                idx.u.push(m.integer(format!("u_{name}_t{h}"), u_lo, n)?);
                idx.son.push(m.integer(format!("son_{name}_t{h}"), 0.0, n)?);
                idx.soff
                    .push(m.integer(format!("soff_{name}_t{h}"), 0.0, n)?);
            }
            for (k, st) in s.storage.iter().enumerate() {
                let name = &snames[k];
                idx.charge.push(m.continuous(
                    format!("pc_{name}_t{h}"),
                    0.0,
                    st.p_charge_max_mw,
                )?);
                idx.discharge.push(m.continuous(
                    format!("pd_{name}_t{h}"),
                    0.0,
                    st.p_discharge_max_mw,
                )?);
                idx.energy.push(m.continuous(
                    format!("e_{name}_t{h}"),
                    st.e_min_mwh,
                    st.e_max_mwh,
                )?);
            }
            let spill = s.profile.wind_mw[t] + s.profile.solar_mw[t];
            idx.curtailment
                .push(m.continuous(format!("curt_t{h}"), 0.0, spill)?);
            idx.preq
                .push(m.continuous(format!("preq_t{h}"), 0.0, f64::INFINITY)?);
            idx.sreq
                .push(m.continuous(format!("sreq_t{h}"), 0.0, f64::INFINITY)?);

            if let Some(fr) = fr.as_mut() {
                fr.inertia
                    .push(m.continuous(format!("h_t{h}"), 0.0, f64::INFINITY)?);
                for (g, grp) in s.groups.iter().enumerate() {
                    let name = &gnames[g];
                    let hi = if grp.must_run() { 0.0 } else { f64::INFINITY };
                    fr.pfr_group
                        .push(m.continuous(format!("pth_{name}_t{h}"), 0.0, hi)?);
                    fr.sfr_group
                        .push(m.continuous(format!("sth_{name}_t{h}"), 0.0, hi)?);
                }
                for name in &snames {
                    fr.pfr_storage.push(m.continuous(
                        format!("ps_{name}_t{h}"),
                        0.0,
                        f64::INFINITY,
                    )?);
                    fr.sfr_storage.push(m.continuous(
                        format!("ss_{name}_t{h}"),
                        0.0,
                        f64::INFINITY,
                    )?);
                }
            }
        }
        idx.fr = fr;
        Ok(idx)
    }

    /// `T·(4G + 3S + 3)`, plus `T·(1 + 2G + 2S)` with frequency response.
    pub fn expected_count(periods: usize, groups: usize, stores: usize, with_fr: bool) -> usize {
        let base = periods * (4 * groups + 3 * stores + 3);
        let fr = if with_fr {
            periods * (1 + 2 * groups + 2 * stores)
        } else {
            0
        };
        base + fr
    }

    pub fn count(&self) -> usize {
        Self::expected_count(self.periods, self.groups, self.stores, self.fr.is_some())
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn num_groups(&self) -> usize {
        self.groups
    }

    pub fn num_stores(&self) -> usize {
        self.stores
    }

    pub fn has_fr(&self) -> bool {
        self.fr.is_some()
    }

    pub fn pgen(&self, t: usize, g: usize) -> VarId {
        self.pgen[t * self.groups + g]
    }

    pub fn u(&self, t: usize, g: usize) -> VarId {
        self.u[t * self.groups + g]
    }

    pub fn son(&self, t: usize, g: usize) -> VarId {
        self.son[t * self.groups + g]
    }

    pub fn soff(&self, t: usize, g: usize) -> VarId {
        self.soff[t * self.groups + g]
    }

    pub fn charge(&self, t: usize, s: usize) -> VarId {
        self.charge[t * self.stores + s]
    }

    pub fn discharge(&self, t: usize, s: usize) -> VarId {
        self.discharge[t * self.stores + s]
    }

    pub fn energy(&self, t: usize, s: usize) -> VarId {
        self.energy[t * self.stores + s]
    }

    pub fn curtailment(&self, t: usize) -> VarId {
        self.curtailment[t]
    }

    pub fn preq(&self, t: usize) -> VarId {
        self.preq[t]
    }

    pub fn sreq(&self, t: usize) -> VarId {
        self.sreq[t]
    }

    /// Every registered variable, in registration order.
    pub fn all(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = [
            &self.pgen,
            &self.u,
            &self.son,
            &self.soff,
            &self.charge,
            &self.discharge,
            &self.energy,
            &self.curtailment,
            &self.preq,
            &self.sreq,
        ]
        .into_iter()
        .flatten()
        .copied()
        .collect();
        if let Some(fr) = &self.fr {
            out.extend(
                [
                    &fr.inertia,
                    &fr.pfr_group,
                    &fr.sfr_group,
                    &fr.pfr_storage,
                    &fr.sfr_storage,
                ]
                .into_iter()
                .flatten()
                .copied(),
            );
        }
        out.sort();
        out
    }
}

impl UcVariableIndex {
    fn fr_vars(&self) -> &FrVariables {
        self.fr
            .as_ref()
            .expect("frequency-response variables not registered")
    }

    /// System inertia `H_t`.
    pub fn inertia(&self, t: usize) -> VarId {
        self.fr_vars().inertia[t]
    }

    /// Primary response held by group `g`.
    pub fn pth(&self, t: usize, g: usize) -> VarId {
        self.fr_vars().pfr_group[t * self.groups + g]
    }

    /// Secondary response held by group `g`.
    pub fn sth(&self, t: usize, g: usize) -> VarId {
        self.fr_vars().sfr_group[t * self.groups + g]
    }

    pub fn ps(&self, t: usize, s: usize) -> VarId {
        self.fr_vars().pfr_storage[t * self.stores + s]
    }

    pub fn ss(&self, t: usize, s: usize) -> VarId {
        self.fr_vars().sfr_storage[t * self.stores + s]
    }
}
