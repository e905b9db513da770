//! Domain types shared by the formulation, the frequency verifier and the
//! scenario runner.
//!
//! Capacities are in MW and treated as MVA (unity power factor), so inertia
//! is reported in MVA·s. Every period is one hour.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

mod config;
mod profile;
mod validate;

pub use config::{load_scenario, save_scenario, ConfigError, ScenarioConfig};
pub use profile::{load_profiles, write_profiles, ProfileError, PROFILE_HEADER};
pub use validate::{validate_scenario, Violation};

/// Seconds after the contingency at which secondary response takes over.
pub const SFR_START_S: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technology {
    Nuclear,
    Coal,
    Ccgt,
    Ocgt,
}

impl Technology {
    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Nuclear => "nuclear",
            Technology::Coal => "coal",
            Technology::Ccgt => "ccgt",
            Technology::Ocgt => "ocgt",
        }
    }
}

/// An aggregated group of identical thermal units.
///
/// Ramp rates and response limits are per unit; the formulation scales them
/// by the number of units online.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorGroup {
    pub name: String,
    pub technology: Technology,
    pub unit_capacity_mw: f64,
    pub n_units: u32,
    pub marginal_cost: f64,
    pub no_load_cost: f64,
    pub startup_cost: f64,
    pub msg_mw: f64,
    pub startup_time_h: u32,
    pub shutdown_time_h: u32,
    pub ramp_up_mw_per_h: f64,
    pub ramp_down_mw_per_h: f64,
    pub governor_slope: f64,
    pub inertia_constant_s: f64,
    pub pfr_max_mw: f64,
    pub sfr_max_mw: f64,
}

impl GeneratorGroup {
    /// Nuclear groups are pinned fully online for the whole horizon.
    pub fn must_run(&self) -> bool {
        self.technology == Technology::Nuclear
    }

    /// Baseline plant parameters per technology, with illustrative per-unit
    /// response limits (these are not part of the published plant table and
    /// should be overridden in real studies).
    pub fn baseline(technology: Technology, n_units: u32) -> Self {
        let (cap, st, mc, nl, msg, t_up, t_dn, slope, h, v_dn, v_up, pfr, sfr) = match technology {
            Technology::Nuclear => (
                1800.0, 50548.0, 7.1, 0.0, 1800.0, 0, 0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.0,
            ),
            Technology::Coal => (
                500.0, 21001.0, 19.8, 2071.0, 200.0, 4, 4, 0.3, 6.0, 240.0, 200.0, 50.0, 100.0,
            ),
            Technology::Ccgt => (
                500.0, 12564.0, 18.93, 2476.0, 200.0, 2, 2, 0.4, 6.0, 360.0, 360.0, 60.0, 100.0,
            ),
            Technology::Ocgt => (
                200.0, 0.0, 39.54, 4809.0, 0.0, 0, 0, 0.6, 6.0, 200.0, 200.0, 40.0, 80.0,
            ),
        };
        GeneratorGroup {
            name: technology.as_str().to_string(),
            technology,
            unit_capacity_mw: cap,
            n_units,
            marginal_cost: mc,
            no_load_cost: nl,
            startup_cost: st,
            msg_mw: msg,
            startup_time_h: t_up,
            shutdown_time_h: t_dn,
            ramp_up_mw_per_h: v_up,
            ramp_down_mw_per_h: v_dn,
            governor_slope: slope,
            inertia_constant_s: h,
            pfr_max_mw: pfr,
            sfr_max_mw: sfr,
        }
    }

    /// Largest primary response one unit can hold (at zero output).
    pub fn unit_pfr_capability(&self) -> f64 {
        self.pfr_max_mw
            .min(self.governor_slope * self.unit_capacity_mw)
            .max(0.0)
    }

    /// Inertia contributed by one online unit, MVA·s.
    pub fn unit_inertia(&self) -> f64 {
        self.unit_capacity_mw * self.inertia_constant_s
    }
}

/// A storage plant. `efficiency` is one-way: charging stores `η·P_c`,
/// discharging `P_d` removes `P_d/η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageUnit {
    pub name: String,
    pub e_max_mwh: f64,
    pub e_min_mwh: f64,
    pub p_charge_max_mw: f64,
    pub p_discharge_max_mw: f64,
    pub efficiency: f64,
    pub fr_max_mw: f64,
    pub e_initial_mwh: f64,
}

impl StorageUnit {
    /// Default one-way efficiency for pumped hydro (≈75 % round trip).
    pub const PHS_EFFICIENCY: f64 = 0.866;

    pub fn round_trip_efficiency(&self) -> f64 {
        self.efficiency * self.efficiency
    }
}

/// Hourly exogenous series. Interconnector flow is signed, import positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesProfile {
    pub demand_mw: Vec<f64>,
    pub wind_mw: Vec<f64>,
    pub solar_mw: Vec<f64>,
    pub interconnector_mw: Vec<f64>,
    /// Hour of the (365-day) year at which period 0 starts; drives season labels.
    #[serde(default)]
    pub start_hour_of_year: usize,
}

impl TimeSeriesProfile {
    pub fn new(
        demand_mw: Vec<f64>,
        wind_mw: Vec<f64>,
        solar_mw: Vec<f64>,
        interconnector_mw: Vec<f64>,
    ) -> Self {
        TimeSeriesProfile {
            demand_mw,
            wind_mw,
            solar_mw,
            interconnector_mw,
            start_hour_of_year: 0,
        }
    }

    /// Demand only; no renewables and no imports.
    pub fn demand_only(demand_mw: Vec<f64>) -> Self {
        let zeros = vec![0.0; demand_mw.len()];
        Self::new(demand_mw, zeros.clone(), zeros.clone(), zeros)
    }

    pub fn horizon(&self) -> usize {
        self.demand_mw.len()
    }

    pub fn mean_demand(&self) -> f64 {
        if self.demand_mw.is_empty() {
            0.0
        } else {
            self.demand_mw.iter().sum::<f64>() / self.demand_mw.len() as f64
        }
    }

    /// Periods `[start, start + len)` as a new profile.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let end = (start + len).min(self.horizon());
        TimeSeriesProfile {
            demand_mw: self.demand_mw[start..end].to_vec(),
            wind_mw: self.wind_mw[start..end].to_vec(),
            solar_mw: self.solar_mw[start..end].to_vec(),
            interconnector_mw: self.interconnector_mw[start..end].to_vec(),
            start_hour_of_year: self.start_hour_of_year + start,
        }
    }
}

/// Which demand multiplies the load-damping coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DampingDemand<T = f64> {
    /// A single reference demand (MW) for every hour.
    ConstantReference { demand_mw: T },
    /// The hour's own demand.
    Hourly,
}

/// Parameters of the single-area swing equation and the response products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyParams<T = f64> {
    pub nominal_hz: T,
    /// Largest allowed drop at the nadir (`f_o − f_nadir`).
    pub nadir_deviation_hz: T,
    /// Largest allowed drop at quasi-steady state.
    pub qss_deviation_hz: T,
    pub pfr_delivery_s: T,
    pub efr_delivery_s: T,
    pub efr_mw: T,
    pub infeed_loss_mw: T,
    /// Load damping, fraction of demand per Hz.
    pub damping_per_hz: T,
    pub load_inertia_s: T,
    pub damping_demand: DampingDemand<T>,
    /// Let EFR count towards the quasi-steady-state requirement.
    #[serde(default)]
    pub qss_includes_efr: bool,
    /// Account for the finite EFR ramp in the nadir constraint.
    #[serde(default = "default_true")]
    pub efr_ramp_correction: bool,
}

fn default_true() -> bool {
    true
}

impl<T: Scalar> FrequencyParams<T> {
    /// GB defaults: 50 Hz, 0.8 Hz nadir, 0.5 Hz QSS, 10 s PFR, 1 s EFR,
    /// 1320 MW largest infeed and load damping calibrated to 322 MW/Hz at the
    /// given reference demand.
    pub fn gb_default(reference_demand_mw: T) -> Self {
        let damping = if reference_demand_mw > T::zero() {
            T::lit(GB_DAMPING_MW_PER_HZ) / reference_demand_mw
        } else {
            T::zero()
        };
        FrequencyParams {
            nominal_hz: T::lit(50.0),
            nadir_deviation_hz: T::lit(0.8),
            qss_deviation_hz: T::lit(0.5),
            pfr_delivery_s: T::lit(10.0),
            efr_delivery_s: T::lit(1.0),
            efr_mw: T::zero(),
            infeed_loss_mw: T::lit(1320.0),
            damping_per_hz: damping,
            load_inertia_s: T::one(),
            damping_demand: DampingDemand::ConstantReference {
                demand_mw: reference_demand_mw,
            },
            qss_includes_efr: false,
            efr_ramp_correction: true,
        }
    }

    pub fn with_efr(mut self, efr_mw: T) -> Self {
        self.efr_mw = efr_mw;
        self
    }

    /// `D·d_ref` in MW/Hz for an hour with demand `demand_mw`.
    pub fn damping_power(&self, demand_mw: T) -> T {
        match self.damping_demand {
            DampingDemand::ConstantReference { demand_mw: d_ref } => self.damping_per_hz * d_ref,
            DampingDemand::Hourly => self.damping_per_hz * demand_mw,
        }
    }

    /// Lower bound on `P_req + E` so that damping alone holds the drop at the
    /// nadir limit.
    pub fn pfr_floor(&self, demand_mw: T) -> T {
        self.infeed_loss_mw - self.damping_power(demand_mw) * self.nadir_deviation_hz
    }

    /// Minimum secondary response requirement for the hour.
    pub fn sfr_requirement(&self, demand_mw: T) -> T {
        let mut req = self.infeed_loss_mw - self.damping_power(demand_mw) * self.qss_deviation_hz;
        if self.qss_includes_efr {
            req = req - self.efr_mw;
        }
        req.max(T::zero())
    }
}

/// Damping power that reproduces a 1159 MW secondary requirement with a
/// 1320 MW loss and a 0.5 Hz QSS limit.
pub const GB_DAMPING_MW_PER_HZ: f64 = 322.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialGroupState {
    pub online: u32,
    pub output_mw: f64,
}

impl InitialGroupState {
    /// Must-run groups fully online at capacity, everything else off.
    pub fn default_for(g: &GeneratorGroup) -> Self {
        if g.must_run() {
            InitialGroupState {
                online: g.n_units,
                output_mw: g.n_units as f64 * g.unit_capacity_mw,
            }
        } else {
            InitialGroupState {
                online: 0,
                output_mw: 0.0,
            }
        }
    }
}

/// Formulation settings that are not physical data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub chord_segments: usize,
    pub window_hours: usize,
    /// £/MWh charged on spilled wind and solar.
    pub curtailment_cost: f64,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            chord_segments: 16,
            window_hours: 168,
            curtailment_cost: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub groups: Vec<GeneratorGroup>,
    pub storage: Vec<StorageUnit>,
    pub profile: TimeSeriesProfile,
    pub freq: FrequencyParams,
    pub initial_state: Vec<InitialGroupState>,
    pub settings: ModelSettings,
}

impl Scenario {
    /// GB frequency defaults referenced to the profile's mean demand, default
    /// initial states and model settings.
    pub fn new(
        name: impl Into<String>,
        groups: Vec<GeneratorGroup>,
        storage: Vec<StorageUnit>,
        profile: TimeSeriesProfile,
    ) -> Self {
        let initial_state = groups.iter().map(InitialGroupState::default_for).collect();
        Scenario {
            name: name.into(),
            freq: FrequencyParams::gb_default(profile.mean_demand()),
            groups,
            storage,
            profile,
            initial_state,
            settings: ModelSettings::default(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.profile.horizon()
    }

    /// Copy restricted to periods `[start, start + len)` starting from the
    /// given commitment state. Storage keeps its configured initial energy.
    pub fn window(&self, start: usize, len: usize, initial: Vec<InitialGroupState>) -> Scenario {
        Scenario {
            name: format!("{}[{}..{}]", self.name, start, start + len),
            groups: self.groups.clone(),
            storage: self.storage.clone(),
            profile: self.profile.slice(start, len),
            freq: self.freq,
            initial_state: initial,
            settings: self.settings,
        }
    }

    pub fn with_efr(&self, efr_mw: f64) -> Scenario {
        let mut s = self.clone();
        s.freq.efr_mw = efr_mw;
        s
    }

    /// Inertia with every unit online at the given demand.
    pub fn max_inertia(&self, demand_mw: f64) -> f64 {
        self.groups
            .iter()
            .map(|g| g.unit_inertia() * g.n_units as f64)
            .sum::<f64>()
            + demand_mw * self.freq.load_inertia_s
    }

    /// Inertia with only must-run units online at the given demand.
    pub fn min_inertia(&self, demand_mw: f64) -> f64 {
        self.groups
            .iter()
            .filter(|g| g.must_run())
            .map(|g| g.unit_inertia() * g.n_units as f64)
            .sum::<f64>()
            + demand_mw * self.freq.load_inertia_s
    }

    /// Upper bound on primary response deliverable in any hour.
    pub fn pfr_capability(&self) -> f64 {
        self.groups
            .iter()
            .filter(|g| !g.must_run())
            .map(|g| g.unit_pfr_capability() * g.n_units as f64)
            .sum::<f64>()
            + self
                .storage
                .iter()
                .map(|s| s.fr_max_mw.min(s.p_discharge_max_mw).max(0.0))
                .sum::<f64>()
    }
}
