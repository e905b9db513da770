//! TOML scenario files.
//!
//! ```toml
//! name = "baseline-week"
//!
//! [profile]
//! path = "baseline_week.csv"   # relative to this file
//! horizon = 168                # optional, defaults to every row
//!
//! [frequency]
//! efr_mw = 0.0
//! damping_mw_per_hz = 322.0    # or damping_per_hz; both optional
//!
//! [[groups]]
//! name = "ccgt"
//! technology = "ccgt"
//! ...
//! initial_online = 20
//! initial_output_mw = 6000.0
//! ```
//!
//! Every `[frequency]` key has a GB default. Load damping is given either as
//! `damping_per_hz` (fraction of demand per Hz) or `damping_mw_per_hz` (at
//! the reference demand); with neither, 322 MW/Hz at the reference demand is
//! used. The reference demand defaults to the mean of the profile.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::profile::{read_profile, write_profiles, ProfileError};
use super::{
    DampingDemand, FrequencyParams, GeneratorGroup, InitialGroupState, ModelSettings, Scenario,
    StorageUnit, GB_DAMPING_MW_PER_HZ,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid scenario file {path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error(transparent)]
    Serialize(#[from] toml::ser::Error),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub profile: ProfileSection,
    #[serde(default)]
    pub frequency: FrequencySection,
    #[serde(default)]
    pub model: ModelSettings,
    pub groups: Vec<GroupSection>,
    #[serde(default)]
    pub storage: Vec<StorageUnit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub start_hour_of_year: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingMode {
    #[default]
    ConstantReference,
    Hourly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencySection {
    pub nominal_hz: f64,
    pub nadir_deviation_hz: f64,
    pub qss_deviation_hz: f64,
    pub pfr_delivery_s: f64,
    pub efr_delivery_s: f64,
    pub efr_mw: f64,
    pub infeed_loss_mw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping_per_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping_mw_per_hz: Option<f64>,
    pub damping_demand: DampingMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_demand_mw: Option<f64>,
    pub load_inertia_s: f64,
    pub qss_includes_efr: bool,
    pub efr_ramp_correction: bool,
}

impl Default for FrequencySection {
    fn default() -> Self {
        let d = FrequencyParams::<f64>::gb_default(1.0);
        FrequencySection {
            nominal_hz: d.nominal_hz,
            nadir_deviation_hz: d.nadir_deviation_hz,
            qss_deviation_hz: d.qss_deviation_hz,
            pfr_delivery_s: d.pfr_delivery_s,
            efr_delivery_s: d.efr_delivery_s,
            efr_mw: d.efr_mw,
            infeed_loss_mw: d.infeed_loss_mw,
            damping_per_hz: None,
            damping_mw_per_hz: None,
            damping_demand: DampingMode::ConstantReference,
            reference_demand_mw: None,
            load_inertia_s: d.load_inertia_s,
            qss_includes_efr: d.qss_includes_efr,
            efr_ramp_correction: d.efr_ramp_correction,
        }
    }
}

impl FrequencySection {
    fn resolve(&self, mean_demand: f64) -> Result<FrequencyParams, ConfigError> {
        let d_ref = self.reference_demand_mw.unwrap_or(mean_demand);
        let damping_per_hz = match (self.damping_per_hz, self.damping_mw_per_hz) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid(
                    "give damping_per_hz or damping_mw_per_hz, not both".into(),
                ))
            }
            (Some(d), None) => d,
            (None, mw) => {
                let mw = mw.unwrap_or(GB_DAMPING_MW_PER_HZ);
                if d_ref > 0.0 {
                    mw / d_ref
                } else if mw == 0.0 {
                    0.0
                } else {
                    return Err(ConfigError::Invalid(
                        "damping_mw_per_hz needs a positive reference demand".into(),
                    ));
                }
            }
        };
        let damping_demand = match self.damping_demand {
            DampingMode::ConstantReference => DampingDemand::ConstantReference { demand_mw: d_ref },
            DampingMode::Hourly => DampingDemand::Hourly,
        };
        Ok(FrequencyParams {
            nominal_hz: self.nominal_hz,
            nadir_deviation_hz: self.nadir_deviation_hz,
            qss_deviation_hz: self.qss_deviation_hz,
            pfr_delivery_s: self.pfr_delivery_s,
            efr_delivery_s: self.efr_delivery_s,
            efr_mw: self.efr_mw,
            infeed_loss_mw: self.infeed_loss_mw,
            damping_per_hz,
            load_inertia_s: self.load_inertia_s,
            damping_demand,
            qss_includes_efr: self.qss_includes_efr,
            efr_ramp_correction: self.efr_ramp_correction,
        })
    }

    fn from_params(f: &FrequencyParams) -> Self {
        let (mode, reference) = match f.damping_demand {
            DampingDemand::ConstantReference { demand_mw } => {
                (DampingMode::ConstantReference, Some(demand_mw))
            }
            DampingDemand::Hourly => (DampingMode::Hourly, None),
        };
        FrequencySection {
            nominal_hz: f.nominal_hz,
            nadir_deviation_hz: f.nadir_deviation_hz,
            qss_deviation_hz: f.qss_deviation_hz,
            pfr_delivery_s: f.pfr_delivery_s,
            efr_delivery_s: f.efr_delivery_s,
            efr_mw: f.efr_mw,
            infeed_loss_mw: f.infeed_loss_mw,
            damping_per_hz: Some(f.damping_per_hz),
            damping_mw_per_hz: None,
            damping_demand: mode,
            reference_demand_mw: reference,
            load_inertia_s: f.load_inertia_s,
            qss_includes_efr: f.qss_includes_efr,
            efr_ramp_correction: f.efr_ramp_correction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSection {
    #[serde(flatten)]
    pub group: GeneratorGroup,
    /// Units online before the first period; defaults to all units for
    /// must-run groups and none otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_online: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_output_mw: Option<f64>,
}

impl ScenarioConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            source: Box::new(e),
        })
    }

    /// Resolves the profile path against `base_dir` and builds the scenario.
    pub fn into_scenario(self, base_dir: &Path) -> Result<Scenario, ConfigError> {
        let profile_path = if self.profile.path.is_absolute() {
            self.profile.path.clone()
        } else {
            base_dir.join(&self.profile.path)
        };
        let mut profile = read_profile(&profile_path, self.profile.horizon)?;
        profile.start_hour_of_year = self.profile.start_hour_of_year;
        let freq = self.frequency.resolve(profile.mean_demand())?;

        let mut groups = Vec::with_capacity(self.groups.len());
        let mut initial_state = Vec::with_capacity(self.groups.len());
        for section in self.groups {
            let g = section.group;
            let default = InitialGroupState::default_for(&g);
            initial_state.push(InitialGroupState {
                online: section.initial_online.unwrap_or(default.online),
                output_mw: section
                    .initial_output_mw
                    .unwrap_or(match section.initial_online {
                        Some(n) if !g.must_run() => n as f64 * g.msg_mw,
                        _ => default.output_mw,
                    }),
            });
            groups.push(g);
        }

        Ok(Scenario {
            name: self.name,
            groups,
            storage: self.storage,
            profile,
            freq,
            initial_state,
            settings: self.model,
        })
    }

    pub fn from_scenario(s: &Scenario, profile_path: PathBuf) -> Self {
        ScenarioConfig {
            name: s.name.clone(),
            profile: ProfileSection {
                path: profile_path,
                horizon: Some(s.horizon()),
                start_hour_of_year: s.profile.start_hour_of_year,
            },
            frequency: FrequencySection::from_params(&s.freq),
            model: s.settings,
            groups: s
                .groups
                .iter()
                .zip(&s.initial_state)
                .map(|(g, init)| GroupSection {
                    group: g.clone(),
                    initial_online: Some(init.online),
                    initial_output_mw: Some(init.output_mw),
                })
                .collect(),
            storage: s.storage.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string_pretty(self)?)
    }
}

/// Reads a scenario file and the profile CSV it references.
pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let config = ScenarioConfig::parse(&text, path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    config.into_scenario(base)
}

/// Writes `scenario` as `config_path` plus a profile CSV next to it named
/// `profile_file`.
pub fn save_scenario(
    scenario: &Scenario,
    config_path: &Path,
    profile_file: &str,
) -> Result<(), ConfigError> {
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));
    write_profiles(&base.join(profile_file), &scenario.profile)?;
    let text = ScenarioConfig::from_scenario(scenario, PathBuf::from(profile_file)).to_toml()?;
    fs::write(config_path, text).map_err(|source| ConfigError::Write {
        path: config_path.to_path_buf(),
        source,
    })
}
