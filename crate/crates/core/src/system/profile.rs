use std::fs::File;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::TimeSeriesProfile;

/// Exact header row of a profile CSV.
pub const PROFILE_HEADER: [&str; 5] = [
    "period",
    "demand_mw",
    "wind_mw",
    "solar_mw",
    "interconnector_mw",
];

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("cannot open profile {path}: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("profile header must be `{}`, found `{found}`", PROFILE_HEADER.join(","))]
    Header { found: String },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: negative {column} ({value})")]
    Negative {
        row: usize,
        column: &'static str,
        value: f64,
    },
    #[error("profile has {found} rows, {wanted} requested")]
    Short { found: usize, wanted: usize },
    #[error("writing profile: {0}")]
    Write(#[from] csv::Error),
}

/// Reads the first `horizon` rows of an hourly profile CSV. Rows are numbered
/// from 1 (the first data row) in error messages.
pub fn load_profiles(path: &Path, horizon: usize) -> Result<TimeSeriesProfile, ProfileError> {
    read_profile(path, Some(horizon))
}

/// Reads `limit` rows, or the whole file when `limit` is `None`.
pub(crate) fn read_profile(
    path: &Path,
    limit: Option<usize>,
) -> Result<TimeSeriesProfile, ProfileError> {
    let file = File::open(path).map_err(|source| ProfileError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| ProfileError::Header {
            found: e.to_string(),
        })?
        .clone();
    if headers.iter().ne(PROFILE_HEADER.iter().copied()) {
        return Err(ProfileError::Header {
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut profile = TimeSeriesProfile {
        demand_mw: Vec::new(),
        wind_mw: Vec::new(),
        solar_mw: Vec::new(),
        interconnector_mw: Vec::new(),
        start_hour_of_year: 0,
    };

    for (i, record) in reader.records().enumerate() {
        if Some(profile.demand_mw.len()) == limit {
            break;
        }
        let row = i + 1;
        let record = record.map_err(|e| ProfileError::Malformed {
            row,
            message: e.to_string(),
        })?;
        if record.len() != PROFILE_HEADER.len() {
            return Err(ProfileError::Malformed {
                row,
                message: format!(
                    "expected {} fields, found {}",
                    PROFILE_HEADER.len(),
                    record.len()
                ),
            });
        }
        let mut values = [0.0; 4];
        for (k, value) in values.iter_mut().enumerate() {
            let column = PROFILE_HEADER[k + 1];
            let raw = &record[k + 1];
            *value = raw.parse::<f64>().map_err(|_| ProfileError::Malformed {
                row,
                message: format!("{column} is not a number: `{raw}`"),
            })?;
            if !value.is_finite() {
                return Err(ProfileError::Malformed {
                    row,
                    message: format!("{column} is not finite"),
                });
            }
            if k < 3 && *value < 0.0 {
                return Err(ProfileError::Negative {
                    row,
                    column,
                    value: *value,
                });
            }
        }
        profile.demand_mw.push(values[0]);
        profile.wind_mw.push(values[1]);
        profile.solar_mw.push(values[2]);
        profile.interconnector_mw.push(values[3]);
    }

    if let Some(wanted) = limit {
        if profile.demand_mw.len() < wanted {
            return Err(ProfileError::Short {
                found: profile.demand_mw.len(),
                wanted,
            });
        }
    }
    Ok(profile)
}

/// Writes a profile in the format read by [`load_profiles`].
pub fn write_profiles(path: &Path, profile: &TimeSeriesProfile) -> Result<(), ProfileError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(PROFILE_HEADER)?;
    for t in 0..profile.horizon() {
        writer.write_record(&[
            (t + 1).to_string(),
            profile.demand_mw[t].to_string(),
            profile.wind_mw[t].to_string(),
            profile.solar_mw[t].to_string(),
            profile.interconnector_mw[t].to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
