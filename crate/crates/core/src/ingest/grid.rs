use super::{parse_json, read_file, IngestError};
use crate::model::{Fraction, GridProfile};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const GRID_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GridFileRepr {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    base_intensity_g_per_kwh: f64,
    renewable_fraction: Fraction,
    #[serde(default)]
    renewable_intensity_g_per_kwh: f64,
}

/// A grid profile file with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub id: Option<String>,
    pub description: Option<String>,
    pub profile: GridProfile,
}

impl GridFile {
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, IngestError> {
        let repr: GridFileRepr = parse_json(text, origin)?;
        if repr.schema_version != GRID_SCHEMA_VERSION {
            return Err(IngestError::UnsupportedSchema {
                origin: origin.to_string(),
                found: repr.schema_version,
                expected: GRID_SCHEMA_VERSION,
            });
        }
        let profile = GridProfile::new(
            repr.base_intensity_g_per_kwh,
            repr.renewable_fraction.get(),
            repr.renewable_intensity_g_per_kwh,
        )
        .map_err(|e| IngestError::Validation {
            origin: origin.to_string(),
            field: e.field,
            reason: e.reason,
            line: None,
            column: None,
        })?;
        Ok(GridFile {
            id: repr.id,
            description: repr.description,
            profile,
        })
    }

    pub fn to_json(&self) -> String {
        let repr = GridFileRepr {
            schema_version: GRID_SCHEMA_VERSION,
            id: self.id.clone(),
            description: self.description.clone(),
            base_intensity_g_per_kwh: self.profile.base_intensity().0,
            renewable_fraction: Fraction::new(self.profile.renewable_fraction()).expect("validated"),
            renewable_intensity_g_per_kwh: self.profile.renewable_intensity().0,
        };
        serde_json::to_string_pretty(&repr).expect("grid file serializes")
    }
}

pub fn load_grid_file(path: &Path) -> Result<GridFile, IngestError> {
    let text = read_file(path)?;
    GridFile::from_json_str(&text, &path.display().to_string())
}

/// Loads and validates a grid profile file.
pub fn load_grid(path: &Path) -> Result<GridProfile, IngestError> {
    load_grid_file(path).map(|g| g.profile)
}
