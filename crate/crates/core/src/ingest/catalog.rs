use super::{parse_json, read_file, IngestError};
use crate::composer::{compose, ComposeError, Composition, DieSlot, InterposerSpec};
use crate::lifecycle::OptionSource;
use crate::model::{DeviceProfile, ValidationError};
use crate::units::Years;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub const CATALOG_SCHEMA_VERSION: u32 = 1;

/// Share of a product's lifecycle CO2e by phase, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcaBreakdown {
    pub product: String,
    pub manufacturing_pct: f64,
    pub operational_pct: f64,
    pub supply_chain_pct: f64,
    pub disposal_pct: f64,
}

impl LcaBreakdown {
    /// Published breakdowns are rounded, so totals drift a little off 100.
    pub const TOTAL_RANGE: (f64, f64) = (98.0, 103.0);

    pub fn total_pct(&self) -> f64 {
        self.manufacturing_pct + self.operational_pct + self.supply_chain_pct + self.disposal_pct
    }

    fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("manufacturing_pct", self.manufacturing_pct),
            ("operational_pct", self.operational_pct),
            ("supply_chain_pct", self.supply_chain_pct),
            ("disposal_pct", self.disposal_pct),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ValidationError::new(
                    name,
                    format!("must be a percentage >= 0, got {v}"),
                ));
            }
        }
        let total = self.total_pct();
        let (lo, hi) = Self::TOTAL_RANGE;
        if !(lo..=hi).contains(&total) {
            return Err(ValidationError::new(
                "",
                format!("percentages of '{}' sum to {total}, outside [{lo}, {hi}]", self.product),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieRef {
    pub device: String,
    pub count: u32,
}

/// An interposer given by catalog id or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InterposerRef {
    Id(String),
    Inline(InterposerSpec),
}

/// A composition as written in a catalog: dies and interposer by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionRecord {
    #[serde(default)]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    pub dies: Vec<DieRef>,
    pub interposer: InterposerRef,
    #[serde(default)]
    pub residual_embodied_fraction: f64,
    pub lifetime_years: Years,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdll_required: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub synthetic_calibration: bool,
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
    devices: Vec<DeviceProfile>,
    #[serde(default)]
    interposers: Vec<InterposerSpec>,
    #[serde(default)]
    compositions: Vec<CompositionRecord>,
    #[serde(default)]
    lca_reference: Vec<LcaBreakdown>,
}

/// Validated devices, interposers and compositions, keyed and ordered by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub notes: Option<String>,
    pub devices: BTreeMap<String, DeviceProfile>,
    pub interposers: BTreeMap<String, InterposerSpec>,
    pub compositions: BTreeMap<String, CompositionRecord>,
    pub lca_reference: Vec<LcaBreakdown>,
}

fn invalid(origin: &str, e: ValidationError, prefix: &str) -> IngestError {
    let e = e.under(prefix);
    IngestError::Validation {
        origin: origin.to_string(),
        field: e.field,
        reason: e.reason,
        line: None,
        column: None,
    }
}

fn insert_unique<T>(
    map: &mut BTreeMap<String, T>,
    id: &str,
    value: T,
    origin: &str,
    path: &str,
) -> Result<(), IngestError> {
    if id.trim().is_empty() {
        return Err(invalid(origin, ValidationError::new("id", "must not be empty"), path));
    }
    if map.insert(id.to_string(), value).is_some() {
        return Err(invalid(
            origin,
            ValidationError::new("id", format!("duplicate id '{id}'")),
            path,
        ));
    }
    Ok(())
}

impl Catalog {
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, IngestError> {
        let file: CatalogFile = parse_json(text, origin)?;
        if file.schema_version != CATALOG_SCHEMA_VERSION {
            return Err(IngestError::UnsupportedSchema {
                origin: origin.to_string(),
                found: file.schema_version,
                expected: CATALOG_SCHEMA_VERSION,
            });
        }

        let mut devices = BTreeMap::new();
        for (i, d) in file.devices.into_iter().enumerate() {
            let path = format!("devices[{i}]");
            d.validate().map_err(|e| invalid(origin, e, &path))?;
            let id = d.id.clone();
            insert_unique(&mut devices, &id, d, origin, &path)?;
        }

        let mut interposers = BTreeMap::new();
        for (i, p) in file.interposers.into_iter().enumerate() {
            let path = format!("interposers[{i}]");
            p.validate().map_err(|e| invalid(origin, e, &path))?;
            let id = p.id.clone();
            insert_unique(&mut interposers, &id, p, origin, &path)?;
        }

        let mut catalog = Catalog {
            notes: file.notes,
            devices,
            interposers,
            compositions: BTreeMap::new(),
            lca_reference: Vec::new(),
        };

        for (i, rec) in file.compositions.into_iter().enumerate() {
            let path = format!("compositions[{i}]");
            let composition = catalog.resolve_record_with_origin(&rec, origin)?;
            compose(&composition).map_err(|e| match e {
                ComposeError::Invalid(v) => invalid(origin, v, &path),
                other => invalid(origin, ValidationError::new("", other.to_string()), &path),
            })?;
            let id = rec.id.clone();
            insert_unique(&mut catalog.compositions, &id, rec, origin, &path)?;
        }
        let mut all_ids = BTreeSet::new();
        for id in catalog.devices.keys().chain(catalog.compositions.keys()) {
            if !all_ids.insert(id) {
                return Err(invalid(
                    origin,
                    ValidationError::new("id", format!("'{id}' names both a device and a composition")),
                    "compositions",
                ));
            }
        }

        for (i, row) in file.lca_reference.iter().enumerate() {
            row.validate()
                .map_err(|e| invalid(origin, e, &format!("lca_reference[{i}]")))?;
        }
        catalog.lca_reference = file.lca_reference;
        Ok(catalog)
    }

    /// Serializes back to the file format. Reloading the output yields an
    /// equal catalog.
    pub fn to_json(&self) -> String {
        let file = CatalogFile {
            schema_version: CATALOG_SCHEMA_VERSION,
            notes: self.notes.clone(),
            devices: self.devices.values().cloned().collect(),
            interposers: self.interposers.values().cloned().collect(),
            compositions: self.compositions.values().cloned().collect(),
            lca_reference: self.lca_reference.clone(),
        };
        serde_json::to_string_pretty(&file).expect("catalog serializes")
    }

    pub fn device(&self, id: &str) -> Result<&DeviceProfile, IngestError> {
        self.devices
            .get(id)
            .ok_or_else(|| IngestError::UnknownId(id.to_string()))
    }

    pub fn interposer(&self, id: &str) -> Result<&InterposerSpec, IngestError> {
        self.interposers
            .get(id)
            .ok_or_else(|| IngestError::UnknownId(id.to_string()))
    }

    /// Resolves die and interposer references of a record against this
    /// catalog.
    pub fn resolve_record(&self, rec: &CompositionRecord) -> Result<Composition, IngestError> {
        self.resolve_record_with_origin(rec, "request")
    }

    fn resolve_record_with_origin(&self, rec: &CompositionRecord, origin: &str) -> Result<Composition, IngestError> {
        let dangling = |kind: &'static str, missing: &str| IngestError::DanglingReference {
            origin: origin.to_string(),
            composition: rec.id.clone(),
            kind,
            missing: missing.to_string(),
        };
        let dies = rec
            .dies
            .iter()
            .map(|d| {
                let device = self.devices.get(&d.device).ok_or_else(|| dangling("die", &d.device))?;
                Ok(DieSlot {
                    device: device.clone(),
                    count: d.count,
                })
            })
            .collect::<Result<Vec<_>, IngestError>>()?;
        let interposer = match &rec.interposer {
            InterposerRef::Id(id) => self
                .interposers
                .get(id)
                .ok_or_else(|| dangling("interposer", id))?
                .clone(),
            InterposerRef::Inline(spec) => spec.clone(),
        };
        Ok(Composition {
            id: (!rec.id.is_empty()).then(|| rec.id.clone()),
            display_name: rec.display_name.clone(),
            dies,
            interposer,
            residual_embodied_fraction: rec.residual_embodied_fraction,
            lifetime_years: rec.lifetime_years,
            sdll_required: rec.sdll_required,
        })
    }

    pub fn composition(&self, id: &str) -> Result<Composition, IngestError> {
        let rec = self
            .compositions
            .get(id)
            .ok_or_else(|| IngestError::UnknownId(id.to_string()))?;
        self.resolve_record(rec)
    }

    /// Looks an id up among devices, then compositions.
    pub fn option_source(&self, id: &str) -> Result<OptionSource, IngestError> {
        if let Some(d) = self.devices.get(id) {
            return Ok(OptionSource::Device(d.clone()));
        }
        if self.compositions.contains_key(id) {
            return self.composition(id).map(OptionSource::Composed);
        }
        Err(IngestError::UnknownId(id.to_string()))
    }
}

/// Loads and fully validates a catalog file.
pub fn load_catalog(path: &Path) -> Result<Catalog, IngestError> {
    let text = read_file(path)?;
    Catalog::from_json_str(&text, &path.display().to_string())
}
