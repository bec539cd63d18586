//! Catalog and grid-profile files, bundled fixtures, and the optional remote
//! grid-intensity client.
//!
//! File schemas (JSON, `"schema_version": 1`) are described in
//! `docs/schemas.md` at the repository root.

mod catalog;
mod grid;
mod remote;

pub use catalog::{
    load_catalog, Catalog, CompositionRecord, DieRef, InterposerRef, LcaBreakdown, CATALOG_SCHEMA_VERSION,
};
pub use grid::{load_grid, load_grid_file, GridFile};
pub use remote::{fetch_grid_intensity, FetchedGrid, GridClient, Provenance, DEFAULT_TIMEOUT, ENDPOINT_ENV};

use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: parse error: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}{}: invalid {field}: {reason}", location(*.line, *.column))]
    Validation {
        origin: String,
        field: String,
        reason: String,
        line: Option<usize>,
        column: Option<usize>,
    },
    #[error("{origin}: composition '{composition}' references unknown {kind} '{missing}'")]
    DanglingReference {
        origin: String,
        composition: String,
        kind: &'static str,
        missing: String,
    },
    #[error("unsupported schema_version {found} in {origin} (expected {expected})")]
    UnsupportedSchema { origin: String, found: u32, expected: u32 },
    #[error("unknown id '{0}'")]
    UnknownId(String),
    #[error("grid endpoint {endpoint} (region {region}): network error: {detail}")]
    Network {
        endpoint: String,
        region: String,
        detail: String,
    },
    #[error("grid endpoint {endpoint} (region {region}): unexpected response: {detail}")]
    RemoteSchema {
        endpoint: String,
        region: String,
        detail: String,
    },
    #[error("invalid endpoint '{0}': expected an http:// or https:// URL")]
    InvalidEndpoint(String),
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(":{l}:{c}"),
        _ => String::new(),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            IngestError::FileNotFound(path.to_path_buf())
        } else {
            IngestError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

/// Deserializes JSON, mapping syntax errors to [`IngestError::Parse`] and type
/// or domain errors to [`IngestError::Validation`] with the JSON path of the
/// offending field.
pub(crate) fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, IngestError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        let message = strip_position(&inner.to_string());
        match inner.classify() {
            serde_json::error::Category::Data => IngestError::Validation {
                origin: origin.to_string(),
                field,
                reason: message,
                line: Some(inner.line()),
                column: Some(inner.column()),
            },
            _ => IngestError::Parse {
                origin: origin.to_string(),
                line: inner.line(),
                column: inner.column(),
                message,
            },
        }
    })?;
    de.end().map_err(|inner| IngestError::Parse {
        origin: origin.to_string(),
        line: inner.line(),
        column: inner.column(),
        message: strip_position(&inner.to_string()),
    })?;
    Ok(value)
}

fn strip_position(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}

/// Fixtures compiled into the crate.
pub mod bundled {
    use super::{Catalog, GridFile, IngestError};
    use crate::model::GridProfile;

    pub const CATALOG_JSON: &str = include_str!("../../fixtures/catalog.json");
    pub const GRID_BASELINE_JSON: &str = include_str!("../../fixtures/grid_baseline.json");
    pub const GRID_90PCT_RENEWABLES_JSON: &str = include_str!("../../fixtures/grid_90pct_renewables.json");

    pub const GRID_NAMES: [&str; 2] = ["grid_baseline", "grid_90pct_renewables"];

    /// The bundled device catalog.
    pub fn catalog() -> Catalog {
        Catalog::from_json_str(CATALOG_JSON, "<bundled catalog>").expect("bundled catalog is valid")
    }

    pub fn grid(name: &str) -> Result<GridProfile, IngestError> {
        let text = match name {
            "grid_baseline" => GRID_BASELINE_JSON,
            "grid_90pct_renewables" => GRID_90PCT_RENEWABLES_JSON,
            other => return Err(IngestError::UnknownId(other.to_string())),
        };
        Ok(GridFile::from_json_str(text, name)?.profile)
    }
}
