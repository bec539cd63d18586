//! Builds the profile of a device assembled from retired dies on a new
//! interposer.
//!
//! The aggregation is first order:
//!
//! * throughput is the sum of per-die throughputs, derated by a single
//!   `sdll_efficiency` factor for inter-die communication over package pins;
//! * powers add component-wise, with the interposer's overhead charged as
//!   static power;
//! * embodied carbon is the interposer's plus an optional residual share of
//!   the dies' original embodied carbon (zero by default: the dies were paid
//!   for in their first life).

use crate::model::{DeviceProfile, PowerProfile, ValidationError};
use crate::units::{KgCo2e, Nanoseconds, Watts, Years};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ComposeError {
    #[error("composition has no dies")]
    EmptyComposition,
    #[error("SDLL budget exceeded: {required} lines required, interposer offers {capacity}")]
    SdllBudgetExceeded { required: u32, capacity: u32 },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

fn default_efficiency() -> f64 {
    1.0
}

/// Interposer and packaging used to join the dies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterposerSpec {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    /// Manufacturing carbon of the interposer plus packaging.
    pub embodied_kgco2e: KgCo2e,
    /// Aggregate throughput derating in (0, 1].
    #[serde(default = "default_efficiency")]
    pub sdll_efficiency: f64,
    #[serde(default)]
    pub power_overhead_watts: Watts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdll_capacity: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub synthetic_calibration: bool,
}

impl InterposerSpec {
    /// An interposer with no carbon, power or bandwidth cost.
    pub fn ideal() -> Self {
        Self {
            id: String::new(),
            display_name: None,
            embodied_kgco2e: KgCo2e::ZERO,
            sdll_efficiency: 1.0,
            power_overhead_watts: Watts::ZERO,
            sdll_capacity: None,
            synthetic_calibration: false,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let e = self.embodied_kgco2e.0;
        if !e.is_finite() || e < 0.0 {
            return Err(ValidationError::new(
                "embodied_kgco2e",
                format!("must be >= 0, got {e}"),
            ));
        }
        let eff = self.sdll_efficiency;
        if !(eff.is_finite() && eff > 0.0 && eff <= 1.0) {
            return Err(ValidationError::new(
                "sdll_efficiency",
                format!("must be in (0, 1], got {eff}"),
            ));
        }
        let w = self.power_overhead_watts.0;
        if !w.is_finite() || w < 0.0 {
            return Err(ValidationError::new(
                "power_overhead_watts",
                format!("must be >= 0, got {w}"),
            ));
        }
        if self.sdll_capacity == Some(0) {
            return Err(ValidationError::new("sdll_capacity", "must be positive when present"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieSlot {
    pub device: DeviceProfile,
    pub count: u32,
}

/// Retired dies plus an interposer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    /// Identifier for the composed device. Defaults to the die id for a
    /// single die, otherwise to a generated name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    pub dies: Vec<DieSlot>,
    pub interposer: InterposerSpec,
    #[serde(default)]
    pub residual_embodied_fraction: f64,
    pub lifetime_years: Years,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdll_required: Option<u32>,
}

impl Composition {
    pub fn total_dies(&self) -> u32 {
        self.dies.iter().map(|d| d.count).sum()
    }

    /// Sets every die count to `count`.
    pub fn with_uniform_count(&self, count: u32) -> Composition {
        let mut c = self.clone();
        for slot in &mut c.dies {
            slot.count = count;
        }
        c
    }

    fn default_id(&self) -> String {
        match self.dies.as_slice() {
            [only] if only.count == 1 => only.device.id.clone(),
            dies => {
                let parts: Vec<String> = dies.iter().map(|d| format!("{}x{}", d.device.id, d.count)).collect();
                format!("refresh_{}", parts.join("_"))
            }
        }
    }

    fn default_display_name(&self) -> String {
        match self.dies.as_slice() {
            [only] if only.count == 1 => only.device.display_name.clone(),
            dies => {
                let parts: Vec<String> = dies
                    .iter()
                    .map(|d| format!("{}x {}", d.count, d.device.display_name))
                    .collect();
                format!("REFRESH ({})", parts.join(" + "))
            }
        }
    }
}

/// Checks the SDLL budget. Passes when either side is unspecified.
pub fn validate_composition(c: &Composition) -> Result<(), ComposeError> {
    match (c.sdll_required, c.interposer.sdll_capacity) {
        (Some(required), Some(capacity)) if required > capacity => {
            Err(ComposeError::SdllBudgetExceeded { required, capacity })
        }
        _ => Ok(()),
    }
}

fn check_structure(c: &Composition) -> Result<(), ComposeError> {
    if c.dies.is_empty() {
        return Err(ComposeError::EmptyComposition);
    }
    for (i, slot) in c.dies.iter().enumerate() {
        if slot.count < 1 {
            return Err(ValidationError::new(format!("dies[{i}].count"), "must be >= 1").into());
        }
        slot.device
            .validate()
            .map_err(|e| e.under(&format!("dies[{i}].device")))?;
    }
    c.interposer.validate().map_err(|e| e.under("interposer"))?;
    let r = c.residual_embodied_fraction;
    if !(r.is_finite() && (0.0..=1.0).contains(&r)) {
        return Err(ValidationError::new("residual_embodied_fraction", format!("must be in [0, 1], got {r}")).into());
    }
    let l = c.lifetime_years.0;
    if !(l.is_finite() && l > 0.0) {
        return Err(ValidationError::new("lifetime_years", format!("must be > 0, got {l}")).into());
    }
    if c.sdll_required == Some(0) {
        return Err(ValidationError::new("sdll_required", "must be positive when present").into());
    }
    Ok(())
}

/// Aggregates a composition into a single device profile.
pub fn compose(c: &Composition) -> Result<DeviceProfile, ComposeError> {
    check_structure(c)?;
    validate_composition(c)?;

    // Throughput relative to the first die's latency, so a homogeneous
    // composition divides that latency by a plain count with no reciprocal
    // round trip.
    let reference = c.dies[0].device.unit_work_latency_ns.0;
    let relative: f64 = c
        .dies
        .iter()
        .map(|d| {
            let units = f64::from(d.count) * f64::from(d.device.parallel_units);
            let latency = d.device.unit_work_latency_ns.0;
            if latency == reference {
                units
            } else {
                units * (reference / latency)
            }
        })
        .sum();
    let latency = reference / (c.interposer.sdll_efficiency * relative);

    let sum_power = |pick: fn(&PowerProfile) -> Watts| -> Watts {
        c.dies.iter().map(|d| pick(&d.device.power) * f64::from(d.count)).sum()
    };
    let power = PowerProfile {
        p_dynamic: sum_power(|p| p.p_dynamic),
        p_static: sum_power(|p| p.p_static) + c.interposer.power_overhead_watts,
        p_sleep: sum_power(|p| p.p_sleep),
    };

    let die_embodied: KgCo2e = c
        .dies
        .iter()
        .map(|d| d.device.embodied_kgco2e * f64::from(d.count))
        .sum();
    let embodied = c.interposer.embodied_kgco2e + die_embodied * c.residual_embodied_fraction;

    // oldest process node dominates the package
    let tech_node_nm = c.dies.iter().map(|d| d.device.tech_node_nm).fold(f64::MIN, f64::max);

    let profile = DeviceProfile {
        id: c.id.clone().unwrap_or_else(|| c.default_id()),
        display_name: c.display_name.clone().unwrap_or_else(|| c.default_display_name()),
        tech_node_nm,
        unit_work_latency_ns: Nanoseconds(latency),
        parallel_units: 1,
        power,
        embodied_kgco2e: embodied,
        lifetime_years: c.lifetime_years,
        synthetic_calibration: c.interposer.synthetic_calibration
            || c.dies.iter().any(|d| d.device.synthetic_calibration),
        notes: None,
    };
    Ok(profile)
}
