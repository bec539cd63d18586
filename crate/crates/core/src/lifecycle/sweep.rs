use super::{evaluate, LifecycleError};
use crate::composer::{compose, ComposeError, Composition};
use crate::model::{DeploymentScenario, DeviceProfile, DutyCycle, SystemOption, ValidationError};
use crate::units::Years;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Where an option's device profile comes from. Compositions are kept
/// unresolved so a sweep can vary their die count.
#[derive(Debug, Clone, PartialEq)]
pub enum OptionSource {
    Device(DeviceProfile),
    Composed(Composition),
}

impl OptionSource {
    pub fn resolve(&self) -> Result<DeviceProfile, ComposeError> {
        match self {
            OptionSource::Device(d) => {
                d.validate()?;
                Ok(d.clone())
            }
            OptionSource::Composed(c) => compose(c),
        }
    }

    pub fn to_option(&self) -> Result<SystemOption, ComposeError> {
        self.resolve().map(SystemOption::new)
    }

    fn is_composed(&self) -> bool {
        matches!(self, OptionSource::Composed(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    RenewableFraction,
    RActive,
    RSleep,
    /// Die count of every slot in composed options.
    DieCount,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [
        SweepParameter::RenewableFraction,
        SweepParameter::RActive,
        SweepParameter::RSleep,
        SweepParameter::DieCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::RenewableFraction => "renewable_fraction",
            SweepParameter::RActive => "r_active",
            SweepParameter::RSleep => "r_sleep",
            SweepParameter::DieCount => "die_count",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParameter::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = SweepParameter::ALL.iter().map(|p| p.name()).collect();
            format!("unknown sweep parameter '{s}' (expected one of: {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter_value: f64,
    pub t_indifference_years: Option<Years>,
    pub t_breakeven_years: Option<Years>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_name: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("sweep values must be finite and strictly increasing (offending index {index})")]
    UnorderedValues { index: usize },
}

fn row_error(e: impl fmt::Display) -> String {
    e.to_string()
}

fn substitute(
    opt0: &OptionSource,
    opt1: &OptionSource,
    scenario: &DeploymentScenario,
    parameter: SweepParameter,
    value: f64,
) -> Result<(SystemOption, SystemOption, DeploymentScenario), String> {
    let mut scenario = *scenario;
    let (mut src0, mut src1) = (opt0.clone(), opt1.clone());
    match parameter {
        SweepParameter::RenewableFraction => {
            scenario.grid = scenario.grid.with_renewable_fraction(value).map_err(row_error)?;
        }
        SweepParameter::RActive => {
            scenario.duty = DutyCycle::new(scenario.duty.r_sleep(), value).map_err(row_error)?;
        }
        SweepParameter::RSleep => {
            scenario.duty = DutyCycle::new(value, scenario.duty.r_active()).map_err(row_error)?;
        }
        SweepParameter::DieCount => {
            if !(value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                return Err(row_error(ValidationError::new(
                    "die_count",
                    format!("must be a whole number >= 1, got {value}"),
                )));
            }
            if !src0.is_composed() && !src1.is_composed() {
                return Err("die_count sweep needs at least one composed option".to_string());
            }
            let count = value as u32;
            for src in [&mut src0, &mut src1] {
                if let OptionSource::Composed(c) = src {
                    *c = c.with_uniform_count(count);
                }
            }
        }
    }
    let o0 = src0.to_option().map_err(row_error)?;
    let o1 = src1.to_option().map_err(row_error)?;
    Ok((o0, o1, scenario))
}

fn run_row(
    opt0: &OptionSource,
    opt1: &OptionSource,
    scenario: &DeploymentScenario,
    parameter: SweepParameter,
    value: f64,
) -> SweepRow {
    let outcome = substitute(opt0, opt1, scenario, parameter, value)
        .and_then(|(o0, o1, s)| evaluate(&o0, &o1, &s).map_err(|e: LifecycleError| e.to_string()));
    match outcome {
        Ok(ev) => SweepRow {
            parameter_value: value,
            t_indifference_years: ev.result.t_indifference_years,
            t_breakeven_years: ev.result.t_breakeven_years,
            error: None,
        },
        Err(error) => SweepRow {
            parameter_value: value,
            t_indifference_years: None,
            t_breakeven_years: None,
            error: Some(error),
        },
    }
}

/// Evaluates the comparison once per value of `parameter`.
///
/// Rows are computed in parallel and returned in input order. A value that is
/// invalid for the parameter, or a comparison that fails, yields a row with
/// `error` set; the remaining rows are unaffected.
pub fn sweep(
    opt0: &OptionSource,
    opt1: &OptionSource,
    scenario: &DeploymentScenario,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<SweepResult, SweepError> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() || (i > 0 && *v <= values[i - 1]) {
            return Err(SweepError::UnorderedValues { index: i });
        }
    }
    let rows = values
        .par_iter()
        .map(|&v| run_row(opt0, opt1, scenario, parameter, v))
        .collect();
    Ok(SweepResult {
        parameter_name: parameter.name().to_string(),
        rows,
    })
}
