//! Indifference and break-even analysis between two options.
//!
//! Each option accrues carbon along a straight line
//!
//! ```text
//! C_i(t) = E_i * [upfront] + (O_i + E_i / L_i) * t
//! ```
//!
//! where `O_i` is annual operational carbon, `E_i` embodied carbon and `L_i`
//! lifetime; the `E_i / L_i` term amortizes replacement continuously.
//!
//! * The indifference time `t_I` is where the two lines meet with both
//!   upfronts included: `t_I = (E1 - E0) / (rate0 - rate1)`.
//! * The break-even time `t_B` is where they meet when option 0's upfront is
//!   already sunk: `t_B = E1 / (rate0 - rate1)`.
//!
//! By convention option 1 is the higher-embodied candidate that has to earn
//! its embodied carbon back through a lower running rate. A non-positive
//! denominator means it never does, which is reported as "no indifference
//! point" (`None`), never as infinity.

mod scan;
mod sweep;

pub use scan::{crossover_scan, CrossoverKind, ReplacementModel, ScanConfig};
pub use sweep::{sweep, OptionSource, SweepError, SweepParameter, SweepResult, SweepRow};

use crate::composer::ComposeError;
use crate::model::{
    annual_work, operational_carbon_rate, ComparisonMode, DeploymentScenario, DutyCycle, SystemOption, ValidationError,
};
use crate::units::{KgCo2e, KgCo2ePerYear, Years};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LifecycleError {
    #[error(
        "infeasible duty cycle: matching the work needs an active fraction of {required_active_fraction} \
         but only {awake_fraction} of the time is awake"
    )]
    InfeasibleDutyCycle {
        required_active_fraction: f64,
        awake_fraction: f64,
    },
    #[error("time must be >= 0, got {0}")]
    NegativeTime(f64),
    #[error("invalid scan grid: t_max = {t_max}, dt = {dt}")]
    InvalidScanGrid { t_max: f64, dt: f64 },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// Closed-form comparison of two options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleResult {
    pub t_indifference_years: Option<Years>,
    pub t_breakeven_years: Option<Years>,
    pub rate0_kg_per_year: KgCo2ePerYear,
    pub rate1_kg_per_year: KgCo2ePerYear,
    pub o0_kg_per_year: KgCo2ePerYear,
    pub o1_kg_per_year: KgCo2ePerYear,
    pub e0_kg: KgCo2e,
    pub e1_kg: KgCo2e,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// `(t, cumulative carbon)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t_years: f64,
    pub cumulative_kgco2e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarbonCurve {
    pub option_label: String,
    pub samples: Vec<CurvePoint>,
    pub includes_upfront: bool,
}

/// Annual operational carbon of an option under its effective duty cycle.
pub fn operational_rate(option: &SystemOption, scenario: &DeploymentScenario) -> KgCo2ePerYear {
    operational_carbon_rate(&option.device, &option.effective_duty(scenario), &scenario.grid)
}

/// `O + E / L`.
pub fn total_rate(option: &SystemOption, scenario: &DeploymentScenario) -> KgCo2ePerYear {
    operational_rate(option, scenario) + option.device.amortized_embodied()
}

/// Indifference time from embodied values and total rates.
pub fn indifference_from_rates(e0: KgCo2e, e1: KgCo2e, rate0: KgCo2ePerYear, rate1: KgCo2ePerYear) -> Option<Years> {
    if e1 == e0 {
        return Some(Years::ZERO);
    }
    let gap = rate0 - rate1;
    if gap.0 <= 0.0 {
        return None;
    }
    if e1 < e0 {
        // option 1 is cheaper upfront and cheaper to run
        return Some(Years::ZERO);
    }
    Some((e1 - e0) / gap)
}

/// Break-even time from embodied values and total rates.
pub fn breakeven_from_rates(e1: KgCo2e, rate0: KgCo2ePerYear, rate1: KgCo2ePerYear) -> Option<Years> {
    let gap = rate0 - rate1;
    (gap.0 > 0.0).then(|| e1 / gap)
}

/// Time until option 1's lower running rate pays back its extra embodied
/// carbon, with both upfronts counted. Options are used as given: any
/// equal-work adjustment must already be in `duty_override` (see
/// [`evaluate`]).
pub fn indifference_time(opt0: &SystemOption, opt1: &SystemOption, scenario: &DeploymentScenario) -> Option<Years> {
    indifference_from_rates(
        opt0.device.embodied_kgco2e,
        opt1.device.embodied_kgco2e,
        total_rate(opt0, scenario),
        total_rate(opt1, scenario),
    )
}

/// Like [`indifference_time`] but treating option 0's upfront as sunk.
pub fn breakeven_time(opt0: &SystemOption, opt1: &SystemOption, scenario: &DeploymentScenario) -> Option<Years> {
    breakeven_from_rates(
        opt1.device.embodied_kgco2e,
        total_rate(opt0, scenario),
        total_rate(opt1, scenario),
    )
}

/// Carbon accrued by time `t` on the linear curve model.
pub fn cumulative_carbon(
    option: &SystemOption,
    scenario: &DeploymentScenario,
    t: Years,
    include_upfront: bool,
) -> Result<KgCo2e, LifecycleError> {
    if t.0.is_nan() || t.0 < 0.0 {
        return Err(LifecycleError::NegativeTime(t.0));
    }
    let upfront = if include_upfront {
        option.device.embodied_kgco2e
    } else {
        KgCo2e::ZERO
    };
    Ok(upfront + total_rate(option, scenario) * t)
}

/// Samples [`cumulative_carbon`] at `samples` evenly spaced points on
/// `[0, horizon]`.
pub fn carbon_curve(
    option: &SystemOption,
    scenario: &DeploymentScenario,
    horizon: Years,
    samples: usize,
    include_upfront: bool,
) -> CarbonCurve {
    assert!(samples >= 2, "a curve needs at least two samples");
    let rate = total_rate(option, scenario).0;
    let upfront = if include_upfront {
        option.device.embodied_kgco2e.0
    } else {
        0.0
    };
    let last = (samples - 1) as f64;
    let points = (0..samples)
        .map(|k| {
            let t = horizon.0 * (k as f64 / last);
            CurvePoint {
                t_years: t,
                cumulative_kgco2e: upfront + rate * t,
            }
        })
        .collect();
    CarbonCurve {
        option_label: option.label.clone(),
        samples: points,
        includes_upfront: include_upfront,
    }
}

/// Duty cycle for `target` that delivers the same annual work as `base`
/// running `duty`. Sleep time is kept; only compute time within the awake
/// window is rescaled by the throughput ratio.
pub fn equal_work_adjust(
    base: &SystemOption,
    target: &SystemOption,
    duty: &DutyCycle,
) -> Result<DutyCycle, LifecycleError> {
    let (b, t) = (&base.device, &target.device);
    // throughput ratio in nanosecond units: (units_b / lat_b) / (units_t / lat_t)
    let ratio = (f64::from(b.parallel_units) * t.unit_work_latency_ns.0)
        / (f64::from(t.parallel_units) * b.unit_work_latency_ns.0);
    if ratio == 1.0 {
        return Ok(*duty);
    }
    let awake = duty.awake();
    let required = duty.fractions().active * ratio;
    if awake == 0.0 || required == 0.0 {
        return DutyCycle::new(duty.r_sleep(), 0.0).map_err(Into::into);
    }
    let r_active = required / awake;
    if r_active > 1.0 + 1e-12 {
        return Err(LifecycleError::InfeasibleDutyCycle {
            required_active_fraction: required,
            awake_fraction: awake,
        });
    }
    DutyCycle::new(duty.r_sleep(), r_active.min(1.0)).map_err(Into::into)
}

/// Checks whether two options deliver the same annual work under their
/// effective duty cycles.
pub fn work_ratio(opt0: &SystemOption, opt1: &SystemOption, scenario: &DeploymentScenario) -> f64 {
    annual_work(&opt1.device, &opt1.effective_duty(scenario))
        / annual_work(&opt0.device, &opt0.effective_duty(scenario))
}

/// Both options after comparison-mode adjustments, with the closed-form
/// result.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub option0: SystemOption,
    pub option1: SystemOption,
    pub result: LifecycleResult,
}

/// Applies the scenario's comparison mode and computes the full result.
///
/// In equal-work mode option 1's duty cycle is rescaled so it matches option
/// 0's annual work; option 0 keeps its own duty cycle.
pub fn evaluate(
    opt0: &SystemOption,
    opt1: &SystemOption,
    scenario: &DeploymentScenario,
) -> Result<Evaluation, LifecycleError> {
    scenario.validate()?;
    let option0 = opt0.clone();
    let mut option1 = opt1.clone();
    if scenario.comparison_mode == ComparisonMode::EqualWork {
        let base_duty = option0.effective_duty(scenario);
        option1.duty_override = Some(equal_work_adjust(&option0, &option1, &base_duty)?);
    }

    let o0 = operational_rate(&option0, scenario);
    let o1 = operational_rate(&option1, scenario);
    let e0 = option0.device.embodied_kgco2e;
    let e1 = option1.device.embodied_kgco2e;
    let rate0 = o0 + option0.device.amortized_embodied();
    let rate1 = o1 + option1.device.amortized_embodied();

    let t_i = indifference_from_rates(e0, e1, rate0, rate1);
    let t_b = breakeven_from_rates(e1, rate0, rate1);

    let mut diagnostics = Vec::new();
    if t_i.is_none() {
        diagnostics.push(format!(
            "no indifference point: {} never recoups its embodied carbon (total rate {} vs {})",
            option1.label, rate1, rate0
        ));
    } else if e1 < e0 && rate1 < rate0 {
        diagnostics.push(format!(
            "{} has lower embodied carbon and a lower total rate; it is preferable from t = 0",
            option1.label
        ));
    }

    Ok(Evaluation {
        result: LifecycleResult {
            t_indifference_years: t_i,
            t_breakeven_years: t_b,
            rate0_kg_per_year: rate0,
            rate1_kg_per_year: rate1,
            o0_kg_per_year: o0,
            o1_kg_per_year: o1,
            e0_kg: e0,
            e1_kg: e1,
            diagnostics,
        },
        option0,
        option1,
    })
}
