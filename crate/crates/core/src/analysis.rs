//! Request and report types shared by the command line and the HTTP service,
//! so both front ends produce the same numbers from the same inputs.

use crate::ingest::{Catalog, CompositionRecord, IngestError};
use crate::lifecycle::{
    carbon_curve, evaluate, sweep, CarbonCurve, LifecycleError, LifecycleResult, OptionSource, SweepError,
    SweepParameter, SweepResult,
};
use crate::model::{
    annual_work, average_power, ComparisonMode, DeploymentScenario, DeviceProfile, DutyCycle, GridProfile,
    SystemOption, ValidationError, DEFAULT_HORIZON_YEARS,
};
use crate::units::{GramsPerKwh, KgCo2e, KgCo2ePerYear, Watts, Years};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_GRID_INTENSITY: f64 = 400.0;
pub const DEFAULT_CURVE_SAMPLES: usize = 200;
pub const CURVE_SAMPLES_RANGE: (usize, usize) = (2, 10_000);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DutyPreset {
    Case1,
    Case2,
    Case3,
}

impl DutyPreset {
    pub fn duty(self) -> DutyCycle {
        match self {
            DutyPreset::Case1 => DutyCycle::CASE_1,
            DutyPreset::Case2 => DutyCycle::CASE_2,
            DutyPreset::Case3 => DutyCycle::CASE_3,
        }
    }
}

impl FromStr for DutyPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "case1" => Ok(DutyPreset::Case1),
            "case2" => Ok(DutyPreset::Case2),
            "case3" => Ok(DutyPreset::Case3),
            other => Err(format!(
                "unknown duty preset '{other}' (expected case1, case2 or case3)"
            )),
        }
    }
}

impl fmt::Display for DutyPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DutyPreset::Case1 => "case1",
            DutyPreset::Case2 => "case2",
            DutyPreset::Case3 => "case3",
        })
    }
}

fn default_intensity() -> f64 {
    DEFAULT_GRID_INTENSITY
}

fn default_horizon() -> f64 {
    DEFAULT_HORIZON_YEARS
}

/// Flat, all-optional scenario description. `r_sleep` and `r_active`, when
/// given, override the corresponding part of the duty preset (case1 if
/// none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInput {
    #[serde(default = "default_intensity")]
    pub grid_intensity_g_per_kwh: f64,
    #[serde(default)]
    pub renewable_fraction: f64,
    #[serde(default)]
    pub renewable_intensity_g_per_kwh: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duty: Option<DutyPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_sleep: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_active: Option<f64>,
    #[serde(default)]
    pub comparison_mode: ComparisonMode,
    #[serde(default = "default_horizon")]
    pub horizon_years: f64,
}

impl Default for ScenarioInput {
    fn default() -> Self {
        Self {
            grid_intensity_g_per_kwh: DEFAULT_GRID_INTENSITY,
            renewable_fraction: 0.0,
            renewable_intensity_g_per_kwh: 0.0,
            duty: None,
            r_sleep: None,
            r_active: None,
            comparison_mode: ComparisonMode::EqualTime,
            horizon_years: DEFAULT_HORIZON_YEARS,
        }
    }
}

impl ScenarioInput {
    pub fn duty_cycle(&self) -> Result<DutyCycle, ValidationError> {
        let preset = self.duty.unwrap_or(DutyPreset::Case1).duty();
        DutyCycle::new(
            self.r_sleep.unwrap_or(preset.r_sleep()),
            self.r_active.unwrap_or(preset.r_active()),
        )
    }

    pub fn grid(&self) -> Result<GridProfile, ValidationError> {
        GridProfile::new(
            self.grid_intensity_g_per_kwh,
            self.renewable_fraction,
            self.renewable_intensity_g_per_kwh,
        )
    }

    /// Builds the scenario with an externally supplied grid, e.g. one read
    /// from a file or fetched remotely.
    pub fn to_scenario_with_grid(&self, grid: GridProfile) -> Result<DeploymentScenario, ValidationError> {
        DeploymentScenario::new(grid, self.duty_cycle()?)
            .with_mode(self.comparison_mode)
            .with_horizon(Years(self.horizon_years))
    }

    pub fn to_scenario(&self) -> Result<DeploymentScenario, ValidationError> {
        self.to_scenario_with_grid(self.grid()?)
    }
}

/// An option given by catalog id, inline composition or inline device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OptionRef {
    Id(String),
    Composition { composition: CompositionRecord },
    Device { device: DeviceProfile },
}

impl OptionRef {
    pub fn resolve(&self, catalog: &Catalog) -> Result<OptionSource, IngestError> {
        match self {
            OptionRef::Id(id) => catalog.option_source(id),
            OptionRef::Composition { composition } => catalog.resolve_record(composition).map(OptionSource::Composed),
            OptionRef::Device { device } => Ok(OptionSource::Device(device.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeRequest {
    pub option0: OptionRef,
    pub option1: OptionRef,
    #[serde(default)]
    pub scenario: ScenarioInput,
    #[serde(default)]
    pub include_curves: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub option0: OptionRef,
    pub option1: OptionRef,
    #[serde(default)]
    pub scenario: ScenarioInput,
    pub parameter: SweepParameter,
    #[serde(default)]
    pub values: Vec<f64>,
}

/// Either side of a comparison as actually evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedOption {
    pub label: String,
    pub display_name: String,
    pub unit_work_latency_ns: f64,
    pub parallel_units: u32,
    pub p_dynamic_w: Watts,
    pub p_static_w: Watts,
    pub p_sleep_w: Watts,
    pub average_power_w: Watts,
    pub embodied_kgco2e: KgCo2e,
    pub lifetime_years: Years,
    /// Duty cycle after any equal-work adjustment.
    pub duty: DutyCycle,
    pub annual_work_units: f64,
    pub synthetic_calibration: bool,
}

impl ResolvedOption {
    fn new(option: &SystemOption, scenario: &DeploymentScenario) -> Self {
        let d = &option.device;
        let duty = option.effective_duty(scenario);
        Self {
            label: option.label.clone(),
            display_name: d.display_name.clone(),
            unit_work_latency_ns: d.unit_work_latency_ns.0,
            parallel_units: d.parallel_units,
            p_dynamic_w: d.power.p_dynamic,
            p_static_w: d.power.p_static,
            p_sleep_w: d.power.p_sleep,
            average_power_w: average_power(d, &duty),
            embodied_kgco2e: d.embodied_kgco2e,
            lifetime_years: d.lifetime_years,
            duty,
            annual_work_units: annual_work(d, &duty),
            synthetic_calibration: d.synthetic_calibration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(flatten)]
    pub result: LifecycleResult,
    pub comparison_mode: ComparisonMode,
    pub effective_intensity_g_per_kwh: GramsPerKwh,
    pub horizon_years: Years,
    pub option0: ResolvedOption,
    pub option1: ResolvedOption,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<CarbonCurve>>,
}

impl AnalysisReport {
    pub fn has_indifference_point(&self) -> bool {
        self.result.t_indifference_years.is_some()
    }

    pub fn rate_gap(&self) -> KgCo2ePerYear {
        self.result.rate0_kg_per_year - self.result.rate1_kg_per_year
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Lifecycle(#[from] LifecycleError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

impl From<crate::composer::ComposeError> for AnalysisError {
    fn from(e: crate::composer::ComposeError) -> Self {
        AnalysisError::Lifecycle(e.into())
    }
}

pub fn check_curve_samples(samples: usize) -> Result<usize, ValidationError> {
    let (lo, hi) = CURVE_SAMPLES_RANGE;
    if (lo..=hi).contains(&samples) {
        Ok(samples)
    } else {
        Err(ValidationError::new(
            "curve_samples",
            format!("must be in [{lo}, {hi}], got {samples}"),
        ))
    }
}

/// Horizon used for curves: the scenario horizon, stretched so that an
/// indifference point beyond it stays visible.
pub fn curve_horizon(scenario: &DeploymentScenario, t_indifference: Option<Years>) -> Years {
    match t_indifference {
        Some(t) if t.0 * 1.25 > scenario.horizon_years.0 => Years(t.0 * 1.25),
        _ => scenario.horizon_years,
    }
}

/// Evaluates two options under a scenario, optionally sampling both
/// cumulative-carbon curves.
pub fn analyze(
    opt0: &OptionSource,
    opt1: &OptionSource,
    scenario: &DeploymentScenario,
    curve_samples: Option<usize>,
) -> Result<AnalysisReport, AnalysisError> {
    if let Some(n) = curve_samples {
        check_curve_samples(n)?;
    }
    let o0 = opt0.to_option()?;
    let o1 = opt1.to_option()?;
    let ev = evaluate(&o0, &o1, scenario)?;
    let curves = curve_samples.map(|n| {
        let horizon = curve_horizon(scenario, ev.result.t_indifference_years);
        vec![
            carbon_curve(&ev.option0, scenario, horizon, n, true),
            carbon_curve(&ev.option1, scenario, horizon, n, true),
        ]
    });
    Ok(AnalysisReport {
        comparison_mode: scenario.comparison_mode,
        effective_intensity_g_per_kwh: scenario.grid.effective_intensity(),
        horizon_years: scenario.horizon_years,
        option0: ResolvedOption::new(&ev.option0, scenario),
        option1: ResolvedOption::new(&ev.option1, scenario),
        result: ev.result,
        curves,
    })
}

pub fn analyze_request(catalog: &Catalog, req: &AnalyzeRequest) -> Result<AnalysisReport, AnalysisError> {
    let opt0 = req.option0.resolve(catalog)?;
    let opt1 = req.option1.resolve(catalog)?;
    let scenario = req.scenario.to_scenario()?;
    let samples = req
        .include_curves
        .then(|| req.curve_samples.unwrap_or(DEFAULT_CURVE_SAMPLES));
    if let (false, Some(n)) = (req.include_curves, req.curve_samples) {
        check_curve_samples(n)?;
    }
    analyze(&opt0, &opt1, &scenario, samples)
}

pub fn sweep_request(catalog: &Catalog, req: &SweepRequest) -> Result<SweepResult, AnalysisError> {
    let opt0 = req.option0.resolve(catalog)?;
    let opt1 = req.option1.resolve(catalog)?;
    let scenario = req.scenario.to_scenario()?;
    Ok(sweep(&opt0, &opt1, &scenario, req.parameter, &req.values)?)
}

/// `steps` evenly spaced values from `from` to `to` inclusive; a single step
/// yields just `from`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, ValidationError> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(ValidationError::new(
            "range",
            format!("need from < to, got {from} .. {to}"),
        ));
    }
    if steps == 0 {
        return Err(ValidationError::new("steps", "must be >= 1"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                from + (to - from) * (i as f64 / last)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::bundled;

    fn request(json: &str) -> AnalyzeRequest {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn scenario_defaults_and_overrides() {
        let s: ScenarioInput = serde_json::from_str("{}").unwrap();
        assert_eq!(s, ScenarioInput::default());
        let sc = s.to_scenario().unwrap();
        assert_eq!(sc.duty, DutyCycle::CASE_1);
        assert_eq!(sc.grid.base_intensity().0, 400.0);
        assert_eq!(sc.horizon_years, Years(10.0));

        let s: ScenarioInput = serde_json::from_str(r#"{"duty": "case3", "r_sleep": 0.1}"#).unwrap();
        let d = s.duty_cycle().unwrap();
        assert_eq!((d.r_sleep(), d.r_active()), (0.1, 0.75));

        let bad: ScenarioInput = serde_json::from_str(r#"{"renewable_fraction": 1.5}"#).unwrap();
        assert_eq!(bad.to_scenario().unwrap_err().field, "renewable_fraction");
        assert!(serde_json::from_str::<ScenarioInput>(r#"{"renewables": 0.5}"#).is_err());
    }

    #[test]
    fn option_refs() {
        let c = bundled::catalog();
        let r = request(
            r#"{"option0": "zcu102",
                "option1": {"composition": {"dies": [{"device": "zcu102", "count": 4}], "interposer": "ideal", "lifetime_years": 2}}}"#,
        );
        assert!(matches!(r.option0.resolve(&c), Ok(OptionSource::Device(_))));
        let OptionSource::Composed(comp) = r.option1.resolve(&c).unwrap() else {
            panic!()
        };
        assert_eq!(comp.total_dies(), 4);
        assert!(matches!(
            OptionRef::Id("nope".into()).resolve(&c),
            Err(IngestError::UnknownId(_))
        ));
    }

    #[test]
    fn same_option_gives_zero() {
        let c = bundled::catalog();
        let rep = analyze_request(&c, &request(r#"{"option0": "vc709", "option1": "vc709"}"#)).unwrap();
        assert_eq!(rep.result.t_indifference_years, Some(Years(0.0)));
        assert!(rep.curves.is_none());
    }

    #[test]
    fn curves_have_requested_length() {
        let c = bundled::catalog();
        let rep = analyze_request(
            &c,
            &request(
                r#"{"option0": "refresh_4x_zcu102", "option1": "vm1802", "include_curves": true, "curve_samples": 7}"#,
            ),
        )
        .unwrap();
        let curves = rep.curves.unwrap();
        assert_eq!(curves.len(), 2);
        assert!(curves.iter().all(|k| k.samples.len() == 7));

        let rep = analyze_request(
            &c,
            &request(r#"{"option0": "refresh_4x_zcu102", "option1": "vm1802", "include_curves": true}"#),
        )
        .unwrap();
        assert!(rep
            .curves
            .unwrap()
            .iter()
            .all(|k| k.samples.len() == DEFAULT_CURVE_SAMPLES));

        for n in [0, 1, 10_001] {
            let req = AnalyzeRequest {
                curve_samples: Some(n),
                include_curves: true,
                ..request(r#"{"option0": "vc709", "option1": "vc709"}"#)
            };
            match analyze_request(&c, &req) {
                Err(AnalysisError::Invalid(e)) => assert_eq!(e.field, "curve_samples"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn curve_horizon_covers_crossover() {
        let s = ScenarioInput::default().to_scenario().unwrap();
        assert_eq!(curve_horizon(&s, Some(Years(2.0))), Years(10.0));
        assert_eq!(curve_horizon(&s, Some(Years(40.0))), Years(50.0));
        assert_eq!(curve_horizon(&s, None), Years(10.0));
    }

    #[test]
    fn equal_work_echoes_adjusted_duty() {
        let c = bundled::catalog();
        let rep = analyze_request(
            &c,
            &request(r#"{"option0": "zcu102", "option1": "vc709", "scenario": {"comparison_mode": "equal-work"}}"#),
        )
        .unwrap();
        assert_eq!(rep.option0.duty, DutyCycle::CASE_1);
        assert!(rep.option1.duty.r_active() > 0.25);
        let rel = (rep.option1.annual_work_units - rep.option0.annual_work_units).abs() / rep.option0.annual_work_units;
        assert!(rel < 1e-12);
    }

    #[test]
    fn report_json_shape() {
        let c = bundled::catalog();
        let rep = analyze_request(&c, &request(r#"{"option0": "refresh_4x_zcu102", "option1": "vm1802"}"#)).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        for key in [
            "t_indifference_years",
            "t_breakeven_years",
            "rate0_kg_per_year",
            "e1_kg",
            "option1",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: AnalysisReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn sweep_requests() {
        let c = bundled::catalog();
        let req: SweepRequest = serde_json::from_str(
            r#"{"option0": "refresh_4x_zcu102", "option1": "vm1802", "parameter": "renewable_fraction", "values": [0, 0.5, 0.9]}"#,
        )
        .unwrap();
        let res = sweep_request(&c, &req).unwrap();
        assert_eq!(res.rows.len(), 3);
    }

    #[test]
    fn linspace_contract() {
        assert_eq!(linspace(0.0, 0.9, 1).unwrap(), vec![0.0]);
        let v = linspace(0.0, 0.9, 10).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!((v[0], v[9]), (0.0, 0.9));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(linspace(0.9, 0.0, 10).is_err());
        assert!(linspace(0.0, 0.9, 0).is_err());
    }

    #[test]
    fn presets_parse() {
        for p in [DutyPreset::Case1, DutyPreset::Case2, DutyPreset::Case3] {
            assert_eq!(p.to_string().parse::<DutyPreset>().unwrap(), p);
        }
        assert!("case4".parse::<DutyPreset>().is_err());
    }
}
