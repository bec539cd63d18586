//! Device, duty-cycle and grid types, and the arithmetic that turns them into
//! annual operational carbon and annual delivered work.
//!
//! Power model: a device draws `p_static + p_dynamic` while computing,
//! `p_static` while awake but idle, and `p_sleep` while asleep. `r_active` is
//! measured against awake (non-sleep) time, so the fraction of wall-clock time
//! spent computing is `r_active * (1 - r_sleep)`.

use crate::units::{GramsPerKwh, KgCo2e, KgCo2ePerYear, Nanoseconds, Watts, Years, SECONDS_PER_YEAR};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A value failed a domain check. `field` is a dotted path to the offending
/// input, relative to whatever was being validated.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            f.write_str(&self.reason)
        } else {
            write!(f, "invalid {}: {}", self.field, self.reason)
        }
    }
}

impl std::error::Error for ValidationError {}

impl ValidationError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Re-roots the field path under `prefix`.
    pub fn under(mut self, prefix: &str) -> Self {
        if prefix.is_empty() {
            return self;
        }
        self.field = if self.field.is_empty() {
            prefix.to_string()
        } else {
            format!("{prefix}.{}", self.field)
        };
        self
    }
}

fn check_non_negative(field: &str, value: f64) -> Result<(), ValidationError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ValidationError::new(
            field,
            format!("must be a finite number >= 0, got {value}"),
        ));
    }
    Ok(())
}

fn check_positive(field: &str, value: f64) -> Result<(), ValidationError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ValidationError::new(
            field,
            format!("must be a finite number > 0, got {value}"),
        ));
    }
    Ok(())
}

/// A number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Fraction(f64);

impl Fraction {
    pub const ZERO: Fraction = Fraction(0.0);
    pub const ONE: Fraction = Fraction(1.0);

    pub fn new(value: f64) -> Result<Self, ValidationError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(ValidationError::new(
                "",
                format!("must be a fraction in [0, 1], got {value}"),
            ))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Fraction {
    type Error = ValidationError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Fraction::new(value)
    }
}

impl From<Fraction> for f64 {
    fn from(f: Fraction) -> f64 {
        f.0
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Per-state power draw of a device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub p_dynamic: Watts,
    pub p_static: Watts,
    #[serde(default)]
    pub p_sleep: Watts,
}

impl PowerProfile {
    pub fn new(p_dynamic: Watts, p_static: Watts, p_sleep: Watts) -> Result<Self, ValidationError> {
        let p = Self {
            p_dynamic,
            p_static,
            p_sleep,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        check_non_negative("p_dynamic", self.p_dynamic.0)?;
        check_non_negative("p_static", self.p_static.0)?;
        check_non_negative("p_sleep", self.p_sleep.0)?;
        if self.p_sleep > self.active() {
            return Err(ValidationError::new(
                "p_sleep",
                format!("sleep power {} exceeds active power {}", self.p_sleep, self.active()),
            ));
        }
        Ok(())
    }

    /// Power while computing.
    pub fn active(&self) -> Watts {
        self.p_static + self.p_dynamic
    }

    /// Power while awake and idle.
    pub fn idle(&self) -> Watts {
        self.p_static
    }
}

fn default_parallel_units() -> u32 {
    1
}

/// A deployable accelerator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub id: String,
    pub display_name: String,
    pub tech_node_nm: f64,
    /// Time to complete one unit of the benchmark kernel on one instance.
    pub unit_work_latency_ns: Nanoseconds,
    #[serde(default = "default_parallel_units")]
    pub parallel_units: u32,
    pub power: PowerProfile,
    pub embodied_kgco2e: KgCo2e,
    pub lifetime_years: Years,
    /// Set on fixture entries whose embodied/lifetime values are made up to
    /// reproduce a qualitative pattern rather than measured.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub synthetic_calibration: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl DeviceProfile {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.id.trim().is_empty() {
            return Err(ValidationError::new("id", "must not be empty"));
        }
        check_positive("tech_node_nm", self.tech_node_nm)?;
        check_positive("unit_work_latency_ns", self.unit_work_latency_ns.0)?;
        if self.parallel_units < 1 {
            return Err(ValidationError::new("parallel_units", "must be >= 1"));
        }
        self.power.validate().map_err(|e| e.under("power"))?;
        check_non_negative("embodied_kgco2e", self.embodied_kgco2e.0)?;
        check_positive("lifetime_years", self.lifetime_years.0)?;
        Ok(())
    }

    /// Completed work-units per second while computing.
    pub fn throughput_per_second(&self) -> f64 {
        f64::from(self.parallel_units) / self.unit_work_latency_ns.as_seconds()
    }

    /// Embodied carbon amortized over the lifetime.
    pub fn amortized_embodied(&self) -> KgCo2ePerYear {
        self.embodied_kgco2e / self.lifetime_years
    }
}

/// Fractions of wall-clock time spent in each power state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateFractions {
    pub active: f64,
    pub idle: f64,
    pub sleep: f64,
}

/// Partition of service time into sleep and (within awake time) compute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DutyCycle {
    r_sleep: Fraction,
    r_active: Fraction,
}

impl DutyCycle {
    /// Sleep 25%, active 25% of awake time.
    pub const CASE_1: DutyCycle = DutyCycle {
        r_sleep: Fraction(0.25),
        r_active: Fraction(0.25),
    };
    /// Sleep 50%, active 50% of awake time.
    pub const CASE_2: DutyCycle = DutyCycle {
        r_sleep: Fraction(0.5),
        r_active: Fraction(0.5),
    };
    /// Sleep 25%, active 75% of awake time.
    pub const CASE_3: DutyCycle = DutyCycle {
        r_sleep: Fraction(0.25),
        r_active: Fraction(0.75),
    };
    pub const ALWAYS_ACTIVE: DutyCycle = DutyCycle {
        r_sleep: Fraction(0.0),
        r_active: Fraction(1.0),
    };

    pub fn new(r_sleep: f64, r_active: f64) -> Result<Self, ValidationError> {
        Ok(Self {
            r_sleep: Fraction::new(r_sleep).map_err(|e| e.under("r_sleep"))?,
            r_active: Fraction::new(r_active).map_err(|e| e.under("r_active"))?,
        })
    }

    pub fn r_sleep(&self) -> f64 {
        self.r_sleep.get()
    }

    pub fn r_active(&self) -> f64 {
        self.r_active.get()
    }

    /// Fraction of wall-clock time the device is awake.
    pub fn awake(&self) -> f64 {
        1.0 - self.r_sleep.get()
    }

    pub fn fractions(&self) -> StateFractions {
        state_fractions(self)
    }
}

/// Splits service time into active, idle and sleep fractions.
///
/// Each part is taken as a remainder of the others so that
/// `active + idle + sleep` evaluates to exactly `1.0` in floating point. The
/// returned values can differ from the textbook products by one ulp.
pub fn state_fractions(duty: &DutyCycle) -> StateFractions {
    let awake = duty.awake();
    let idle = awake - duty.r_active() * awake;
    StateFractions {
        active: awake - idle,
        idle,
        sleep: 1.0 - awake,
    }
}

/// Electricity supply mix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridProfileRepr")]
pub struct GridProfile {
    base_intensity_g_per_kwh: GramsPerKwh,
    renewable_fraction: Fraction,
    renewable_intensity_g_per_kwh: GramsPerKwh,
}

#[derive(Deserialize)]
struct GridProfileRepr {
    base_intensity_g_per_kwh: f64,
    renewable_fraction: Fraction,
    #[serde(default)]
    renewable_intensity_g_per_kwh: f64,
}

impl TryFrom<GridProfileRepr> for GridProfile {
    type Error = ValidationError;

    fn try_from(r: GridProfileRepr) -> Result<Self, Self::Error> {
        GridProfile::new(
            r.base_intensity_g_per_kwh,
            r.renewable_fraction.get(),
            r.renewable_intensity_g_per_kwh,
        )
    }
}

impl GridProfile {
    pub fn new(base: f64, renewable_fraction: f64, renewable_intensity: f64) -> Result<Self, ValidationError> {
        check_non_negative("base_intensity_g_per_kwh", base)?;
        check_non_negative("renewable_intensity_g_per_kwh", renewable_intensity)?;
        Ok(Self {
            base_intensity_g_per_kwh: GramsPerKwh(base),
            renewable_fraction: Fraction::new(renewable_fraction).map_err(|e| e.under("renewable_fraction"))?,
            renewable_intensity_g_per_kwh: GramsPerKwh(renewable_intensity),
        })
    }

    pub fn base_intensity(&self) -> GramsPerKwh {
        self.base_intensity_g_per_kwh
    }

    pub fn renewable_fraction(&self) -> f64 {
        self.renewable_fraction.get()
    }

    pub fn renewable_intensity(&self) -> GramsPerKwh {
        self.renewable_intensity_g_per_kwh
    }

    pub fn with_renewable_fraction(&self, fraction: f64) -> Result<Self, ValidationError> {
        GridProfile::new(
            self.base_intensity_g_per_kwh.0,
            fraction,
            self.renewable_intensity_g_per_kwh.0,
        )
    }

    pub fn effective_intensity(&self) -> GramsPerKwh {
        effective_intensity(self)
    }
}

/// Supply-weighted carbon intensity: `(1 - r) * base + r * renewable`.
pub fn effective_intensity(grid: &GridProfile) -> GramsPerKwh {
    let r = grid.renewable_fraction();
    let base = grid.base_intensity_g_per_kwh.0;
    let renewable = grid.renewable_intensity_g_per_kwh.0;
    let mixed = (1.0 - r) * base + r * renewable;
    // rounding can step a hair outside the interval spanned by the two sources
    GramsPerKwh(mixed.clamp(base.min(renewable), base.max(renewable)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonMode {
    /// Both options run the same duty cycle.
    #[default]
    EqualTime,
    /// The second option's duty cycle is rescaled to deliver the same annual
    /// work as the first.
    EqualWork,
}

impl fmt::Display for ComparisonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonMode::EqualTime => "equal-time",
            ComparisonMode::EqualWork => "equal-work",
        })
    }
}

pub const DEFAULT_HORIZON_YEARS: f64 = 10.0;

/// Grid, duty cycle and comparison rules shared by both options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentScenario {
    pub grid: GridProfile,
    pub duty: DutyCycle,
    #[serde(default)]
    pub comparison_mode: ComparisonMode,
    #[serde(default = "default_horizon")]
    pub horizon_years: Years,
}

fn default_horizon() -> Years {
    Years(DEFAULT_HORIZON_YEARS)
}

impl DeploymentScenario {
    pub fn new(grid: GridProfile, duty: DutyCycle) -> Self {
        Self {
            grid,
            duty,
            comparison_mode: ComparisonMode::EqualTime,
            horizon_years: default_horizon(),
        }
    }

    pub fn with_mode(mut self, mode: ComparisonMode) -> Self {
        self.comparison_mode = mode;
        self
    }

    pub fn with_horizon(mut self, horizon: Years) -> Result<Self, ValidationError> {
        check_positive("horizon_years", horizon.0)?;
        self.horizon_years = horizon;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        check_positive("horizon_years", self.horizon_years.0)
    }
}

/// One side of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemOption {
    pub label: String,
    pub device: DeviceProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duty_override: Option<DutyCycle>,
}

impl SystemOption {
    pub fn new(device: DeviceProfile) -> Self {
        Self {
            label: device.id.clone(),
            device,
            duty_override: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn effective_duty(&self, scenario: &DeploymentScenario) -> DutyCycle {
        self.duty_override.unwrap_or(scenario.duty)
    }
}

/// Time-weighted mean power draw.
pub fn average_power(device: &DeviceProfile, duty: &DutyCycle) -> Watts {
    let f = duty.fractions();
    let p = &device.power;
    p.active() * f.active + p.idle() * f.idle + p.p_sleep * f.sleep
}

/// Operational emissions for one year under an explicit duty cycle and grid.
pub fn operational_carbon_rate(device: &DeviceProfile, duty: &DutyCycle, grid: &GridProfile) -> KgCo2ePerYear {
    let kwh = average_power(device, duty).annual_energy_kwh();
    KgCo2ePerYear(kwh * grid.effective_intensity().0 / 1000.0)
}

/// Operational emissions for one year of service under the scenario's duty
/// cycle and grid.
pub fn annual_operational_carbon(device: &DeviceProfile, scenario: &DeploymentScenario) -> KgCo2ePerYear {
    operational_carbon_rate(device, &scenario.duty, &scenario.grid)
}

/// Work-units completed in one year.
pub fn annual_work(device: &DeviceProfile, duty: &DutyCycle) -> f64 {
    duty.fractions().active * (SECONDS_PER_YEAR * device.throughput_per_second())
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    pub fn device(id: &str, latency_ns: f64, p_dynamic: f64, p_static: f64) -> DeviceProfile {
        DeviceProfile {
            id: id.to_string(),
            display_name: id.to_uppercase(),
            tech_node_nm: 16.0,
            unit_work_latency_ns: Nanoseconds(latency_ns),
            parallel_units: 1,
            power: PowerProfile::new(Watts(p_dynamic), Watts(p_static), Watts(0.0)).unwrap(),
            embodied_kgco2e: KgCo2e(25.0),
            lifetime_years: Years(2.0),
            synthetic_calibration: false,
            notes: None,
        }
    }

    pub fn zcu102() -> DeviceProfile {
        device("zcu102", 4.60, 21.410, 0.920)
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn state_fractions_examples() {
        let f = state_fractions(&DutyCycle::new(0.25, 0.25).unwrap());
        assert_eq!((f.active, f.idle, f.sleep), (0.1875, 0.5625, 0.25));

        let f = state_fractions(&DutyCycle::new(0.0, 1.0).unwrap());
        assert_eq!((f.active, f.idle, f.sleep), (1.0, 0.0, 0.0));

        let f = state_fractions(&DutyCycle::new(1.0, 0.5).unwrap());
        assert_eq!((f.active, f.idle, f.sleep), (0.0, 0.0, 1.0));

        let f = state_fractions(&DutyCycle::new(0.25, 0.75).unwrap());
        assert_eq!((f.active, f.idle, f.sleep), (0.5625, 0.1875, 0.25));
        assert_eq!(f.active, 3.0 * 0.1875);
    }

    #[test]
    fn duty_cycle_rejects_out_of_range() {
        let err = DutyCycle::new(1.5, 0.2).unwrap_err();
        assert_eq!(err.field, "r_sleep");
        assert!(DutyCycle::new(0.2, -0.1).is_err());
        assert!(DutyCycle::new(f64::NAN, 0.1).is_err());
        assert!(serde_json::from_str::<DutyCycle>(r#"{"r_sleep":0.2,"r_active":1.01}"#).is_err());
    }

    #[test]
    fn effective_intensity_examples() {
        let g = GridProfile::new(400.0, 0.9, 0.0).unwrap();
        assert_relative_eq!(effective_intensity(&g).0, 40.0, max_relative = 1e-12);
        let g = GridProfile::new(317.0, 0.0, 0.0).unwrap();
        assert_eq!(effective_intensity(&g).0, 317.0);
        let g = GridProfile::new(317.0, 1.0, 0.0).unwrap();
        assert_eq!(effective_intensity(&g).0, 0.0);
        let g = GridProfile::new(300.0, 0.5, 100.0).unwrap();
        assert_eq!(effective_intensity(&g).0, 200.0);
    }

    #[test]
    fn grid_defaults_renewable_intensity() {
        let g: GridProfile =
            serde_json::from_str(r#"{"base_intensity_g_per_kwh":400,"renewable_fraction":0.9}"#).unwrap();
        assert_eq!(g.renewable_intensity().0, 0.0);
        assert!(GridProfile::new(400.0, 1.5, 0.0).is_err());
        assert!(GridProfile::new(-1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn average_power_examples() {
        let z = zcu102();
        let p = average_power(&z, &DutyCycle::CASE_1);
        assert_relative_eq!(p.0, 0.1875 * 22.330 + 0.5625 * 0.920, max_relative = 1e-12);
        assert_relative_eq!(p.0, 4.704375, max_relative = 1e-12);
        assert_eq!(average_power(&z, &DutyCycle::ALWAYS_ACTIVE), z.power.active());
        assert_eq!(average_power(&z, &DutyCycle::new(1.0, 0.3).unwrap()).0, 0.0);
    }

    #[test]
    fn operational_carbon_examples() {
        // 10 W flat at 500 g/kWh
        let flat = device("flat", 1.0, 0.0, 10.0);
        let s = DeploymentScenario::new(GridProfile::new(500.0, 0.0, 0.0).unwrap(), DutyCycle::ALWAYS_ACTIVE);
        assert_relative_eq!(annual_operational_carbon(&flat, &s).0, 43.8, max_relative = 1e-12);

        let green = DeploymentScenario::new(GridProfile::new(500.0, 1.0, 0.0).unwrap(), DutyCycle::CASE_2);
        assert_eq!(annual_operational_carbon(&zcu102(), &green).0, 0.0);

        let s = DeploymentScenario::new(GridProfile::new(400.0, 0.9, 0.0).unwrap(), DutyCycle::CASE_1);
        let o = annual_operational_carbon(&zcu102(), &s).0;
        assert_relative_eq!(o, 0.004704375 * 8760.0 * 40.0 / 1000.0, max_relative = 1e-12);
        assert!((o - 1.6484).abs() < 1e-4);
    }

    #[test]
    fn annual_work_examples() {
        let z = zcu102();
        let w = annual_work(&z, &DutyCycle::ALWAYS_ACTIVE);
        assert_relative_eq!(w, 31_536_000.0 / 4.60e-9, max_relative = 1e-12);
        assert!((w - 6.856e15).abs() / 6.856e15 < 1e-4);
        assert_eq!(annual_work(&z, &DutyCycle::new(1.0, 0.9).unwrap()), 0.0);
        let ratio = annual_work(&z, &DutyCycle::CASE_3) / annual_work(&z, &DutyCycle::CASE_1);
        assert_relative_eq!(ratio, 3.0, max_relative = 4.0 * f64::EPSILON);
    }

    #[test]
    fn power_profile_invariants() {
        assert!(PowerProfile::new(Watts(1.0), Watts(1.0), Watts(2.0)).is_ok());
        let err = PowerProfile::new(Watts(1.0), Watts(1.0), Watts(2.5)).unwrap_err();
        assert_eq!(err.field, "p_sleep");
        assert!(PowerProfile::new(Watts(-1.0), Watts(1.0), Watts(0.0)).is_err());
    }

    #[test]
    fn device_validation_paths() {
        let mut d = zcu102();
        d.power.p_static = Watts(-0.5);
        assert_eq!(d.validate().unwrap_err().field, "power.p_static");
        let mut d = zcu102();
        d.lifetime_years = Years(0.0);
        assert_eq!(d.validate().unwrap_err().field, "lifetime_years");
        let mut d = zcu102();
        d.parallel_units = 0;
        assert!(d.validate().is_err());
    }

    fn duty() -> impl Strategy<Value = DutyCycle> {
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(s, a)| DutyCycle::new(s, a).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20_000))]
        #[test]
        fn fractions_partition_time(d in duty()) {
            let f = d.fractions();
            for part in [f.active, f.idle, f.sleep] {
                prop_assert!((0.0..=1.0).contains(&part));
            }
            prop_assert_eq!(f.active + f.idle + f.sleep, 1.0);
        }
    }

    proptest! {

        #[test]
        fn effective_intensity_bounded(base in 0.0..2000.0f64, r in 0.0..=1.0f64, ren in 0.0..2000.0f64) {
            let g = GridProfile::new(base, r, ren).unwrap();
            let e = g.effective_intensity().0;
            prop_assert!(e >= base.min(ren) && e <= base.max(ren));
        }

        #[test]
        fn average_power_monotone(d in duty(), dyn_w in 0.0..50.0f64, st in 0.0..20.0f64, bump in 0.0..10.0f64) {
            let base = device("x", 3.0, dyn_w, st);
            let p0 = average_power(&base, &d).0;
            let mut more_dyn = base.clone();
            more_dyn.power.p_dynamic = Watts(dyn_w + bump);
            let mut more_static = base.clone();
            more_static.power.p_static = Watts(st + bump);
            let mut more_sleep = base.clone();
            more_sleep.power.p_sleep = Watts(bump.min(dyn_w + st));
            prop_assert!(average_power(&more_dyn, &d).0 >= p0);
            prop_assert!(average_power(&more_static, &d).0 >= p0);
            prop_assert!(average_power(&more_sleep, &d).0 >= p0);
            // more compute time within the same awake budget
            let busier = DutyCycle::new(d.r_sleep(), (d.r_active() + 0.1).min(1.0)).unwrap();
            prop_assert!(average_power(&base, &busier).0 >= p0 - 1e-12);
            let lo = base.power.p_sleep.0.min(base.power.p_static.0);
            prop_assert!(p0 >= lo - 1e-12 && p0 <= base.power.active().0 + 1e-12);
        }

        #[test]
        fn operational_carbon_linear(d in duty(), base in 1.0..1000.0f64, k in 0.1..10.0f64) {
            let dev = zcu102();
            let s1 = DeploymentScenario::new(GridProfile::new(base, 0.0, 0.0).unwrap(), d);
            let s2 = DeploymentScenario::new(GridProfile::new(base * k, 0.0, 0.0).unwrap(), d);
            let o1 = annual_operational_carbon(&dev, &s1).0;
            let o2 = annual_operational_carbon(&dev, &s2).0;
            prop_assert!((o2 - k * o1).abs() <= 1e-9 * o2.abs().max(1e-12));

            let mut scaled = dev.clone();
            scaled.power.p_dynamic = dev.power.p_dynamic * k;
            scaled.power.p_static = dev.power.p_static * k;
            let o3 = annual_operational_carbon(&scaled, &s1).0;
            prop_assert!((o3 - k * o1).abs() <= 1e-9 * o3.abs().max(1e-12));
        }

        #[test]
        fn work_ratio_tracks_active_fraction(a in duty(), b in duty(), latency in 0.5..50.0f64, units in 1u32..16) {
            let mut dev = device("x", latency, 1.0, 1.0);
            dev.parallel_units = units;
            let (fa, fb) = (a.fractions().active, b.fractions().active);
            prop_assume!(fb > 1e-6);
            let ratio = annual_work(&dev, &a) / annual_work(&dev, &b);
            prop_assert!((ratio - fa / fb).abs() <= 1e-12 * (fa / fb).max(1.0));
        }

        #[test]
        fn intensity_interpolates_linearly(base in 0.0..2000.0f64, ren in 0.0..2000.0f64) {
            let at = |r| GridProfile::new(base, r, ren).unwrap().effective_intensity().0;
            prop_assert_eq!(at(0.0), base);
            prop_assert_eq!(at(1.0), ren);
            prop_assert!((at(0.5) - (base + ren) / 2.0).abs() <= 1e-9 * base.max(ren).max(1.0));
        }
    }
}
