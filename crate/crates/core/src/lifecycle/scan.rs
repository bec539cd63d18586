//! Grid-scan crossover finder, independent of the closed forms.
//!
//! Walks `C0(t) - C1(t)` on a uniform grid and linearly interpolates inside
//! the first interval where the sign changes. With continuous replacement the
//! curves are straight lines and the scan agrees with the closed forms to
//! rounding; with discrete replacement each option re-buys its full embodied
//! carbon at `t = L, 2L, ...`, which makes the curves step functions.

use super::{total_rate, LifecycleError};
use crate::model::{DeploymentScenario, SystemOption};
use crate::units::Years;

/// Which crossing to look for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossoverKind {
    /// Both options pay their upfront embodied carbon at `t = 0`.
    #[default]
    Indifference,
    /// Option 0's upfront is sunk.
    Breakeven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReplacementModel {
    /// `E / L` accrues every year.
    #[default]
    Continuous,
    /// Full `E` is paid again at each multiple of `L`.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub t_max: Years,
    pub dt: Years,
    pub kind: CrossoverKind,
    pub replacement: ReplacementModel,
}

impl ScanConfig {
    pub const DEFAULT_DT: f64 = 1e-4;

    pub fn new(t_max: f64, dt: f64) -> Self {
        Self {
            t_max: Years(t_max),
            dt: Years(dt),
            kind: CrossoverKind::Indifference,
            replacement: ReplacementModel::Continuous,
        }
    }

    /// Four times the longer lifetime at a step of 1e-4 years.
    pub fn default_for(opt0: &SystemOption, opt1: &SystemOption) -> Self {
        let longest = opt0.device.lifetime_years.0.max(opt1.device.lifetime_years.0);
        Self::new(4.0 * longest, Self::DEFAULT_DT)
    }

    pub fn with_kind(mut self, kind: CrossoverKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_replacement(mut self, replacement: ReplacementModel) -> Self {
        self.replacement = replacement;
        self
    }
}

struct Curve {
    upfront: f64,
    embodied: f64,
    lifetime: f64,
    operational: f64,
    total: f64,
}

impl Curve {
    fn new(option: &SystemOption, scenario: &DeploymentScenario, upfront: bool) -> Self {
        let embodied = option.device.embodied_kgco2e.0;
        let lifetime = option.device.lifetime_years.0;
        let total = total_rate(option, scenario).0;
        Self {
            upfront: if upfront { embodied } else { 0.0 },
            embodied,
            lifetime,
            operational: total - embodied / lifetime,
            total,
        }
    }

    fn at(&self, t: f64, model: ReplacementModel) -> f64 {
        match model {
            ReplacementModel::Continuous => self.upfront + self.total * t,
            ReplacementModel::Discrete => {
                let repurchases = (t / self.lifetime).floor();
                self.upfront + self.embodied * repurchases + self.operational * t
            }
        }
    }
}

/// First `t` in `[0, t_max]` where the two cumulative-carbon curves cross,
/// or `None` if they never do on that range.
pub fn crossover_scan(
    opt0: &SystemOption,
    opt1: &SystemOption,
    scenario: &DeploymentScenario,
    config: &ScanConfig,
) -> Result<Option<Years>, LifecycleError> {
    let (t_max, dt) = (config.t_max.0, config.dt.0);
    if !(t_max > 0.0 && dt > 0.0 && dt <= t_max && t_max.is_finite()) {
        return Err(LifecycleError::InvalidScanGrid { t_max, dt });
    }
    let c0 = Curve::new(opt0, scenario, config.kind == CrossoverKind::Indifference);
    let c1 = Curve::new(opt1, scenario, true);
    let model = config.replacement;
    let gap = |t: f64| c0.at(t, model) - c1.at(t, model);

    let mut prev_t = 0.0;
    let mut prev = gap(0.0);
    if prev == 0.0 {
        return Ok(Some(Years(0.0)));
    }
    let steps = (t_max / dt).ceil() as u64;
    for k in 1..=steps {
        let t = (k as f64 * dt).min(t_max);
        let g = gap(t);
        if g == 0.0 {
            return Ok(Some(Years(t)));
        }
        if (g > 0.0) != (prev > 0.0) {
            let crossing = prev_t + (t - prev_t) * prev / (prev - g);
            return Ok(Some(Years(crossing)));
        }
        prev_t = t;
        prev = g;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifecycle::{breakeven_time, indifference_time};
    use crate::model::testing::device;
    use crate::model::{DutyCycle, GridProfile};
    use crate::units::KgCo2e;

    fn flat(id: &str, o: f64, e: f64, l: f64) -> SystemOption {
        let mut d = device(id, 1.0, 0.0, o / 8.76);
        d.embodied_kgco2e = KgCo2e(e);
        d.lifetime_years = Years(l);
        SystemOption::new(d)
    }

    fn scenario() -> DeploymentScenario {
        DeploymentScenario::new(GridProfile::new(1000.0, 0.0, 0.0).unwrap(), DutyCycle::ALWAYS_ACTIVE)
    }

    #[test]
    fn reference_pair() {
        let s = scenario();
        let (o0, o1) = (flat("a", 50.0, 100.0, 10.0), flat("b", 20.0, 220.0, 10.0));
        let t = crossover_scan(&o0, &o1, &s, &ScanConfig::new(20.0, 1e-4))
            .unwrap()
            .unwrap();
        assert!((t.0 - 120.0 / 18.0).abs() <= 1e-4);
        let closed = indifference_time(&o0, &o1, &s).unwrap();
        assert!((t.0 - closed.0).abs() <= 1e-4);

        let cfg = ScanConfig::new(30.0, 1e-4).with_kind(CrossoverKind::Breakeven);
        let tb = crossover_scan(&o0, &o1, &s, &cfg).unwrap().unwrap();
        assert!((tb.0 - breakeven_time(&o0, &o1, &s).unwrap().0).abs() <= 1e-4);
    }

    #[test]
    fn identical_curves_cross_at_zero() {
        let s = scenario();
        let a = flat("a", 50.0, 100.0, 10.0);
        let t = crossover_scan(&a, &a, &s, &ScanConfig::new(10.0, 0.1)).unwrap();
        assert_eq!(t, Some(Years(0.0)));
    }

    #[test]
    fn no_crossover_in_range() {
        let s = scenario();
        let (o0, o1) = (flat("a", 50.0, 100.0, 10.0), flat("b", 20.0, 220.0, 10.0));
        assert_eq!(crossover_scan(&o0, &o1, &s, &ScanConfig::new(5.0, 1e-3)).unwrap(), None);
        let (o0, o1) = (flat("a", 10.0, 100.0, 10.0), flat("b", 20.0, 220.0, 10.0));
        assert_eq!(
            crossover_scan(&o0, &o1, &s, &ScanConfig::new(50.0, 1e-2)).unwrap(),
            None
        );
    }

    #[test]
    fn rejects_bad_grid() {
        let s = scenario();
        let a = flat("a", 50.0, 100.0, 10.0);
        assert!(crossover_scan(&a, &a, &s, &ScanConfig::new(0.0, 0.1)).is_err());
        assert!(crossover_scan(&a, &a, &s, &ScanConfig::new(1.0, 2.0)).is_err());
        assert!(crossover_scan(&a, &a, &s, &ScanConfig::new(1.0, -0.1)).is_err());
    }

    #[test]
    fn default_grid_covers_four_lifetimes() {
        let cfg = ScanConfig::default_for(&flat("a", 1.0, 1.0, 3.0), &flat("b", 1.0, 1.0, 7.0));
        assert_eq!(cfg.t_max, Years(28.0));
        assert_eq!(cfg.dt, Years(1e-4));
    }

    #[test]
    fn discrete_replacement_converges_to_continuous() {
        // The continuous model is the long-run average of the discrete one:
        // over a horizon of n lifetimes the two cumulative totals differ by at
        // most one embodied purchase, so their relative gap shrinks like 1/n.
        let s = scenario();
        let opt = flat("a", 5.0, 100.0, 2.0);
        let c = Curve::new(&opt, &s, true);
        let mut last_gap = f64::INFINITY;
        for horizon in [10.0, 100.0, 1000.0] {
            let cont = c.at(horizon - 1e-9, ReplacementModel::Continuous);
            let disc = c.at(horizon - 1e-9, ReplacementModel::Discrete);
            let rel = (cont - disc).abs() / cont;
            assert!(rel < last_gap);
            last_gap = rel;
        }
        assert!(last_gap < 2e-3);

        // before any replacement falls due, the discrete curves carry no
        // amortization at all
        let (o0, o1) = (flat("a", 50.0, 2.0, 100.0), flat("b", 20.0, 200.0, 100.0));
        let cfg = ScanConfig::new(50.0, 1e-3).with_replacement(ReplacementModel::Discrete);
        let disc = crossover_scan(&o0, &o1, &s, &cfg).unwrap().unwrap();
        assert!((disc.0 - 198.0 / 30.0).abs() < 1e-3, "{disc:?}");
    }
}
