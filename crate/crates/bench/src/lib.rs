//! Shared inputs for the criterion benches.

use refresh_core::ingest::{bundled, Catalog};
use refresh_core::lifecycle::OptionSource;
use refresh_core::model::{DeploymentScenario, DutyCycle, SystemOption};

/// The composed-versus-new pair from the bundled catalog.
pub fn calibration_sources(catalog: &Catalog) -> (OptionSource, OptionSource) {
    (
        catalog.option_source("refresh_4x_zcu102").expect("bundled id"),
        catalog.option_source("vm1802").expect("bundled id"),
    )
}

pub fn calibration_options() -> (SystemOption, SystemOption) {
    let (a, b) = calibration_sources(&bundled::catalog());
    (a.to_option().expect("valid"), b.to_option().expect("valid"))
}

/// Bundled baseline grid at the given renewable share, case 1 duty.
pub fn scenario(renewables: f64) -> DeploymentScenario {
    let grid = bundled::grid("grid_baseline")
        .expect("bundled grid")
        .with_renewable_fraction(renewables)
        .expect("fraction in [0, 1]");
    DeploymentScenario::new(grid, DutyCycle::CASE_1)
}
