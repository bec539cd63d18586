//! Lifecycle-carbon analysis for FPGA systems: device and duty-cycle models,
//! chiplet composition, indifference and break-even times, sweeps, and the
//! catalog/grid file formats.

pub mod analysis;
pub mod composer;
pub mod ingest;
pub mod lifecycle;
pub mod model;
pub mod units;

pub use analysis::{analyze, AnalysisError, AnalysisReport, AnalyzeRequest, OptionRef, ScenarioInput, SweepRequest};
pub use composer::{compose, ComposeError, Composition, DieSlot, InterposerSpec};
pub use ingest::{Catalog, IngestError};
pub use lifecycle::{
    breakeven_time, evaluate, indifference_time, sweep, LifecycleError, LifecycleResult, OptionSource, SweepParameter,
    SweepResult,
};
pub use model::{
    ComparisonMode, DeploymentScenario, DeviceProfile, DutyCycle, GridProfile, PowerProfile, SystemOption,
    ValidationError,
};
pub use units::{GramsPerKwh, KgCo2e, KgCo2ePerYear, Nanoseconds, Watts, Years};
