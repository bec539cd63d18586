use clap::{Args, Parser, Subcommand, ValueEnum};
use refresh_core::analysis::DutyPreset;
use refresh_core::lifecycle::SweepParameter;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "refresh",
    version,
    about = "Lifecycle-carbon analysis for refreshed and composed FPGA systems"
)]
pub struct Cli {
    /// Catalog file to use instead of the bundled one.
    #[arg(long, global = true, env = "REFRESH_CATALOG")]
    pub catalog: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
    /// Only for `plot`.
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Indifference and break-even time between two options.
    Analyze(AnalyzeArgs),
    /// Indifference time across a range of one scenario parameter.
    Sweep(SweepArgs),
    /// Write an SVG of the carbon curves, or of a sweep with --param.
    Plot(PlotArgs),
    /// Compose dies on an interposer and report the resulting profile.
    Compose(ComposeArgs),
    /// Print the bundled lifecycle-phase breakdowns of reference products.
    LcaReference,
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Option 0: catalog device or composition id (the incumbent).
    #[arg(long)]
    pub opt0: String,
    /// Option 1: catalog device or composition id (the candidate).
    #[arg(long)]
    pub opt1: String,

    #[arg(long, value_parser = clap::value_parser!(DutyPreset))]
    pub duty: Option<DutyPreset>,
    /// Fraction of time asleep; overrides the preset's value.
    #[arg(long)]
    pub r_sleep: Option<f64>,
    /// Fraction of awake time spent computing; overrides the preset's value.
    #[arg(long)]
    pub r_active: Option<f64>,

    /// Renewable share of the grid mix, in [0, 1].
    #[arg(long)]
    pub renewables: Option<f64>,
    /// Base grid intensity in gCO2e/kWh.
    #[arg(long, conflicts_with_all = ["grid", "grid_endpoint", "region"])]
    pub grid_intensity: Option<f64>,
    /// Intensity of the renewable share in gCO2e/kWh.
    #[arg(long, conflicts_with_all = ["grid", "grid_endpoint", "region"])]
    pub renewable_intensity: Option<f64>,
    /// Grid profile file; also the fallback when a remote fetch fails.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Grid-intensity service to query. Defaults to $REFRESH_GRID_ENDPOINT
    /// when --region is given.
    #[arg(long, requires = "region")]
    pub grid_endpoint: Option<String>,
    /// Region to fetch from the grid-intensity service.
    #[arg(long)]
    pub region: Option<String>,

    /// Rescale option 1's duty cycle to deliver option 0's annual work.
    #[arg(long)]
    pub equal_work: bool,
    /// Analysis horizon in years.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    /// Number of evenly spaced values, endpoints included.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(SweepParameter))]
    pub param: SweepParameter,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Plot t_I against this parameter instead of the carbon curves.
    #[arg(long, value_parser = clap::value_parser!(SweepParameter), requires_all = ["from", "to"])]
    pub param: Option<SweepParameter>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Points per carbon curve.
    #[arg(long, default_value_t = refresh_core::analysis::DEFAULT_CURVE_SAMPLES)]
    pub samples: usize,
    /// Output file; stdout if omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    /// Comma-separated `<device>x<count>` list, e.g. `zcu102x4,vc709x2`.
    #[arg(long, required = true)]
    pub dies: String,
    #[arg(long, default_value = "ideal")]
    pub interposer: String,
    /// Override the interposer's throughput derating.
    #[arg(long)]
    pub efficiency: Option<f64>,
    /// Override the interposer's embodied carbon (kgCO2e).
    #[arg(long)]
    pub interposer_embodied: Option<f64>,
    /// Override the interposer's static power overhead (W).
    #[arg(long)]
    pub power_overhead: Option<f64>,
    /// Share of the dies' embodied carbon charged to the composition.
    #[arg(long, default_value_t = 0.0)]
    pub residual: f64,
    #[arg(long, default_value_t = 6.0)]
    pub lifetime: f64,
    #[arg(long)]
    pub sdll_required: Option<u32>,
    #[arg(long)]
    pub id: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Origin allowed to make cross-origin requests, e.g. the dashboard's.
    #[arg(long)]
    pub cors_origin: Option<String>,
}
