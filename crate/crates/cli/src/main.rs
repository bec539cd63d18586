mod args;
mod render;
mod svg;

use anyhow::{anyhow, bail, Context, Result};
use args::{AnalyzeArgs, Cli, Command, ComposeArgs, OutputFormat, PlotArgs, ScenarioArgs, ServeArgs, SweepArgs};
use clap::Parser;
use refresh_core::analysis::{analyze, linspace, AnalysisReport, ScenarioInput};
use refresh_core::composer::{compose, Composition, DieSlot};
use refresh_core::ingest::{bundled, fetch_grid_intensity, load_catalog, load_grid, Catalog, Provenance, ENDPOINT_ENV};
use refresh_core::lifecycle::{sweep, SweepParameter, SweepResult};
use refresh_core::model::{ComparisonMode, DeploymentScenario, GridProfile};
use refresh_core::units::{KgCo2e, Watts, Years};
use std::io::Write;
use std::process::ExitCode;

const EXIT_INPUT: u8 = 1;
const EXIT_NO_INDIFFERENCE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    if cli.format == OutputFormat::Svg && !matches!(cli.command, Command::Plot(_)) {
        bail!("--format svg is only valid for the plot command");
    }
    let catalog = || -> Result<Catalog> {
        match &cli.catalog {
            Some(path) => load_catalog(path).context("loading catalog"),
            None => Ok(bundled::catalog()),
        }
    };
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(&catalog()?, a, cli.format),
        Command::Sweep(a) => cmd_sweep(&catalog()?, a, cli.format),
        Command::Plot(a) => cmd_plot(&catalog()?, a, cli.format),
        Command::Compose(a) => cmd_compose(&catalog()?, a, cli.format),
        Command::LcaReference => {
            let c = catalog()?;
            emit(match cli.format {
                OutputFormat::Json => render::json(&c.lca_reference),
                OutputFormat::Csv => render::lca_csv(&c.lca_reference),
                _ => render::lca_human(&c.lca_reference),
            })?;
            Ok(0)
        }
        Command::Serve(a) => cmd_serve(catalog()?, a),
    }
}

fn emit(text: String) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn scenario_input(a: &ScenarioArgs) -> ScenarioInput {
    let d = ScenarioInput::default();
    ScenarioInput {
        grid_intensity_g_per_kwh: a.grid_intensity.unwrap_or(d.grid_intensity_g_per_kwh),
        renewable_fraction: a.renewables.unwrap_or(d.renewable_fraction),
        renewable_intensity_g_per_kwh: a.renewable_intensity.unwrap_or(d.renewable_intensity_g_per_kwh),
        duty: a.duty,
        r_sleep: a.r_sleep,
        r_active: a.r_active,
        comparison_mode: if a.equal_work {
            ComparisonMode::EqualWork
        } else {
            ComparisonMode::EqualTime
        },
        horizon_years: a.horizon.unwrap_or(d.horizon_years),
    }
}

/// Grid from the remote service or a file when one is given; `--renewables`
/// still overrides the renewable share.
fn external_grid(a: &ScenarioArgs) -> Result<Option<GridProfile>> {
    let grid = if let Some(region) = &a.region {
        let endpoint = match &a.grid_endpoint {
            Some(e) => e.clone(),
            None => std::env::var(ENDPOINT_ENV)
                .ok()
                .filter(|e| !e.trim().is_empty())
                .ok_or_else(|| anyhow!("--region needs --grid-endpoint or {ENDPOINT_ENV}"))?,
        };
        let fetched = fetch_grid_intensity(&endpoint, region, a.grid.as_deref())?;
        if fetched.provenance == Provenance::Fallback {
            eprintln!(
                "warning: grid fetch failed, using {}: {}",
                a.grid.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                fetched.detail.unwrap_or_default()
            );
        }
        fetched.profile
    } else if let Some(path) = &a.grid {
        load_grid(path)?
    } else {
        return Ok(None);
    };
    Ok(Some(match a.renewables {
        Some(r) => grid.with_renewable_fraction(r)?,
        None => grid,
    }))
}

fn build_scenario(a: &ScenarioArgs) -> Result<DeploymentScenario> {
    let input = scenario_input(a);
    let scenario = match external_grid(a)? {
        Some(grid) => input.to_scenario_with_grid(grid)?,
        None => input.to_scenario()?,
    };
    Ok(scenario)
}

fn run_analysis(catalog: &Catalog, a: &ScenarioArgs, curve_samples: Option<usize>) -> Result<AnalysisReport> {
    let opt0 = catalog.option_source(&a.opt0).context("option 0")?;
    let opt1 = catalog.option_source(&a.opt1).context("option 1")?;
    let scenario = build_scenario(a)?;
    Ok(analyze(&opt0, &opt1, &scenario, curve_samples)?)
}

fn cmd_analyze(catalog: &Catalog, a: &AnalyzeArgs, format: OutputFormat) -> Result<u8> {
    let report = run_analysis(catalog, &a.scenario, None)?;
    emit(match format {
        OutputFormat::Json => render::json(&report),
        OutputFormat::Csv => render::analysis_csv(&report),
        _ => render::analysis_human(&report),
    })?;
    Ok(if report.has_indifference_point() {
        0
    } else {
        EXIT_NO_INDIFFERENCE
    })
}

fn run_sweep(
    catalog: &Catalog,
    a: &ScenarioArgs,
    param: SweepParameter,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepResult> {
    let values = linspace(from, to, steps)?;
    let opt0 = catalog.option_source(&a.opt0).context("option 0")?;
    let opt1 = catalog.option_source(&a.opt1).context("option 1")?;
    let scenario = build_scenario(a)?;
    Ok(sweep(&opt0, &opt1, &scenario, param, &values)?)
}

fn cmd_sweep(catalog: &Catalog, a: &SweepArgs, format: OutputFormat) -> Result<u8> {
    let result = run_sweep(catalog, &a.scenario, a.param, a.range.from, a.range.to, a.range.steps)?;
    emit(match format {
        OutputFormat::Json => render::json(&result),
        OutputFormat::Csv => render::sweep_csv(&result),
        _ => render::sweep_human(&result),
    })?;
    Ok(0)
}

fn cmd_plot(catalog: &Catalog, a: &PlotArgs, format: OutputFormat) -> Result<u8> {
    if matches!(format, OutputFormat::Json | OutputFormat::Csv) {
        bail!("plot writes SVG; use --format svg or omit --format");
    }
    let svg = match a.param {
        Some(param) => {
            let (from, to) = (a.from.unwrap_or_default(), a.to.unwrap_or_default());
            svg::sweep_plot(&run_sweep(catalog, &a.scenario, param, from, to, a.steps)?)
        }
        None => svg::curves_plot(&run_analysis(catalog, &a.scenario, Some(a.samples))?),
    };
    match &a.output {
        Some(path) => std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?,
        None => emit(svg)?,
    }
    Ok(0)
}

/// Parses `zcu102x4,vc709x2`; a bare id means one die.
fn parse_dies(spec: &str) -> Result<Vec<(String, u32)>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(
            |item| match item.rsplit_once(['x', '×']).map(|(id, n)| (id, n.parse::<u32>())) {
                Some((id, Ok(n))) if !id.is_empty() => Ok((id.to_string(), n)),
                _ => Ok((item.to_string(), 1)),
            },
        )
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(anyhow!("--dies is empty"))
            } else {
                Ok(v)
            }
        })
}

fn cmd_compose(catalog: &Catalog, a: &ComposeArgs, format: OutputFormat) -> Result<u8> {
    let dies = parse_dies(&a.dies)?
        .into_iter()
        .map(|(id, count)| {
            let device = catalog.device(&id).with_context(|| format!("die '{id}'"))?.clone();
            Ok(DieSlot { device, count })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut interposer = catalog.interposer(&a.interposer).context("interposer")?.clone();
    if let Some(e) = a.efficiency {
        interposer.sdll_efficiency = e;
    }
    if let Some(e) = a.interposer_embodied {
        interposer.embodied_kgco2e = KgCo2e(e);
    }
    if let Some(w) = a.power_overhead {
        interposer.power_overhead_watts = Watts(w);
    }
    let composition = Composition {
        id: a.id.clone(),
        display_name: None,
        dies,
        interposer,
        residual_embodied_fraction: a.residual,
        lifetime_years: Years(a.lifetime),
        sdll_required: a.sdll_required,
    };
    let device = compose(&composition)?;
    emit(match format {
        OutputFormat::Json => render::json(&device),
        OutputFormat::Csv => render::device_csv(&device),
        _ => render::device_human(&device),
    })?;
    Ok(0)
}

fn cmd_serve(catalog: Catalog, a: &ServeArgs) -> Result<u8> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let app = refresh_api::router(catalog, a.cors_origin.as_deref()).map_err(|e| anyhow!(e))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let addr = format!("{}:{}", a.host, a.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        eprintln!("serving on http://{}", listener.local_addr()?);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        refresh_api::serve(listener, app, shutdown).await?;
        Ok(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn die_lists() {
        assert_eq!(parse_dies("zcu102x4").unwrap(), vec![("zcu102".to_string(), 4)]);
        assert_eq!(
            parse_dies("vc709x2, zcu102×2").unwrap(),
            vec![("vc709".to_string(), 2), ("zcu102".to_string(), 2)]
        );
        assert_eq!(parse_dies("xcvu9p").unwrap(), vec![("xcvu9p".to_string(), 1)]);
        assert!(parse_dies(" , ").is_err());
    }
}
