//! Human, JSON and CSV renderings. Human output rounds to six significant
//! digits; JSON and CSV carry full precision.

use refresh_core::analysis::{AnalysisReport, ResolvedOption};
use refresh_core::ingest::LcaBreakdown;
use refresh_core::lifecycle::SweepResult;
use refresh_core::model::DeviceProfile;
use refresh_core::units::Years;
use serde::Serialize;
use std::fmt::Write;

/// `x` rounded to six significant digits, without trailing zeros.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn years(t: Option<Years>) -> String {
    match t {
        Some(t) => format!("{} years", sig6(t.0)),
        None => "none".to_string(),
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Full-precision float as JSON would print it; empty for `None`.
fn full(x: Option<f64>) -> String {
    x.map(|v| serde_json::to_string(&v).expect("finite"))
        .unwrap_or_default()
}

fn option_lines(out: &mut String, n: u8, o: &ResolvedOption) {
    let _ = writeln!(out, "option {n}            {} ({})", o.label, o.display_name);
    let _ = writeln!(
        out,
        "  duty             r_sleep {}, r_active {}",
        sig6(o.duty.r_sleep()),
        sig6(o.duty.r_active())
    );
    let _ = writeln!(out, "  average power    {} W", sig6(o.average_power_w.0));
    let _ = writeln!(out, "  annual work      {} units", sig6(o.annual_work_units));
    if o.synthetic_calibration {
        let _ = writeln!(out, "  (synthetic calibration values)");
    }
}

pub fn analysis_human(r: &AnalysisReport) -> String {
    let res = &r.result;
    let mut out = String::new();
    option_lines(&mut out, 0, &r.option0);
    option_lines(&mut out, 1, &r.option1);
    let _ = writeln!(out, "comparison mode     {}", r.comparison_mode);
    let _ = writeln!(
        out,
        "grid intensity      {} gCO2e/kWh (effective)",
        sig6(r.effective_intensity_g_per_kwh.0)
    );
    let _ = writeln!(
        out,
        "operational O0/O1   {} / {} kgCO2e/yr",
        sig6(res.o0_kg_per_year.0),
        sig6(res.o1_kg_per_year.0)
    );
    let _ = writeln!(
        out,
        "embodied E0/E1      {} / {} kgCO2e",
        sig6(res.e0_kg.0),
        sig6(res.e1_kg.0)
    );
    let _ = writeln!(
        out,
        "total rate 0/1      {} / {} kgCO2e/yr",
        sig6(res.rate0_kg_per_year.0),
        sig6(res.rate1_kg_per_year.0)
    );
    let _ = writeln!(out, "indifference t_I    {}", years(res.t_indifference_years));
    let _ = writeln!(out, "break-even t_B      {}", years(res.t_breakeven_years));
    for d in &res.diagnostics {
        let _ = writeln!(out, "note: {d}");
    }
    out
}

pub const ANALYSIS_CSV_HEADER: [&str; 10] = [
    "t_indifference_years",
    "t_breakeven_years",
    "rate0_kg_per_year",
    "rate1_kg_per_year",
    "o0_kg_per_year",
    "o1_kg_per_year",
    "e0_kg",
    "e1_kg",
    "effective_intensity_g_per_kwh",
    "comparison_mode",
];

pub fn analysis_csv(r: &AnalysisReport) -> String {
    let res = &r.result;
    let row = vec![
        full(res.t_indifference_years.map(|t| t.0)),
        full(res.t_breakeven_years.map(|t| t.0)),
        full(Some(res.rate0_kg_per_year.0)),
        full(Some(res.rate1_kg_per_year.0)),
        full(Some(res.o0_kg_per_year.0)),
        full(Some(res.o1_kg_per_year.0)),
        full(Some(res.e0_kg.0)),
        full(Some(res.e1_kg.0)),
        full(Some(r.effective_intensity_g_per_kwh.0)),
        r.comparison_mode.to_string(),
    ];
    csv_text(&ANALYSIS_CSV_HEADER, vec![row])
}

pub fn sweep_human(s: &SweepResult) -> String {
    let mut out = format!("{:<20}{:<20}{:<20}\n", s.parameter_name, "t_I (years)", "t_B (years)");
    for row in &s.rows {
        let cell = |t: Option<Years>| t.map(|t| sig6(t.0)).unwrap_or_else(|| "none".into());
        let _ = write!(
            out,
            "{:<20}{:<20}{:<20}",
            sig6(row.parameter_value),
            cell(row.t_indifference_years),
            cell(row.t_breakeven_years)
        );
        if let Some(e) = &row.error {
            let _ = write!(out, "error: {e}");
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(s: &SweepResult) -> String {
    let rows = s
        .rows
        .iter()
        .map(|r| {
            vec![
                full(Some(r.parameter_value)),
                full(r.t_indifference_years.map(|t| t.0)),
                full(r.t_breakeven_years.map(|t| t.0)),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_text(
        &[
            s.parameter_name.as_str(),
            "t_indifference_years",
            "t_breakeven_years",
            "error",
        ],
        rows,
    )
}

pub fn device_human(d: &DeviceProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "id                  {}", d.id);
    let _ = writeln!(out, "display name        {}", d.display_name);
    let _ = writeln!(out, "tech node           {} nm", sig6(d.tech_node_nm));
    let _ = writeln!(out, "latency             {} ns", sig6(d.unit_work_latency_ns.0));
    let _ = writeln!(out, "parallel units      {}", d.parallel_units);
    let _ = writeln!(out, "p_dynamic           {} W", sig6(d.power.p_dynamic.0));
    let _ = writeln!(out, "p_static            {} W", sig6(d.power.p_static.0));
    let _ = writeln!(out, "p_sleep             {} W", sig6(d.power.p_sleep.0));
    let _ = writeln!(out, "embodied            {} kgCO2e", sig6(d.embodied_kgco2e.0));
    let _ = writeln!(out, "lifetime            {} years", sig6(d.lifetime_years.0));
    if d.synthetic_calibration {
        let _ = writeln!(out, "(synthetic calibration values)");
    }
    out
}

pub fn device_csv(d: &DeviceProfile) -> String {
    let row = vec![
        d.id.clone(),
        d.display_name.clone(),
        full(Some(d.tech_node_nm)),
        full(Some(d.unit_work_latency_ns.0)),
        d.parallel_units.to_string(),
        full(Some(d.power.p_dynamic.0)),
        full(Some(d.power.p_static.0)),
        full(Some(d.power.p_sleep.0)),
        full(Some(d.embodied_kgco2e.0)),
        full(Some(d.lifetime_years.0)),
        d.synthetic_calibration.to_string(),
    ];
    csv_text(
        &[
            "id",
            "display_name",
            "tech_node_nm",
            "unit_work_latency_ns",
            "parallel_units",
            "p_dynamic",
            "p_static",
            "p_sleep",
            "embodied_kgco2e",
            "lifetime_years",
            "synthetic_calibration",
        ],
        vec![row],
    )
}

/// One `product, manufacturing, operational, supply chain, disposal` line
/// per row, percentages as stored.
pub fn lca_human(rows: &[LcaBreakdown]) -> String {
    let mut out = String::from("product, manufacturing %, operational %, supply chain %, disposal %\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}, {}, {}, {}, {}",
            r.product, r.manufacturing_pct, r.operational_pct, r.supply_chain_pct, r.disposal_pct
        );
    }
    out
}

pub fn lca_csv(rows: &[LcaBreakdown]) -> String {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.product.clone(),
                full(Some(r.manufacturing_pct)),
                full(Some(r.operational_pct)),
                full(Some(r.supply_chain_pct)),
                full(Some(r.disposal_pct)),
            ]
        })
        .collect();
    csv_text(
        &[
            "product",
            "manufacturing_pct",
            "operational_pct",
            "supply_chain_pct",
            "disposal_pct",
        ],
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.15), "1.15");
        assert_eq!(sig6(120.0 / 18.0), "6.66667");
        assert_eq!(sig6(1234567.0), "1234567");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1e-7), "1.00000e-7");
    }

    #[test]
    fn full_precision_matches_json() {
        let x = 0.1 + 0.2;
        assert_eq!(full(Some(x)), "0.30000000000000004");
        assert_eq!(full(None), "");
    }
}
