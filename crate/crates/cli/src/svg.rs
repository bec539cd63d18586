//! Deterministic, dependency-free SVG plots.

use refresh_core::analysis::AnalysisReport;
use refresh_core::lifecycle::SweepResult;
use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 2] = ["#d95f02", "#1b9e77"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
        let y1 = if y1 > y0 { y1 } else { y0 + 1.0 };
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }

    fn open(&self, title: &str, x_label: &str, y_label: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let (bx, by) = (LEFT, HEIGHT - BOTTOM);
        let _ = writeln!(s, r#"<g class="axes" stroke="black">"#);
        let _ = writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{}" y2="{by}"/>"#, WIDTH - RIGHT);
        let _ = writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{bx}" y2="{TOP}"/>"#);
        for k in 0..=5 {
            let f = k as f64 / 5.0;
            let (xv, yv) = (self.x0 + f * (self.x1 - self.x0), self.y0 + f * (self.y1 - self.y0));
            let (x, y) = (self.px(xv), self.py(yv));
            let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{by}" x2="{x:.2}" y2="{}"/>"#, by + 5.0);
            let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{bx}" y2="{y:.2}"/>"#, bx - 5.0);
        }
        s.push_str("</g>\n");
        for k in 0..=5 {
            let f = k as f64 / 5.0;
            let (xv, yv) = (self.x0 + f * (self.x1 - self.x0), self.y0 + f * (self.y1 - self.y0));
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                self.px(xv),
                by + 18.0,
                tick_label(xv)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                bx - 8.0,
                self.py(yv) + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            HEIGHT - 15.0,
            escape(x_label)
        );
        let ymid = (TOP + HEIGHT - BOTTOM) / 2.0;
        let _ = writeln!(
            s,
            r#"<text class="y-label" x="20" y="{ymid}" text-anchor="middle" transform="rotate(-90 20 {ymid})">{}</text>"#,
            escape(y_label)
        );
        s
    }

    fn polyline(&self, points: &[(f64, f64)], color: &str) -> String {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            coords.join(" ")
        )
    }
}

fn note(s: &mut String, text: &str) {
    let _ = writeln!(
        s,
        r#"<text class="annotation" x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        TOP + 24.0,
        escape(text)
    );
}

/// Cumulative-carbon curves of both options, with a marker at the
/// indifference point when there is one. The report must carry curves.
pub fn curves_plot(report: &AnalysisReport) -> String {
    let curves = report.curves.as_ref().expect("report built with curves");
    let x_max = curves
        .iter()
        .flat_map(|c| c.samples.last())
        .map(|p| p.t_years)
        .fold(0.0, f64::max);
    let y_max = curves
        .iter()
        .flat_map(|c| c.samples.iter())
        .map(|p| p.cumulative_kgco2e)
        .fold(0.0, f64::max);
    let frame = Frame::new(0.0, x_max, 0.0, y_max * 1.05);
    let mut s = frame.open(
        "Cumulative lifecycle carbon",
        "time (years)",
        "cumulative carbon (kgCO2e)",
    );
    for (i, c) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = c.samples.iter().map(|p| (p.t_years, p.cumulative_kgco2e)).collect();
        s.push_str(&frame.polyline(&pts, COLORS[i]));
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT - 200.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#,
            lx + 20.0,
            COLORS[i]
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">option {i}: {}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&c.option_label)
        );
    }
    match report.result.t_indifference_years {
        Some(t) => {
            let y = report.result.e0_kg.0 + report.result.rate0_kg_per_year.0 * t.0;
            let _ = writeln!(
                s,
                r#"<circle class="crossover" cx="{:.2}" cy="{:.2}" r="5" fill="black"/>"#,
                frame.px(t.0),
                frame.py(y)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">t_I = {} years</text>"#,
                frame.px(t.0) + 8.0,
                frame.py(y) + 16.0,
                tick_label(t.0)
            );
        }
        None => note(&mut s, "no indifference point"),
    }
    s.push_str("</svg>\n");
    s
}

/// Indifference time against the swept parameter. Rows without an
/// indifference point are left out of the line.
pub fn sweep_plot(result: &SweepResult) -> String {
    let pts: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| r.t_indifference_years.map(|t| (r.parameter_value, t.0)))
        .collect();
    let x0 = result.rows.first().map_or(0.0, |r| r.parameter_value);
    let x1 = result.rows.last().map_or(1.0, |r| r.parameter_value);
    let y_max = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    let frame = Frame::new(x0, x1, 0.0, y_max * 1.05);
    let mut s = frame.open(
        &format!("Indifference time vs {}", result.parameter_name),
        &result.parameter_name,
        "indifference time (years)",
    );
    if pts.is_empty() {
        note(&mut s, "no indifference point in range");
    } else {
        s.push_str(&frame.polyline(&pts, COLORS[1]));
    }
    s.push_str("</svg>\n");
    s
}
