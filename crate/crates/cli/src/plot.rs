//! Static SVG learning-curve figures.

use std::fmt::Write as _;
use std::path::Path;

use sparse_afe::{ExperimentResult, Scenario};

use crate::error::CliError;
use crate::output::CurveTable;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// MSD in dB, one value per iteration.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub series: Vec<Series>,
    /// Iteration of an abrupt channel change, drawn as a dashed marker.
    pub change_at: Option<usize>,
}

impl Figure {
    pub fn from_result(result: &ExperimentResult) -> Self {
        let c = &result.config;
        let title = match c.scenario {
            Scenario::Stationary => format!(
                "MSD learning curves: {} taps, m = {}, {} dB SNR, {} trials",
                c.channel_length, c.sparsity_m, c.snr_db, c.trials
            ),
            Scenario::Tracking { change_at } => format!(
                "Tracking: {} taps, m = {}, channel change at k = {change_at}, {} trials",
                c.channel_length, c.sparsity_m, c.trials
            ),
        };
        let series = result
            .reports
            .iter()
            .filter_map(|r| {
                r.curve.as_ref().map(|curve| Series {
                    label: r.label.clone(),
                    values: curve.db(),
                })
            })
            .collect();
        let change_at = match c.scenario {
            Scenario::Tracking { change_at } => Some(change_at),
            Scenario::Stationary => None,
        };
        Self {
            title,
            series,
            change_at,
        }
    }

    pub fn from_table(table: &CurveTable, title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            series: table
                .labels
                .iter()
                .zip(&table.columns)
                .filter(|(_, values)| values.iter().any(|v| v.is_finite()))
                .map(|(label, values)| Series {
                    label: label.clone(),
                    values: values.clone(),
                })
                .collect(),
            change_at: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.series.iter().all(|s| s.values.is_empty())
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick step of 1, 2 or 5 × 10ⁿ giving roughly `target` intervals.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * base)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * base)
}

pub fn render_svg(figure: &Figure) -> Result<String, CliError> {
    if figure.is_empty() {
        return Err(CliError::Config("nothing to plot: result has no curves".into()));
    }
    let n = figure.series.iter().map(|s| s.values.len()).max().unwrap_or(0);
    let finite = figure
        .series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite());
    let (mut lo, mut hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return Err(CliError::Config("nothing to plot: no finite values".into()));
    }
    if hi - lo < 1e-9 {
        lo -= 1.0;
        hi += 1.0;
    }
    let y_step = tick_step(hi - lo, 8.0);
    let y_min = (lo / y_step).floor() * y_step;
    let y_max = (hi / y_step).ceil() * y_step;
    let x_max = (n.max(2) - 1) as f64;
    let x_step = tick_step(x_max, 8.0);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |k: f64| LEFT + k / x_max * plot_w;
    let sy = |v: f64| TOP + (y_max - v) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    // fmt::Write into a String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&figure.title)
    );

    let mut y = y_min;
    while y <= y_max + 1e-9 * y_step {
        let py = sy(y);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py + 4.0,
            y.round() as i64
        );
        y += y_step;
    }
    let mut x = 0.0;
    while x <= x_max + 1e-9 * x_step {
        let px = sx(x);
        let _ = writeln!(
            w,
            r##"<line x1="{px:.2}" y1="{TOP:.2}" x2="{px:.2}" y2="{:.2}" stroke="#eeeeee"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            x as u64
        );
        x += x_step;
    }
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">MSD (dB)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    if let Some(k) = figure.change_at {
        let px = sx(k as f64);
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{TOP:.2}" x2="{px:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
            TOP + plot_h
        );
    }

    for (i, s) in figure.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (k, v) in s.values.iter().enumerate() {
            if v.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", sx(k as f64), sy(*v));
            }
        }
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.trim_end()
        );
        let ly = TOP + 20.0 + 22.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

/// Renders the figure and writes it; nothing is written for an empty figure.
pub fn emit_plot(figure: &Figure, path: &Path) -> Result<(), CliError> {
    let svg = render_svg(figure)?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}
