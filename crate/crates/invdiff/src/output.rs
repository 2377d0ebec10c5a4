//! CSV tables and SVG line charts.
//!
//! Numbers are written with 17 significant digits so that a CSV round trip
//! reproduces every `f64` exactly; both formats are byte-deterministic.

use std::fmt::Write as _;
use std::path::Path;

use invdiff_core::discretization::SampledField;

use crate::error::{CliError, Result};

/// `v` with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(path, e),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Columns `x, <name>...` for fields on one grid.
pub fn write_fields_csv(path: &Path, fields: &[(&str, &SampledField)]) -> Result<()> {
    let grid = *fields.first().ok_or_else(|| CliError::Config("no fields to write".into()))?.1.grid();
    for (name, f) in fields {
        if *f.grid() != grid {
            return Err(CliError::Config(format!("field '{name}' lives on a different grid")));
        }
    }
    let mut header = vec!["x"];
    header.extend(fields.iter().map(|(n, _)| *n));
    let rows: Vec<Vec<String>> = (0..grid.n_nodes())
        .map(|i| {
            let mut r = vec![num(grid.node(i))];
            r.extend(fields.iter().map(|(_, f)| num(f.values()[i])));
            r
        })
        .collect();
    write_csv(path, &header, &rows)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// One polyline of a chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Self-contained SVG line chart with axes, five ticks per axis and a legend.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (ml, mr, mt, mb) = MARGIN;
    let (pw, ph) = (WIDTH - ml - mr, HEIGHT - mt - mb);
    let (x0, x1) = range(series.iter().flat_map(|s| s.x.iter().copied()));
    let (y0, y1) = range(series.iter().flat_map(|s| s.y.iter().copied()));
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| mt + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">{}</text>"#, ml + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{ml:.2}" y="{mt:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (xp, yp) = (px(xv), py(yv));
        let _ = writeln!(s, r#"<line x1="{xp:.2}" y1="{:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/>"#, mt + ph, mt + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, mt + ph + 18.0, tick(xv));
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{yp:.2}" x2="{ml:.2}" y2="{yp:.2}" stroke="black"/>"#, ml - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, ml - 8.0, yp + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, ml + pw / 2.0, HEIGHT - 10.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = ser
            .x
            .iter()
            .zip(&ser.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = mt + 14.0 + 16.0 * k as f64;
        let lx = ml + pw - 150.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 25.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Plot fields sharing one grid and write the SVG with a CSV sidecar
/// (same path, `.csv` extension).
pub fn emit_plot(title: &str, fields: &[(&str, &SampledField)], path: &Path) -> Result<()> {
    let first = fields.first().ok_or_else(|| CliError::Config("plot needs at least one field".into()))?;
    let grid = *first.1.grid();
    let x = grid.nodes();
    let series: Vec<Series> = fields
        .iter()
        .map(|(label, f)| Series { label: label.to_string(), x: x.clone(), y: f.values().to_vec() })
        .collect();
    write_fields_csv(&path.with_extension("csv"), fields)?;
    write_text(path, &line_chart(title, "x", "", &series))
}
