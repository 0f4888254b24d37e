//! Report emission: deterministic JSON (fixed field order, 17-digit floats)
//! or a terse text rendering, plus the SVG/DOT side outputs.

use crate::{CliError, CommonOut};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Write the report to --out or stdout. The text rendering is a flat
/// key: value walk of the same JSON, so both formats carry the same data.
pub fn emit(
    common: &CommonOut,
    report: &serde_json::Value,
    text: Option<String>,
) -> Result<(), CliError> {
    let body = match common.format {
        Format::Json => {
            serde_json::to_string_pretty(report).map_err(|e| CliError::io(e))? + "\n"
        }
        Format::Text => text.unwrap_or_else(|| render_text(report)),
    };
    match &common.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::io(format!("writing {}: {}", path.display(), e))),
        None => {
            print!("{}", body);
            Ok(())
        }
    }
}

fn render_text(v: &serde_json::Value) -> String {
    let mut out = String::new();
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut String) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, val) in map {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{}.{}", prefix, k)
                    };
                    walk(&p, val, out);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, val) in items.iter().enumerate() {
                    walk(&format!("{}[{}]", prefix, i), val, out);
                }
            }
            other => {
                out.push_str(&format!("{} = {}\n", prefix, other));
            }
        }
    }
    walk("", v, &mut out);
    out
}

pub fn json_f64(v: f64) -> serde_json::Value {
    serde_json::Value::Number(serde_json::Number::from_string_unchecked(
        univalens::report::fmt_f64(v),
    ))
}

pub fn json_complex(z: Complex64) -> serde_json::Value {
    serde_json::Value::Array(vec![json_f64(z.re), json_f64(z.im)])
}

/// Plot complex trajectory samples: the (re, im) projections of each state
/// component as SVG polylines.
pub fn write_trajectory_svg(
    path: &std::path::Path,
    samples: &[(Complex64, Vec<Complex64>)],
) -> Result<(), CliError> {
    if samples.is_empty() {
        return Err(CliError::io("no samples to plot"));
    }
    let dims = samples[0].1.len();
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let (w, h) = (640.0_f64, 480.0_f64);
    // Bounding box over all components.
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for (_, st) in samples {
        for z in st {
            if z.re.is_finite() && z.im.is_finite() {
                min_x = min_x.min(z.re);
                max_x = max_x.max(z.re);
                min_y = min_y.min(z.im);
                max_y = max_y.max(z.im);
            }
        }
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let map = |z: Complex64| -> (f64, f64) {
        (
            40.0 + (z.re - min_x) / span_x * (w - 80.0),
            h - 40.0 - (z.im - min_y) / span_y * (h - 80.0),
        )
    };
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        w, h, w, h
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for d in 0..dims {
        let pts: Vec<String> = samples
            .iter()
            .map(|(_, st)| {
                let (x, y) = map(st[d]);
                format!("{:.2},{:.2}", x, y)
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            colors[d % colors.len()],
            pts.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)
        .map_err(|e| CliError::io(format!("writing {}: {}", path.display(), e)))
}
