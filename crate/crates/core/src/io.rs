//! CSV, JSON and SVG output with atomic writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One number in the fixed 17-significant-digit scientific format.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with a header row; every value uses [`fmt_num`].
pub fn csv_string<R: AsRef<[f64]>>(headers: &[&str], rows: &[R]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.as_ref().iter().map(|x| fmt_num(*x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parse CSV text whose header must equal `headers`.
pub fn parse_csv(text: &str, headers: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?;
    let found: Vec<&str> = head.split(',').map(str::trim).collect();
    if found != headers {
        return Err(Error::InvalidInput(format!(
            "CSV header {found:?}, expected {headers:?}"
        )));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let row: std::result::Result<Vec<f64>, _> =
                l.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::InvalidInput(format!("CSV row {}: {e}", i + 1)))?;
            if row.len() != headers.len() {
                return Err(Error::InvalidInput(format!(
                    "CSV row {} has {} fields",
                    i + 1,
                    row.len()
                )));
            }
            Ok(row)
        })
        .collect()
}

/// Write `content` to `path` through a temporary file in the same directory
/// followed by a rename.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, json_string(value)?.as_bytes())
}

/// A labelled series for [`svg_plot`].
pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Minimal line plot with auto-scaled axes.
pub fn svg_plot(title: &str, series: &[Series<'_>]) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.x.iter()).filter(finite);
    let ys = series.iter().flat_map(|s| s.y.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(*v), b.max(*v))
    });
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(*v), b.max(*v))
    });
    if !(y1 > y0) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let xr = if x1 > x0 { x1 - x0 } else { 1.0 };
    let yr = y1 - y0;
    let px = |x: f64| m + (x - x0) / xr * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / yr * (h - 2.0 * m);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(
        out,
        r#"<text x="{m}" y="{}" font-family="sans-serif" font-size="10">{:.3e}</text>"#,
        h - m + 14.0,
        x0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{:.3e}</text>"#,
        w - m,
        h - m + 14.0,
        x1
    );
    let _ = writeln!(
        out,
        r#"<text x="4" y="{}" font-family="sans-serif" font-size="10">{:.3e}</text>"#,
        h - m,
        y0
    );
    let _ = writeln!(
        out,
        r#"<text x="4" y="{}" font-family="sans-serif" font-size="10">{:.3e}</text>"#,
        m + 4.0,
        y1
    );
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> =
            s.x.iter()
                .zip(s.y.iter())
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y)))
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            w - m - 4.0,
            m + 14.0 * (k as f64 + 1.0),
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
