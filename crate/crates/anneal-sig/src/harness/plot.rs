//! Plot-ready CSV writing and a minimal static SVG renderer.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::harness::stats::BoxStats;

/// Writes a CSV file: a header row and rows of `f64` cells formatted with
/// full round-trip precision.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// One named line of an XY chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Axis scaling for [`render_lines`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisScale {
    Linear,
    Log10,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn axis_transform(values: impl Iterator<Item = f64>, scale: AxisScale) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        let v = match scale {
            AxisScale::Linear => v,
            AxisScale::Log10 => v.log10(),
        };
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders named polylines into a self-contained SVG document.
pub fn render_lines(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_scale: AxisScale,
    series: &[Series],
) -> String {
    let (x_lo, x_hi) = axis_transform(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), x_scale);
    let (y_lo, y_hi) =
        axis_transform(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), AxisScale::Linear);
    let sx = |x: f64| {
        let x = match x_scale {
            AxisScale::Linear => x,
            AxisScale::Log10 => x.log10(),
        };
        MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN)
    };
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = write!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    frame_and_labels(&mut svg, title, x_label, y_label, (x_lo, x_hi), (y_lo, y_hi), x_scale);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (k, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, sx(x), sy(y));
        }
        let _ = write!(svg, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.trim());
        let ly = MARGIN + 16.0 * i as f64;
        let _ = write!(
            svg,
            r#"<text x="{:.0}" y="{ly:.0}" font-size="12" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            xml_escape(&s.name)
        );
    }
    svg.push_str("</svg>");
    svg
}

/// Renders labelled box plots (one box per entry) into an SVG document.
pub fn render_boxes(title: &str, y_label: &str, entries: &[(String, BoxStats)]) -> String {
    let all: Vec<f64> = entries
        .iter()
        .flat_map(|(_, b)| {
            let mut v = vec![b.whisker_low, b.whisker_high];
            v.extend(b.outliers.iter().copied());
            v
        })
        .collect();
    let (y_lo, y_hi) = axis_transform(all.into_iter(), AxisScale::Linear);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    let slot = (WIDTH - 2.0 * MARGIN) / entries.len() as f64;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = write!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    frame_and_labels(&mut svg, title, "", y_label, (0.0, entries.len() as f64), (y_lo, y_hi), AxisScale::Linear);
    for (i, (label, b)) in entries.iter().enumerate() {
        let cx = MARGIN + slot * (i as f64 + 0.5);
        let w = (slot * 0.5).min(40.0);
        let _ = write!(
            svg,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            sy(b.whisker_low),
            sy(b.whisker_high)
        );
        let _ = write!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="{w:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            cx - w / 2.0,
            sy(b.upper_quartile),
            (sy(b.lower_quartile) - sy(b.upper_quartile)).max(0.5)
        );
        let _ = write!(
            svg,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="2"/>"#,
            cx - w / 2.0,
            sy(b.median),
            cx + w / 2.0,
            sy(b.median)
        );
        for &o in &b.outliers {
            let _ = write!(svg, r#"<circle cx="{cx:.1}" cy="{:.1}" r="2.5" fill="black"/>"#, sy(o));
        }
        let _ = write!(
            svg,
            r#"<text x="{cx:.1}" y="{:.0}" font-size="11" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN + 16.0,
            xml_escape(label)
        );
    }
    svg.push_str("</svg>");
    svg
}

fn frame_and_labels(
    svg: &mut String,
    title: &str,
    x_label: &str,
    y_label: &str,
    (x_lo, x_hi): (f64, f64),
    (y_lo, y_hi): (f64, f64),
    x_scale: AxisScale,
) {
    let _ = write!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.0}" height="{:.0}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = write!(
        svg,
        r#"<text x="{:.0}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(title)
    );
    let _ = write!(
        svg,
        r#"<text x="{:.0}" y="{:.0}" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        xml_escape(x_label)
    );
    let _ = write!(
        svg,
        r#"<text x="16" y="{:.0}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.0})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        xml_escape(y_label)
    );
    let fmt_tick = |v: f64| -> String {
        match x_scale {
            AxisScale::Log10 => format!("1e{v:.1}"),
            AxisScale::Linear => format!("{v:.3}"),
        }
    };
    let _ = write!(
        svg,
        r#"<text x="{MARGIN}" y="{:.0}" font-size="10">{}</text>"#,
        HEIGHT - MARGIN + 14.0,
        fmt_tick(x_lo)
    );
    let _ = write!(
        svg,
        r#"<text x="{:.0}" y="{:.0}" font-size="10" text-anchor="end">{}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 14.0,
        fmt_tick(x_hi)
    );
    let _ = write!(
        svg,
        r#"<text x="{:.0}" y="{:.0}" font-size="10" text-anchor="end">{y_lo:.3e}</text>"#,
        MARGIN - 4.0,
        HEIGHT - MARGIN
    );
    let _ = write!(
        svg,
        r#"<text x="{:.0}" y="{:.0}" font-size="10" text-anchor="end">{y_hi:.3e}</text>"#,
        MARGIN - 4.0,
        MARGIN + 4.0
    );
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes an SVG document to disk, creating parent directories.
pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, svg)?;
    Ok(())
}
