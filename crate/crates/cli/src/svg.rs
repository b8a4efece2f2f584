//! Minimal standalone SVG line chart of success rate against θ.

use std::fmt::Write as _;
use std::path::Path;

use dirtymodel::experiments::SweepTable;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one polyline per method with a legend. Errors on an empty table.
pub fn render(table: &SweepTable, title: &str) -> Result<String, String> {
    if table.points.is_empty() {
        return Err("nothing to plot: the sweep table is empty".into());
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &table.points {
        lo = lo.min(p.theta);
        hi = hi.max(p.theta);
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |t: f64| MARGIN + (t - lo) / (hi - lo) * plot_w;
    let y = |r: f64| HEIGHT - MARGIN - r * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>
<line x1="{MARGIN}" y1="{}" x2="{}" y2="{}" stroke="black"/>
<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{}" stroke="black"/>"#,
        WIDTH / 2.0,
        escape(title),
        HEIGHT - MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN,
        HEIGHT - MARGIN,
    );
    for tick in 0..=4 {
        let r = tick as f64 / 4.0;
        let t = lo + (hi - lo) * r;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{t:.2}</text>
<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{r:.2}</text>"#,
            x(t),
            HEIGHT - MARGIN + 16.0,
            MARGIN - 6.0,
            y(r) + 4.0,
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">theta</text>
<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">success rate</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
    );
    for (i, method) in table.methods().into_iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = table
            .curve(method)
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.theta), y(p.success_rate())))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text></g>"#,
            WIDTH - MARGIN - 90.0,
            WIDTH - MARGIN - 70.0,
            WIDTH - MARGIN - 64.0,
            ly + 4.0,
            escape(method.name()),
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the chart to `path`; nothing is created when rendering fails.
pub fn emit_svg(table: &SweepTable, path: &Path, title: &str) -> Result<(), String> {
    let svg = render(table, title)?;
    std::fs::write(path, svg).map_err(|e| format!("{}: {e}", path.display()))
}
