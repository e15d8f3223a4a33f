//! CSV and SVG output with platform-independent formatting.

use std::fmt::Write as _;
use std::io::Write;

use crate::integrator::Trajectory;

/// 17 significant digits in scientific notation, enough to round-trip an `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `t,x1,x2` for every stored state.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = traj.states.iter().map(|s| vec![s.t, s.x1, s.x2]).collect();
    write_csv(out, &["t", "x1", "x2"], &rows)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

/// Single-panel line plot: one polyline, a box of axes, and extreme-value labels.
pub fn line_plot_svg(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let (x0, x1) = span(points.iter().map(|p| p.0));
    let (y0, y1) = span(points.iter().map(|p| p.1));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    if y0 < 0.0 && y1 > 0.0 {
        let z = py(0.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN}" y1="{z:.2}" x2="{:.2}" y2="{z:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            WIDTH - MARGIN
        );
    }
    let path: Vec<String> = points
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{}"/>"##,
        path.join(" ")
    );
    let text = |svg: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    };
    text(&mut svg, WIDTH / 2.0, MARGIN / 2.0, "middle", title);
    text(&mut svg, WIDTH / 2.0, HEIGHT - 12.0, "middle", x_label);
    text(&mut svg, 14.0, HEIGHT / 2.0, "start", y_label);
    text(&mut svg, MARGIN, HEIGHT - MARGIN + 16.0, "start", &format!("{x0:.4e}"));
    text(&mut svg, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "end", &format!("{x1:.4e}"));
    text(&mut svg, MARGIN - 4.0, HEIGHT - MARGIN, "end", &format!("{y0:.3e}"));
    text(&mut svg, MARGIN - 4.0, MARGIN + 4.0, "end", &format!("{y1:.3e}"));
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
