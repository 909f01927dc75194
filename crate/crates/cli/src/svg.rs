//! Poincaré-disk rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use hypflow_core::{poincare_points, RadialCurve};

const SIZE: f64 = 512.0;
const MARGIN: f64 = 0.05;

fn coord(v: f64) -> String {
    format!("{v:.6}")
}

/// SVG of the unit disk, the curve, and optionally the circle of hyperbolic radius
/// `limit_radius` about the pole. Output depends only on the inputs.
pub fn render_svg(curve: &RadialCurve, limit_radius: Option<f64>) -> String {
    let extent = 1.0 + MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="{o} {o} {e} {e}">"#,
        w = SIZE,
        o = coord(-extent),
        e = coord(2.0 * extent)
    );
    let stroke = coord(2.0 * extent / SIZE);
    let _ = writeln!(
        s,
        r#"  <circle id="disk" cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="{stroke}"/>"#
    );
    if let Some(r) = limit_radius {
        let _ = writeln!(
            s,
            r#"  <circle id="limit" cx="0" cy="0" r="{}" fill="none" stroke="gray" stroke-dasharray="0.02 0.02" stroke-width="{stroke}"/>"#,
            coord((0.5 * r).tanh())
        );
    }
    // SVG's y axis points down; flip so angles run counter-clockwise.
    let points: Vec<String> = poincare_points(curve)
        .iter()
        .map(|[x, y]| format!("{},{}", coord(*x), coord(-y)))
        .collect();
    let _ = writeln!(
        s,
        r#"  <polygon id="curve" points="{}" fill="none" stroke="steelblue" stroke-width="{stroke}"/>"#,
        points.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, curve: &RadialCurve, limit_radius: Option<f64>) -> Result<()> {
    fs::write(path, render_svg(curve, limit_radius)).with_context(|| format!("writing {}", path.display()))
}
