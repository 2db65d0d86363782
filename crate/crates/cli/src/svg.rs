//! Band diagrams of interval sets as SVG 1.1.
//!
//! One horizontal band per layer: parts are filled rectangles, gaps are left
//! blank. Coordinates are the only place exact rationals become floats, and
//! they are rounded to three decimals at render time for display only.

use std::fmt::Write as _;

use cantorvis_core::{Interval, IntervalSet, Scalar};

use crate::CliError;

pub const CANVAS_WIDTH: u32 = 1000;
pub const BAND_HEIGHT: u32 = 60;
const BAR_TOP: u32 = 22;
const BAR_HEIGHT: u32 = 28;

pub struct Layer {
    pub set: IntervalSet,
    pub label: String,
}

fn x_of(v: &Scalar, hull: &Interval) -> f64 {
    let t = ((v - hull.lo()) / hull.length()).to_f64();
    t * CANVAS_WIDTH as f64
}

fn px(v: f64) -> String {
    // -0.000 and 0.000 must render the same
    let r = (v * 1000.0).round() / 1000.0;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render `layers` against a common `hull`.
pub fn render(layers: &[Layer], hull: &Interval) -> Result<String, CliError> {
    if layers.is_empty() {
        return Err(CliError::Usage("nothing to plot".into()));
    }
    if !hull.length().is_positive() {
        return Err(CliError::Usage(
            "plot hull must have positive length".into(),
        ));
    }
    let hull_set = IntervalSet::from(hull.clone());
    if let Some(bad) = layers.iter().find(|l| !l.set.is_subset_of(&hull_set)) {
        return Err(CliError::Usage(format!(
            "layer `{}` is not inside the hull {hull}",
            bad.label
        )));
    }
    let height = BAND_HEIGHT * layers.len() as u32;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS_WIDTH}" height="{height}" viewBox="0 0 {CANVAS_WIDTH} {height}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{CANVAS_WIDTH}" height="{height}" fill="#ffffff"/>"##
    );
    for (i, layer) in layers.iter().enumerate() {
        let top = BAND_HEIGHT * i as u32;
        let _ = writeln!(out, r#"<g id="layer-{i}">"#);
        let _ = writeln!(
            out,
            r##"<text x="4" y="{}" font-family="monospace" font-size="12" fill="#333333">{}</text>"##,
            top + 15,
            escape(&layer.label)
        );
        for part in layer.set.parts() {
            let x0 = x_of(part.lo(), hull);
            let x1 = x_of(part.hi(), hull);
            // keep points and sub-pixel parts visible
            let w = (x1 - x0).max(0.5);
            let _ = writeln!(
                out,
                r##"<rect x="{}" y="{}" width="{}" height="{BAR_HEIGHT}" fill="#1f4e79"/>"##,
                px(x0),
                top + BAR_TOP,
                px(w)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
