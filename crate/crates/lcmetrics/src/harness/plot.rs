//! The comparison-envelope figure: `f(x) = max(1, log(1/x)) x` on (0, 1.5],
//! rendered as a self-contained SVG with an optional scatter overlay.
//!
//! `f` is linear (`f(x) = x`) for `x >= 1/e` and bends to `x log(1/x)`
//! below; it is the shape of every reversed bound's right-hand side.

use crate::error::Result;

/// The envelope function itself.
pub fn envelope_f(x: f64) -> f64 {
    1f64.max((1.0 / x).ln()) * x
}

/// The sampled curve used for both the SVG polyline and the verification
/// probes; includes the exact probe abscissas 1/e^2, 1/e, and 1.
pub fn envelope_samples() -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = (1..=600).map(|i| 1.5 * i as f64 / 600.0).collect();
    // resolve the small-x bend with a geometric refinement
    let mut x = 1.5 / 600.0;
    while x > 1e-4 {
        xs.push(x);
        x *= 0.85;
    }
    xs.push((-1.0f64).exp());
    xs.push((-2.0f64).exp());
    xs.push(1.0);
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs.into_iter().map(|x| (x, envelope_f(x))).collect()
}

/// Render the envelope with an optional `(x, y)` scatter (already rescaled
/// by the caller; points are expected to lie under the curve).
pub fn envelope_svg(scatter: &[(f64, f64)]) -> String {
    let samples = envelope_samples();
    let (w, h) = (640.0, 480.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 20.0, 45.0);
    let x_max = 1.5;
    let y_max = samples
        .iter()
        .map(|&(_, y)| y)
        .chain(scatter.iter().map(|&(_, y)| y))
        .fold(0.0f64, f64::max)
        * 1.05;
    let px = |x: f64| ml + (w - ml - mr) * x / x_max;
    let py = |y: f64| h - mb - (h - mb - mt) * y / y_max;

    let mut svg = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(x_max),
        py(0.0)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(0.0),
        py(y_max)
    );
    for i in 0..=3 {
        let x = x_max * i as f64 / 3.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{:.1}</text>"#,
            px(x),
            py(0.0) + 16.0,
            x
        );
    }
    for i in 1..=3 {
        let y = y_max * i as f64 / 3.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{:.2}</text>"#,
            px(0.0) - 6.0,
            py(y) + 4.0,
            y
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">max(1, log(1/x)) x</text>"#,
        px(x_max / 2.0),
        py(0.0) + 34.0
    );
    // envelope polyline
    let points: Vec<String> = samples
        .iter()
        .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    // scatter
    for &(x, y) in scatter {
        if x <= x_max && y.is_finite() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="firebrick" fill-opacity="0.7"/>"#,
                px(x),
                py(y)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Write the figure to `path`; the scatter is `(d_BL, W_1)` pairs rescaled
/// to the envelope's unit coordinates by the caller.
pub fn write_envelope_svg(path: &std::path::Path, scatter: &[(f64, f64)]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, envelope_svg(scatter))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_probe_values() {
        assert!((envelope_f(1.0) - 1.0).abs() < 1e-15);
        let e1 = (-1.0f64).exp();
        assert!((envelope_f(e1) - e1).abs() < 1e-15);
        let e2 = (-2.0f64).exp();
        assert!((envelope_f(e2) - 2.0 * e2).abs() < 1e-15);
        // linear branch above 1/e
        assert!((envelope_f(0.9) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn samples_include_probe_points() {
        let s = envelope_samples();
        for probe in [1.0, (-1.0f64).exp(), (-2.0f64).exp()] {
            assert!(
                s.iter().any(|&(x, _)| x == probe),
                "missing probe {probe}"
            );
        }
        // strictly increasing abscissas
        assert!(s.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = envelope_svg(&[(0.1, 0.2)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("circle"));
    }
}
