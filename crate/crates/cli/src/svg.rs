//! Actual-versus-predicted scatter plots as standalone SVG.

use std::fmt::Write as _;

use ozone_core::eval::Scatter;

const SIZE: f64 = 640.0;
/// Plot area inset, leaving room for tick labels and axis titles.
const MARGIN: f64 = 64.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the scatter on a 640×640 canvas. Both axes span the joint data
/// range padded by 5% on each side, so the identity line is the diagonal.
pub fn render(scatter: &Scatter) -> String {
    let [(lo, _), (hi, _)] = scatter.identity;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (lo, hi) = (lo - 0.05 * span, hi + 0.05 * span);
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / (hi - lo) * plot;
    let sy = |v: f64| SIZE - MARGIN - (v - lo) / (hi - lo) * plot;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="640" viewBox="0 0 640 640" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="640" height="640" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="320" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        escape(&scatter.model)
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.1}</text>"#,
            sx(v),
            SIZE - MARGIN + 18.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"#,
            MARGIN - 6.0,
            sy(v) + 4.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="320" y="{:.0}" text-anchor="middle">Actual O3 (µg/m³)</text>"#,
        SIZE - 16.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="18" y="320" text-anchor="middle" transform="rotate(-90 18 320)">Predicted O3 (µg/m³)</text>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-width="2"/>"#,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    )
    .unwrap();
    s.push_str(r#"<g fill="steelblue" fill-opacity="0.6">"#);
    s.push('\n');
    for &(a, p) in &scatter.points {
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, sx(a), sy(p)).unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    s
}
