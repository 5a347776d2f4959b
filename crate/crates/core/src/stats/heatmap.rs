use std::fmt::Write;

use super::matrix::ScoreMatrix;

const CELL: usize = 24;
const MARGIN: usize = 110;
const LOW: (f64, f64, f64) = (247.0, 251.0, 255.0);
const HIGH: (f64, f64, f64) = (8.0, 48.0, 107.0);

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn color(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(LOW.0, HIGH.0), mix(LOW.1, HIGH.1), mix(LOW.2, HIGH.2))
}

/// Standalone SVG of the matrix with sources as rows and targets as
/// columns, in the given orders. A zero-shot row is drawn on top when
/// the matrix has one. Missing cells are left grey.
pub fn render_svg(m: &ScoreMatrix, sources: &[&str], targets: &[&str]) -> String {
    let has_zero = m.zero_shot_scores().next().is_some();
    let rows: Vec<Option<&str>> = has_zero.then_some(None).into_iter().chain(sources.iter().map(|&s| Some(s))).collect();
    let width = MARGIN + CELL * targets.len() + 10;
    let height = MARGIN + CELL * rows.len() + 10;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(m.task()));
    for (c, t) in targets.iter().enumerate() {
        let x = MARGIN + c * CELL + CELL / 2;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" transform="rotate(-60 {x} {})">{}</text>"#,
            MARGIN - 4,
            MARGIN - 4,
            escape(t)
        );
    }
    for (r, src) in rows.iter().enumerate() {
        let y = MARGIN + r * CELL;
        let label = src.map_or("Zero Shot".to_string(), escape);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, MARGIN - 4, y + CELL / 2 + 3);
        for (c, t) in targets.iter().enumerate() {
            let v = match src {
                Some(src) => m.get(src, t),
                None => m.zero_shot(t),
            };
            let fill = v.map_or_else(|| "#cccccc".to_string(), color);
            let x = MARGIN + c * CELL;
            let _ = write!(s, r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}">"#);
            if let Some(v) = v {
                let _ = write!(s, "<title>{v:.2}</title>");
            }
            let _ = writeln!(s, "</rect>");
        }
    }
    s.push_str("</svg>\n");
    s
}
