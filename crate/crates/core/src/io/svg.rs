//! Static SVG phase portraits: one polyline through the `(x, y)` samples
//! with axes, tick labels at the data range and axis titles.

use std::fmt::Write as _;
use std::path::Path;

use crate::flows::Trajectory;
use crate::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn column(traj: &Trajectory, label: &str) -> Result<Vec<f64>> {
    if label == "t" {
        return Ok(traj.times.clone());
    }
    traj.column(label)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown column {label:?}")))
}

fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 1e-300 {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders the curve `(x_col, y_col)`; `"t"` names the time column.
pub fn phase_svg(traj: &Trajectory, x_col: &str, y_col: &str) -> Result<String> {
    let xs = column(traj, x_col)?;
    let ys = column(traj, y_col)?;
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right) = (MARGIN, WIDTH - MARGIN);
    let (top, bottom) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>"#
    );
    let tick = |v: f64| format!("{v:.4e}");
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="{}" font-size="11" text-anchor="start">{}</text>"#,
        bottom + 16.0,
        tick(x0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{right}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        bottom + 16.0,
        tick(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{bottom}" font-size="11" text-anchor="end">{}</text>"#,
        left - 4.0,
        tick(y0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        left - 4.0,
        top + 4.0,
        tick(y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_col)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_col)
    );
    if xs.len() == 1 {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="steelblue"/>"#,
            px(xs[0]),
            py(ys[0])
        );
    } else {
        let points: Vec<String> = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn emit_phase_svg(traj: &Trajectory, x_col: &str, y_col: &str, path: &Path) -> Result<()> {
    let text = phase_svg(traj, x_col, y_col)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
