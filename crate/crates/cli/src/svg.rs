//! Minimal native SVG line plots. Output depends only on the data, so plots are as
//! reproducible as the numbers behind them.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLOURS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// One named polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axes {
    Linear,
    LogLog,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        Some((lo - 0.5, hi + 0.5))
    } else {
        Some((lo, hi))
    }
}

fn tick_label(v: f64, axes: Axes) -> String {
    match axes {
        Axes::LogLog => format!("1e{}", v.round() as i64),
        Axes::Linear => {
            let a = v.abs();
            if a != 0.0 && !(1e-3..1e4).contains(&a) {
                format!("{v:.2e}")
            } else {
                format!("{v:.4}").trim_end_matches('0').trim_end_matches('.').to_string()
            }
        }
    }
}

fn ticks(lo: f64, hi: f64, axes: Axes) -> Vec<f64> {
    match axes {
        Axes::LogLog => {
            let (a, b) = (lo.floor() as i64, hi.ceil() as i64);
            let step = ((b - a) / 8).max(1);
            (a..=b).step_by(step as usize).map(|d| d as f64).filter(|&d| d >= lo && d <= hi).collect()
        }
        Axes::Linear => (0..=5).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect(),
    }
}

/// Renders `series`; in log-log mode non-positive values are dropped.
pub fn plot(title: &str, x_label: &str, y_label: &str, axes: Axes, series: &[Series]) -> String {
    let map = |v: f64| if axes == Axes::LogLog { v.log10() } else { v };
    let keep = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (axes == Axes::Linear || (x > 0.0 && y > 0.0));
    let data: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().copied().filter(keep).map(|(x, y)| (map(x), map(y))).collect())
        .collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let xb = bounds(data.iter().flatten().map(|p| p.0));
    let yb = bounds(data.iter().flatten().map(|p| p.1));
    if let (Some((x0, x1)), Some((y0, y1))) = (xb, yb) {
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
        for t in ticks(x0, x1, axes) {
            let _ = writeln!(
                out,
                r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/><text x="{0:.2}" y="{3}" text-anchor="middle">{4}</text>"#,
                sx(t),
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0,
                tick_label(t, axes)
            );
        }
        for t in ticks(y0, y1, axes) {
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="black"/><text x="{3}" y="{4:.2}" text-anchor="end">{5}</text>"#,
                LEFT - 5.0,
                sy(t),
                LEFT,
                LEFT - 8.0,
                sy(t) + 4.0,
                tick_label(t, axes)
            );
        }
        for (i, (s, pts)) in series.iter().zip(&data).enumerate() {
            let colour = COLOURS[i % COLOURS.len()];
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            if pts.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            for &(x, y) in pts {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#, sx(x), sy(y));
            }
            let ly = TOP + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{:.2}" width="10" height="10" fill="{colour}"/><text x="{}" y="{:.2}">{}</text>"#,
                WIDTH - RIGHT + 10.0,
                ly - 9.0,
                WIDTH - RIGHT + 24.0,
                ly,
                escape(&s.name)
            );
        }
    } else {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">no positive data</text>"#,
            LEFT + pw / 2.0,
            TOP + ph / 2.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(y_label)
    );
    out.push_str("</svg>\n");
    out
}
