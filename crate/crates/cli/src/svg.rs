//! Minimal SVG plots: a polyline chart and a bar chart.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Frame {
            x0,
            x1,
            y0: y0.min(0.0),
            y1,
        }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn open(title: &str, xlabel: &str, ylabel: &str, f: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let (bx, by) = (PAD, H - PAD);
    let _ = writeln!(
        s,
        r#"<path d="M{bx} {PAD} L{bx} {by} L{} {by}" stroke="black" fill="none"/>"#,
        W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
    for (v, anchor, x, y) in [
        (f.x0, "start", f.px(f.x0), by + 16.0),
        (f.x1, "end", f.px(f.x1), by + 16.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{v:.3}</text>"#
        );
    }
    for v in [f.y0, f.y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#,
            bx - 4.0,
            f.py(v) + 4.0
        );
    }
    s
}

/// Polyline through `(x, y)`; non-finite points break the line.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)]) -> String {
    let f = Frame::new(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
    let mut s = open(title, xlabel, ylabel, &f);
    let mut d = String::new();
    let mut pen = false;
    for &(x, y) in pts {
        if !(x.is_finite() && y.is_finite()) {
            pen = false;
            continue;
        }
        let _ = write!(
            d,
            "{}{:.2} {:.2} ",
            if pen { "L" } else { "M" },
            f.px(x),
            f.py(y)
        );
        pen = true;
    }
    let _ = writeln!(
        s,
        r#"<path d="{}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#,
        d.trim_end()
    );
    s.push_str("</svg>\n");
    s
}

/// Vertical bars centred on integer `x`.
pub fn bar_plot(title: &str, xlabel: &str, ylabel: &str, bars: &[(i64, f64)]) -> String {
    let f = Frame::new(
        bars.iter()
            .flat_map(|b| [b.0 as f64 - 0.5, b.0 as f64 + 0.5]),
        bars.iter().map(|b| b.1),
    );
    let mut s = open(title, xlabel, ylabel, &f);
    let width = (f.px(1.0) - f.px(0.0)) * 0.8;
    for &(x, y) in bars {
        let top = f.py(y.max(0.0));
        let base = f.py(0.0);
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{top:.2}" width="{width:.2}" height="{:.2}" fill="steelblue"/>"#,
            f.px(x as f64) - width / 2.0,
            (base - top).max(0.0)
        );
    }
    s.push_str("</svg>\n");
    s
}
