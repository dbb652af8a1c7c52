//! Minimal SVG line and bar charts. Coordinates are printed at fixed
//! precision so identical data gives identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

pub const PALETTE: [&str; 4] = ["#c2185b", "#616161", "#1976d2", "#388e3c"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: String,
}

#[derive(Debug, Clone)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    /// Whisker half-length; zero draws no whisker.
    pub error: f64,
    pub color: String,
}

/// Mean and 95% confidence half-width (1.96 standard errors).
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64, span: f64) -> String {
    let decimals = if span > 0.0 { (2.0 - span.log10().floor()).clamp(0.0, 8.0) as usize } else { 3 };
    format!("{v:.decimals$}")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new((x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> Self {
        let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn y_axis(out: &mut String, f: &Frame, label: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="black"/>"#,
        HEIGHT - BOTTOM
    );
    for i in 0..=TICKS {
        let v = f.y0 + (f.y1 - f.y0) * i as f64 / TICKS as f64;
        let y = f.py(v);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v, f.y1 - f.y0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(label)
    );
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Line chart with point markers and a legend.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1) = finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let f = if x0.is_finite() { Frame::new((x0, x1), (y0, y1)) } else { Frame::new((0.0, 1.0), (0.0, 1.0)) };
    let mut out = String::new();
    header(&mut out, title);
    y_axis(&mut out, &f, y_label);
    let base = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    for i in 0..=TICKS {
        let v = f.x0 + (f.x1 - f.x0) * i as f64 / TICKS as f64;
        let x = f.px(v);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            base + 5.0,
            base + 20.0,
            tick_label(v, f.x1 - f.x0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            pts.join(" ")
        );
        for p in &pts {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{}"/>"#, s.color);
        }
        let ly = TOP + 8.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - RIGHT - 150.0,
            ly - 9.0,
            s.color,
            WIDTH - RIGHT - 135.0,
            ly,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Bar chart with symmetric error whiskers. The value axis starts at zero
/// unless some bar is negative.
pub fn bar_chart(title: &str, y_label: &str, bars: &[Bar]) -> String {
    let lo = bars.iter().map(|b| b.value - b.error).filter(|v| v.is_finite()).fold(0.0, f64::min);
    let hi = bars.iter().map(|b| b.value + b.error).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let f = Frame::new((0.0, 1.0), (lo, hi * 1.05 + if hi == lo { 1.0 } else { 0.0 }));
    let mut out = String::new();
    header(&mut out, title);
    y_axis(&mut out, &f, y_label);
    let zero = f.py(0.0);
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    let slot = (WIDTH - LEFT - RIGHT) / bars.len().max(1) as f64;
    for (i, b) in bars.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let w = slot * 0.5;
        let top = f.py(b.value.max(0.0));
        let h = (f.py(b.value.min(0.0)) - top).abs();
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="{}"/>"#,
            cx - w / 2.0,
            b.color
        );
        if b.error > 0.0 {
            let (ya, yb) = (f.py(b.value + b.error), f.py(b.value - b.error));
            let _ = writeln!(
                out,
                r#"<path d="M{cx:.2},{ya:.2}V{yb:.2}M{:.2},{ya:.2}H{:.2}M{:.2},{yb:.2}H{:.2}" stroke="black" fill="none"/>"#,
                cx - 8.0,
                cx + 8.0,
                cx - 8.0,
                cx + 8.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            HEIGHT - BOTTOM + 20.0,
            escape(&b.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
