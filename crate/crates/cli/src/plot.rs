//! Minimal static SVG 1.1 line plots and heatmaps.

use std::fmt::Write as _;

use crate::config::Scale;
use crate::output::fmt_f64;

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Maps data coordinates onto a pixel interval.
#[derive(Debug, Clone, Copy)]
struct Map {
    lo: f64,
    hi: f64,
    scale: Scale,
    p0: f64,
    p1: f64,
}

impl Map {
    fn t(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => (v - self.lo) / (self.hi - self.lo),
            Scale::Log => (v / self.lo).ln() / (self.hi / self.lo).ln(),
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.p0 + self.t(v) * (self.p1 - self.p0)
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => {
                let (a, b) = (self.lo.log10().ceil() as i32, self.hi.log10().floor() as i32);
                (a..=b).map(|e| 10f64.powi(e)).collect()
            }
            Scale::Linear => (0..=4).map(|k| self.lo + (self.hi - self.lo) * k as f64 / 4.0).collect(),
        }
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>
"#,
        W / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x: &Map, y: &Map, xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
    let _ = writeln!(out, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for t in x.ticks() {
        let p = x.px(t);
        let _ = writeln!(
            out,
            r#"<line x1="{p:.2}" y1="{y0}" x2="{p:.2}" y2="{}" stroke="black"/><text x="{p:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick_label(t)
        );
    }
    for t in y.ticks() {
        let p = y.px(t);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{p:.2}" x2="{x0}" y2="{p:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            p + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn dashed_vline(out: &mut String, x: &Map, v: f64, color: &str) {
    if v > x.lo.min(x.hi) && v < x.hi.max(x.lo) {
        let p = x.px(v);
        let _ = writeln!(
            out,
            r#"<line x1="{p:.2}" y1="{TOP}" x2="{p:.2}" y2="{}" stroke="{color}" stroke-dasharray="5,4"/>"#,
            H - BOTTOM
        );
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// Curve samples; non-finite values break the line.
    pub line: Vec<(f64, f64)>,
    /// Markers with error bars: (x, mean, stderr).
    pub points: Vec<(f64, f64, f64)>,
}

/// Robust upper y limit: curves blow up near phase boundaries.
fn y_upper(series: &[Series]) -> f64 {
    let mut v: Vec<f64> = series
        .iter()
        .flat_map(|s| s.line.iter().map(|p| p.1).chain(s.points.iter().map(|p| p.1 + p.2)))
        .filter(|v| v.is_finite())
        .collect();
    if v.is_empty() {
        return 1.0;
    }
    v.sort_by(f64::total_cmp);
    let q = v[(v.len() * 9) / 10];
    let top = v[v.len() - 1].min(2.0 * q);
    if top > 0.0 {
        top * 1.05
    } else {
        1.0
    }
}

/// Quantity against α_p, one series per α_f cut, with dashed overlays at
/// α_p = 1 and α_p = α_f.
pub fn line_plot(title: &str, ylabel: &str, xscale: Scale, cuts: &[f64], series: &[Series]) -> String {
    let xs: Vec<f64> = series.iter().flat_map(|s| s.line.iter().map(|p| p.0).chain(s.points.iter().map(|p| p.0))).collect();
    let (mut lo, mut hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        lo = if lo.is_finite() { lo * 0.5 } else { 0.1 };
        hi = if hi.is_finite() { hi * 2.0 } else { 10.0 };
    }
    let x = Map { lo, hi, scale: xscale, p0: LEFT, p1: W - RIGHT };
    let ymin = series
        .iter()
        .flat_map(|s| s.line.iter().map(|p| p.1).chain(s.points.iter().map(|p| p.1 - p.2)))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::min);
    let y = Map { lo: ymin, hi: y_upper(series), scale: Scale::Linear, p0: H - BOTTOM, p1: TOP };
    let clip = |v: f64| v.clamp(y.lo, y.hi);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &x, &y, "alpha_p", ylabel);
    dashed_vline(&mut out, &x, 1.0, "gray");
    for &af in cuts {
        dashed_vline(&mut out, &x, af, "silver");
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut seg: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, out: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, seg.join(" "));
            }
            seg.clear();
        };
        for &(px, py) in &s.line {
            if py.is_finite() {
                seg.push(format!("{:.2},{:.2}", x.px(px), y.px(clip(py))));
            } else {
                flush(&mut seg, &mut out);
            }
        }
        flush(&mut seg, &mut out);
        for &(px, m, se) in &s.points {
            if !m.is_finite() {
                continue;
            }
            let (cx, cy) = (x.px(px), y.px(clip(m)));
            let _ = writeln!(
                out,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/><circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="none" stroke="{color}"/>"#,
                y.px(clip(m - se)),
                y.px(clip(m + se))
            );
        }
        let ly = TOP + 16.0 + 16.0 * i as f64;
        let lx = W - RIGHT - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn viridis(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * 4.0;
    let k = (t.floor() as usize).min(3);
    let f = t - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let c = |x: f64, y: f64| (x + f * (y - x)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

/// Heatmap of log10(value) over (α_p, α_f) with the phase boundaries α_p = 1,
/// α_f = 1 and α_f = α_p drawn on top. `values[i][j]` belongs to
/// `(alpha_p[j], alpha_f[i])`; non-positive or non-finite cells are gray.
pub fn heatmap(
    title: &str,
    alpha_p: &[f64],
    alpha_f: &[f64],
    pscale: Scale,
    fscale: Scale,
    values: &[Vec<f64>],
) -> String {
    let edges = |v: &[f64], scale: Scale| -> (f64, f64) {
        let (lo, hi) = (v[0], v[v.len() - 1]);
        if v.len() == 1 {
            return (lo * 0.9, hi * 1.1);
        }
        match scale {
            Scale::Linear => {
                let h = (hi - lo) / (v.len() - 1) as f64 / 2.0;
                (lo - h, hi + h)
            }
            Scale::Log => {
                let r = (hi / lo).powf(0.5 / (v.len() - 1) as f64);
                (lo / r, hi * r)
            }
        }
    };
    let (plo, phi) = edges(alpha_p, pscale);
    let (flo, fhi) = edges(alpha_f, fscale);
    let x = Map { lo: plo, hi: phi, scale: pscale, p0: LEFT, p1: W - RIGHT - 60.0 };
    let y = Map { lo: flo, hi: fhi, scale: fscale, p0: H - BOTTOM, p1: TOP };
    let logs: Vec<f64> = values.iter().flatten().filter(|v| v.is_finite() && **v > 0.0).map(|v| v.log10()).collect();
    let (vmin, vmax) = if logs.is_empty() {
        (0.0, 1.0)
    } else {
        let mut s = logs.clone();
        s.sort_by(f64::total_cmp);
        let (a, b) = (s[s.len() / 50], s[s.len() - 1 - s.len() / 50]);
        if b > a {
            (a, b)
        } else {
            (a - 0.5, a + 0.5)
        }
    };

    let mut out = String::new();
    header(&mut out, title);
    let bound = |v: &[f64], i: usize, m: &Map| -> (f64, f64) {
        let mid = |a: f64, b: f64| match m.scale {
            Scale::Linear => (a + b) / 2.0,
            Scale::Log => (a * b).sqrt(),
        };
        let a = if i == 0 { m.lo } else { mid(v[i - 1], v[i]) };
        let b = if i + 1 == v.len() { m.hi } else { mid(v[i], v[i + 1]) };
        (m.px(a), m.px(b))
    };
    for (i, row) in values.iter().enumerate() {
        let (ya, yb) = bound(alpha_f, i, &y);
        for (j, &v) in row.iter().enumerate() {
            let (xa, xb) = bound(alpha_p, j, &x);
            let fill = if v.is_finite() && v > 0.0 { viridis((v.log10() - vmin) / (vmax - vmin)) } else { "#808080".into() };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="{fill}" stroke-width="0.5"/>"#,
                xa,
                yb,
                xb - xa,
                ya - yb
            );
        }
    }
    axes(&mut out, &x, &y, "alpha_p", "alpha_f");
    let style = r#"stroke="white" stroke-width="1.5" stroke-dasharray="6,4""#;
    // α_p = 1 for α_f ≥ 1, α_f = 1 for α_p ≥ 1, α_f = α_p below 1
    let seg = |out: &mut String, (p0, f0): (f64, f64), (p1, f1): (f64, f64)| {
        let cp = |v: f64| v.clamp(x.lo, x.hi);
        let cf = |v: f64| v.clamp(y.lo, y.hi);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            x.px(cp(p0)),
            y.px(cf(f0)),
            x.px(cp(p1)),
            y.px(cf(f1))
        );
    };
    let in_p = 1.0 > x.lo && 1.0 < x.hi;
    let in_f = 1.0 > y.lo && 1.0 < y.hi;
    if in_p && in_f {
        seg(&mut out, (1.0, 1.0), (1.0, y.hi));
        seg(&mut out, (1.0, 1.0), (x.hi, 1.0));
        let lo = x.lo.max(y.lo);
        seg(&mut out, (lo, lo), (1.0, 1.0));
    }
    // color bar
    let (bx, by0, by1) = (W - RIGHT - 40.0, H - BOTTOM, TOP);
    for k in 0..50 {
        let t = k as f64 / 50.0;
        let h = (by0 - by1) / 50.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            by0 - (k + 1) as f64 * h,
            h + 0.5,
            viridis(t + 0.01)
        );
    }
    for (v, py) in [(vmin, by0), (vmax, by1)] {
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" font-size="10">1e{}</text>"#, bx - 2.0, py + if py == by0 { 14.0 } else { -4.0 }, tick_label(v));
    }
    out.push_str("</svg>\n");
    out
}

/// Density curve with the support edges marked.
pub fn density_plot(title: &str, xs: &[f64], rho: &[f64], edges: (f64, f64)) -> String {
    let hi = xs.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let x = Map { lo: 0.0, hi, scale: Scale::Linear, p0: LEFT, p1: W - RIGHT };
    let s = Series { label: String::new(), line: xs.iter().copied().zip(rho.iter().copied()).collect(), points: vec![] };
    let y = Map { lo: 0.0, hi: y_upper(std::slice::from_ref(&s)), scale: Scale::Linear, p0: H - BOTTOM, p1: TOP };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &x, &y, "x", "rho(x)");
    dashed_vline(&mut out, &x, edges.0, "gray");
    dashed_vline(&mut out, &x, edges.1, "gray");
    let pts: Vec<String> =
        s.line.iter().map(|&(a, b)| format!("{:.2},{:.2}", x.px(a), y.px(b.min(y.hi)))).collect();
    let _ = writeln!(out, r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#, PALETTE[0], pts.join(" "));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="11">edges {} .. {}</text>"#,
        W - RIGHT - 6.0,
        TOP + 16.0,
        fmt_f64(edges.0),
        fmt_f64(edges.1)
    );
    out.push_str("</svg>\n");
    out
}
