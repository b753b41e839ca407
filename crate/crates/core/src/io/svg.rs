//! Minimal standalone SVG line plots.

use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw vertex markers in addition to the line.
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            markers: false,
        }
    }

    pub fn with_markers(mut self) -> Self {
        self.markers = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
}

impl Axes {
    pub fn linear(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
        }
    }
}

struct Mapping {
    scale: Scale,
    lo: f64,
    hi: f64,
    pix_lo: f64,
    pix_hi: f64,
}

impl Mapping {
    fn fwd(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }

    fn pixel(&self, v: f64) -> f64 {
        let t = (self.fwd(v) - self.lo) / (self.hi - self.lo);
        self.pix_lo + t * (self.pix_hi - self.pix_lo)
    }

    /// Tick values in data space.
    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => {
                let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
                (a..=b)
                    .map(|e| 10f64.powi(e))
                    .filter(|&v| v.log10() >= self.lo - 1e-9 && v.log10() <= self.hi + 1e-9)
                    .collect()
            }
            Scale::Linear => {
                let span = self.hi - self.lo;
                let raw = span / 6.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 2.5, 5.0, 10.0]
                    .iter()
                    .map(|m| m * mag)
                    .find(|s| span / s <= 7.0)
                    .unwrap_or(10.0 * mag);
                let start = (self.lo / step).ceil() as i64;
                let end = (self.hi / step).floor() as i64;
                (start..=end).map(|i| i as f64 * step).collect()
            }
        }
    }
}

fn range(values: impl Iterator<Item = f64>, scale: Scale) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        let t = if scale == Scale::Log { v.log10() } else { v };
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.04 * (hi - lo);
    if scale == Scale::Linear {
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the plot, returning the SVG text and the number of skipped points
/// (non-finite, or non-positive on a log axis).
pub fn render_svg(series: &[Series], axes: &Axes) -> Result<(String, usize)> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::arg("plot needs at least one non-empty series"));
    }
    let usable = |v: f64, scale: Scale| v.is_finite() && (scale == Scale::Linear || v > 0.0);
    let mut skipped = 0usize;
    let kept: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .copied()
                .filter(|&(x, y)| {
                    let ok = usable(x, axes.x_scale) && usable(y, axes.y_scale);
                    if !ok {
                        skipped += 1;
                    }
                    ok
                })
                .collect()
        })
        .collect();
    if kept.iter().all(|k| k.is_empty()) {
        return Err(Error::arg("no plottable points"));
    }

    let (x_lo, x_hi) = range(kept.iter().flatten().map(|p| p.0), axes.x_scale);
    let (y_lo, y_hi) = range(kept.iter().flatten().map(|p| p.1), axes.y_scale);
    let (left, right) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    let xm = Mapping { scale: axes.x_scale, lo: x_lo, hi: x_hi, pix_lo: left, pix_hi: right };
    let ym = Mapping { scale: axes.y_scale, lo: y_lo, hi: y_hi, pix_lo: bottom, pix_hi: top };

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (left + right) / 2.0,
        escape(&axes.title)
    );
    let _ = writeln!(
        w,
        r#"<rect x="{left}" y="{top}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );

    for t in xm.ticks() {
        let px = xm.pixel(t);
        let _ = writeln!(w, r##"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.1}" stroke="black"/>"##, bottom + 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick_label(t)
        );
    }
    for t in ym.ticks() {
        let py = ym.pixel(t);
        let _ = writeln!(w, r#"<line x1="{:.1}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 18.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(&axes.y_label)
    );

    for (i, (s, pts)) in series.iter().zip(&kept).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", xm.pixel(x), ym.pixel(y)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        if s.markers {
            for &(x, y) in pts {
                let _ = writeln!(
                    w,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    xm.pixel(x),
                    ym.pixel(y)
                );
            }
        }
    }

    let _ = writeln!(w, r#"<g class="legend">"#);
    let mut entry = 0;
    for (i, (s, pts)) in series.iter().zip(&kept).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let y = top + 14.0 + 20.0 * entry as f64;
        let x = right + 12.0;
        let _ = writeln!(
            w,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/>"#,
            x + 24.0
        );
        let _ = writeln!(w, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x + 30.0, y + 4.0, escape(&s.label));
        entry += 1;
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok((out, skipped))
}

/// Writes the plot to `path`; returns the number of skipped points.
pub fn emit_svg_plot(path: &Path, series: &[Series], axes: &Axes) -> Result<usize> {
    let (svg, skipped) = render_svg(series, axes)?;
    std::fs::write(path, svg)?;
    Ok(skipped)
}
