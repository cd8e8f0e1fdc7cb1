//! Self-contained SVG line and path charts: inline styling, no external
//! assets, fixed 800×600 viewBox per panel.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

pub const PALETTE: [&str; 6] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, color: &'static str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), color, dashed: false, points }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// A circle drawn in data coordinates on a path chart.
pub struct CircleMark {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub color: &'static str,
    pub dashed: bool,
}

fn data_bounds(series: &[Series], extra: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    for &(x, y) in extra {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if !xmin.is_finite() {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        (xmin, xmax, ymin, ymax)
    }
}

fn pad_range(min: f64, max: f64) -> (f64, f64) {
    if min == max {
        (min - 1.0, max + 1.0)
    } else {
        let pad = 0.05 * (max - min);
        (min - pad, max + pad)
    }
}

/// Tick step of the form {1, 2, 5}·10^k giving at most ~6 ticks.
fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let pow = 10f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0] {
        if raw <= mult * pow {
            return mult * pow;
        }
    }
    10.0 * pow
}

fn ticks(min: f64, max: f64) -> Vec<f64> {
    let step = nice_step(max - min);
    let mut out = Vec::new();
    let mut v = (min / step).ceil() * step;
    while v <= max + 1e-12 * step {
        // collapse -0
        out.push(if v == 0.0 { 0.0 } else { v });
        v += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

struct Frame {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.xmin) / (self.xmax - self.xmin) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.ymin) / (self.ymax - self.ymin) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn svg_header(title: &str) -> String {
    format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="28" font-family="sans-serif" font-size="17" text-anchor="middle">{}</text>
"##,
        WIDTH / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes_and_grid(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    for tx in ticks(f.xmin, f.xmax) {
        let px = f.px(tx);
        writeln!(
            out,
            r##"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{y1:.1}" stroke="#dddddd" stroke-width="1"/>
<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"##,
            y0 + 18.0,
            fmt_tick(tx)
        )
        .unwrap();
    }
    for ty in ticks(f.ymin, f.ymax) {
        let py = f.py(ty);
        writeln!(
            out,
            r##"<line x1="{x0:.1}" y1="{py:.1}" x2="{x1:.1}" y2="{py:.1}" stroke="#dddddd" stroke-width="1"/>
<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"##,
            x0 - 6.0,
            py + 4.0,
            fmt_tick(ty)
        )
        .unwrap();
    }
    writeln!(
        out,
        r##"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333333" stroke-width="1"/>
<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>
<text x="20" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"##,
        x1 - x0,
        y0 - y1,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    )
    .unwrap();
}

fn polyline(out: &mut String, f: &Frame, s: &Series) {
    if s.points.is_empty() {
        return;
    }
    let mut pts = String::new();
    for &(x, y) in &s.points {
        write!(pts, "{:.2},{:.2} ", f.px(x), f.py(y)).unwrap();
    }
    let dash = if s.dashed { r##" stroke-dasharray="6 4""## } else { "" };
    writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"##,
        pts.trim_end(),
        s.color
    )
    .unwrap();
}

fn legend(out: &mut String, series: &[Series]) {
    let x = WIDTH - MARGIN_RIGHT - 170.0;
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + i as f64 * 18.0;
        let dash = if s.dashed { r##" stroke-dasharray="6 4""## } else { "" };
        writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"{dash}/>
<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"##,
            x + 28.0,
            s.color,
            x + 34.0,
            y + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }
}

/// Time-series panel: one polyline per series over a padded data frame.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (xmin, xmax, ymin, ymax) = data_bounds(series, &[]);
    let (xmin, xmax) = pad_range(xmin, xmax);
    let (ymin, ymax) = pad_range(ymin, ymax);
    let f = Frame { xmin, xmax, ymin, ymax };
    let mut out = svg_header(title);
    axes_and_grid(&mut out, &f, x_label, y_label);
    for s in series {
        polyline(&mut out, &f, s);
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

/// Top-down equal-aspect chart: agent paths plus circle marks (target
/// and estimate outlines). End points get a filled dot.
pub fn path_chart(title: &str, series: &[Series], circles: &[CircleMark]) -> String {
    let mut extra = Vec::new();
    for c in circles {
        extra.push((c.cx - c.r, c.cy - c.r));
        extra.push((c.cx + c.r, c.cy + c.r));
    }
    let (xmin, xmax, ymin, ymax) = data_bounds(series, &extra);
    let (xmin, xmax) = pad_range(xmin, xmax);
    let (ymin, ymax) = pad_range(ymin, ymax);

    // equal aspect: widen the shorter side around its midpoint
    let avail_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let avail_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let scale = ((xmax - xmin) / avail_w).max((ymax - ymin) / avail_h);
    let (xmid, ymid) = ((xmin + xmax) / 2.0, (ymin + ymax) / 2.0);
    let f = Frame {
        xmin: xmid - scale * avail_w / 2.0,
        xmax: xmid + scale * avail_w / 2.0,
        ymin: ymid - scale * avail_h / 2.0,
        ymax: ymid + scale * avail_h / 2.0,
    };

    let mut out = svg_header(title);
    axes_and_grid(&mut out, &f, "x [field units]", "y [field units]");
    for c in circles {
        let dash = if c.dashed { r##" stroke-dasharray="6 4""## } else { "" };
        let pr = c.r / scale;
        writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{pr:.2}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"##,
            f.px(c.cx),
            f.py(c.cy),
            c.color
        )
        .unwrap();
    }
    for s in series {
        polyline(&mut out, &f, s);
        if let Some(&(x, y)) = s.points.last() {
            writeln!(
                out,
                r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"/>"##,
                f.px(x),
                f.py(y),
                s.color
            )
            .unwrap();
        }
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_is_self_contained_svg() {
        let s = [
            Series::new("a", PALETTE[0], vec![(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)]),
            Series::new("b", PALETTE[1], vec![(0.0, 0.0), (2.0, 3.0)]).dashed(),
        ];
        let svg = line_chart("demo", "t", "value", &s);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains(r##"viewBox="0 0 800 600""##));
        assert!(svg.contains("polyline"));
        assert!(!svg.contains("href"), "must not reference external assets");
    }

    #[test]
    fn degenerate_ranges_do_not_break() {
        let s = [Series::new("flat", PALETTE[0], vec![(0.0, 5.0), (1.0, 5.0)])];
        let svg = line_chart("flat", "t", "v", &s);
        assert!(svg.contains("polyline"));
        let svg = line_chart("empty", "t", "v", &[]);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn path_chart_keeps_equal_aspect() {
        let s = [Series::new("path", PALETTE[0], vec![(0.0, 0.0), (10.0, 0.1)])];
        let circles = [CircleMark { cx: 5.0, cy: 0.0, r: 2.0, color: PALETTE[1], dashed: true }];
        let svg = path_chart("paths", &s, &circles);
        assert!(svg.contains("<circle"));
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn tick_steps_are_nice() {
        for range in [0.037, 1.0, 9.4, 123.0, 5e4] {
            let step = nice_step(range);
            let count = (range / step).floor();
            assert!((1.0..=6.0).contains(&count), "range {range} step {step}");
        }
    }
}
