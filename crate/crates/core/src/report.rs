//! Trajectory serialization: a flat CSV table and two SVG line charts.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::geometry::Point2;
use crate::sim::{StageRecord, TrajectoryLog};

pub const CSV_HEADER: &str = "stage,omega_r_x,omega_r_y,iota_x,iota_y,e_x,e_y,u_r_x,u_r_y,u_p_x,u_p_y,s1,s2,s3,r1,r2,r3,plausible,illusion";

/// Formats like C's `%.12g`: twelve significant digits, trailing zeros
/// trimmed, exponent form outside `1e-5 ≤ |v| < 1e12`.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn csv_row(r: &StageRecord) -> String {
    let f = format_sig12;
    let opt = |p: Option<Point2>| match p {
        Some(p) => (f(p.x), f(p.y)),
        None => (String::new(), String::new()),
    };
    let (ix, iy) = opt(r.iota.point());
    let (ex, ey) = opt(r.e);
    let fields = [
        r.stage.to_string(),
        f(r.omega_r.x),
        f(r.omega_r.y),
        ix,
        iy,
        ex,
        ey,
        f(r.u_r.x),
        f(r.u_r.y),
        f(r.u_p.x),
        f(r.u_p.y),
        f(r.intensities[0]),
        f(r.intensities[1]),
        f(r.intensities[2]),
        f(r.observation[0]),
        f(r.observation[1]),
        f(r.observation[2]),
        u8::from(r.plausible).to_string(),
        u8::from(r.illusion).to_string(),
    ];
    fields.join(",")
}

pub fn write_csv<W: Write>(log: &TrajectoryLog, mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &log.records {
        writeln!(out, "{}", csv_row(r))?;
    }
    out.flush()
}

pub fn csv_string(log: &TrajectoryLog) -> String {
    let mut buf = Vec::new();
    write_csv(log, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

// ---------------------------------------------------------------------------
// SVG

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(series: &[Series<'_>], equal_aspect: bool) -> Frame {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for (x, y) in series.iter().flat_map(|s| s.points.iter().copied()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            return Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        }
        let pad = |lo: &mut f64, hi: &mut f64| {
            let span = (*hi - *lo).max(1e-9);
            *lo -= 0.05 * span;
            *hi += 0.05 * span;
        };
        pad(&mut f.x0, &mut f.x1);
        pad(&mut f.y0, &mut f.y1);
        if equal_aspect {
            let sx = (f.x1 - f.x0) / (WIDTH - 2.0 * MARGIN);
            let sy = (f.y1 - f.y0) / (HEIGHT - 2.0 * MARGIN);
            let s = sx.max(sy);
            let (cx, cy) = (0.5 * (f.x0 + f.x1), 0.5 * (f.y0 + f.y1));
            let (hw, hh) = (0.5 * s * (WIDTH - 2.0 * MARGIN), 0.5 * s * (HEIGHT - 2.0 * MARGIN));
            f = Frame { x0: cx - hw, x1: cx + hw, y0: cy - hh, y1: cy + hh };
        }
        f
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    }
}

fn chart(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>], equal_aspect: bool) -> String {
    let frame = Frame::fit(series, equal_aspect);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    let (left, bottom) = (MARGIN, HEIGHT - MARGIN);
    let (right, top) = (WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        right - left,
        bottom - top
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = frame.x0 + t * (frame.x1 - frame.x0);
        let yv = frame.y0 + t * (frame.y1 - frame.y0);
        let (px, _) = frame.map(xv, frame.y0);
        let (_, py) = frame.map(frame.x0, yv);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{top}" x2="{px:.2}" y2="{bottom}" stroke="#dddddd" stroke-width="1"/>
<text x="{px:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>
<line x1="{left}" y1="{py:.2}" x2="{right}" y2="{py:.2}" stroke="#dddddd" stroke-width="1"/>
<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"##,
            bottom + 16.0,
            tick(xv),
            left - 4.0,
            py + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>
<text x="16" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (k, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| {
                let (px, py) = frame.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            s.color,
            path.join(" ")
        );
        let ly = top + 16.0 + 18.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>
<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            right - 120.0,
            right - 96.0,
            s.color,
            right - 90.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

/// True position and estimate paths in the plane.
pub fn trajectory_svg(log: &TrajectoryLog) -> String {
    let truth = Series {
        label: "position",
        color: "#1f77b4",
        points: log.records.iter().map(|r| (r.omega_r.x, r.omega_r.y)).collect(),
    };
    let estimate = Series {
        label: "estimate",
        color: "#ff7f0e",
        points: log
            .records
            .iter()
            .filter_map(|r| r.iota.point())
            .map(|p| (p.x, p.y))
            .collect(),
    };
    chart("Receiver position and estimate", "x", "y", &[truth, estimate], true)
}

/// Producer action components against stage.
pub fn actions_svg(log: &TrajectoryLog) -> String {
    let acted = &log.records[..log.records.len().saturating_sub(1)];
    let comp = |f: fn(&StageRecord) -> f64| acted.iter().map(|r| (r.stage as f64, f(r))).collect();
    let ux = Series {
        label: "u_p x",
        color: "#1f77b4",
        points: comp(|r| r.u_p.x),
    };
    let uy = Series {
        label: "u_p y",
        color: "#ff7f0e",
        points: comp(|r| r.u_p.y),
    };
    chart("Producer actions", "stage", "u_p", &[ux, uy], false)
}
