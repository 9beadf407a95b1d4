//! Minimal self-contained SVG plots. Coordinates are printed with fixed
//! precision so output bytes depend only on the data.

use std::fmt::Write;

use crate::spectrum::{ModeBranches, Peak, Spectrum};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let (x0, x1) = if x1 > x0 {
            (x0, x1)
        } else {
            (x0 - 1.0, x0 + 1.0)
        };
        let (y0, y1) = if y1 > y0 {
            (y0, y1)
        } else {
            (y0 - 1.0, y0 + 1.0)
        };
        Frame { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn axes(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for (v, anchor) in [(f.x0, "start"), (f.x1, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="{anchor}">{}</text>"#,
            f.x(v),
            HEIGHT - MARGIN + 15.0,
            tick(v)
        );
    }
    for v in [f.y0, f.y1] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            f.y(v) + 4.0,
            tick(v)
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Transmission versus detuning (MHz) with detected peaks marked.
pub fn spectrum_plot(spectrum: &Spectrum, peaks: &[Peak], title: &str) -> String {
    let mhz: Vec<f64> = spectrum.detuning_hz.iter().map(|f| f / 1e6).collect();
    let ymax = spectrum.max().max(1e-12);
    let frame = Frame::new(mhz[0], mhz[mhz.len() - 1], 0.0, ymax * 1.05);

    let mut out = String::new();
    header(&mut out, title, "detuning (MHz)", "transmission");
    axes(&mut out, &frame);
    out.push_str(r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1" points=""##);
    for (i, (&x, &y)) in mhz.iter().zip(&spectrum.transmission).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", frame.x(x), frame.y(y));
    }
    out.push_str("\"/>\n");
    for p in peaks {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="#d62728"/>"##,
            frame.x(p.position_hz / 1e6),
            frame.y(p.height)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One labelled set of branches for the crossing diagram.
pub struct CrossingSeries<'a> {
    pub label: String,
    pub modes: &'a [ModeBranches],
}

/// Resonance position (in FSR units) versus longitudinal mode index, one
/// colour per ladder point. Split modes show both branches joined by a line.
pub fn crossing_plot(series: &[CrossingSeries<'_>], fsr_hz: f64) -> String {
    let mut m_lo = 0i64;
    let mut m_hi = 0i64;
    let mut y_abs: f64 = 1.0;
    for s in series {
        for b in s.modes {
            for p in [&b.lower, &b.upper, &b.unsplit].into_iter().flatten() {
                m_lo = m_lo.min(b.m);
                m_hi = m_hi.max(b.m);
                y_abs = y_abs.max((p.position_hz / fsr_hz).abs());
            }
        }
    }
    let frame = Frame::new(
        m_lo as f64 - 0.5,
        m_hi as f64 + 0.5,
        -y_abs * 1.05,
        y_abs * 1.05,
    );

    let mut out = String::new();
    header(
        &mut out,
        "resonance branches",
        "mode index m",
        "position (FSR)",
    );
    axes(&mut out, &frame);
    // uncoupled comb Δ = m·FSR for reference
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999" stroke-dasharray="4 3"/>"##,
        frame.x(frame.x0),
        frame.y(frame.x0),
        frame.x(frame.x1),
        frame.y(frame.x1)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for b in s.modes {
            let x = frame.x(b.m as f64);
            if let (Some(lo), Some(hi)) = (&b.lower, &b.upper) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-opacity="0.4"/>"#,
                    frame.y(lo.position_hz / fsr_hz),
                    frame.y(hi.position_hz / fsr_hz)
                );
            }
            for p in [&b.lower, &b.upper, &b.unsplit].into_iter().flatten() {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    frame.y(p.position_hz / fsr_hz)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * k as f64,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
