use std::fmt::Write;

use super::{LevelContours, PortraitGrid};
use crate::potential::EquilibriumKind;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 550.0;
const TICKS: usize = 5;

struct Frame {
    phi_lo: f64,
    phi_hi: f64,
    p_max: f64,
}

impl Frame {
    fn x(&self, phi: f64) -> f64 {
        LEFT + (phi - self.phi_lo) / (self.phi_hi - self.phi_lo) * (RIGHT - LEFT)
    }

    fn y(&self, p: f64) -> f64 {
        BOTTOM - (p + self.p_max) / (2.0 * self.p_max) * (BOTTOM - TOP)
    }
}

/// Renders the portrait as a standalone SVG document. Output depends only on
/// the inputs.
pub fn render_svg(grid: &PortraitGrid, contours: &[LevelContours]) -> String {
    let (phi_lo, phi_hi) = grid.phi_range();
    let frame = Frame {
        phi_lo,
        phi_hi,
        p_max: grid.p_max(),
    };
    let mut s = String::new();
    // writing to a String cannot fail
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    axes(&mut s, &frame);

    let _ = writeln!(s, r#"<g class="contours" fill="none">"#);
    for lc in contours {
        let (class, stroke, width) = if lc.is_separatrix {
            ("separatrix", "#c0392b", "1.8")
        } else {
            ("level", "#2c3e50", "0.8")
        };
        for line in &lc.polylines {
            if line.len() < 2 {
                continue;
            }
            let mut d = String::new();
            for (k, &(phi, p)) in line.iter().enumerate() {
                let cmd = if k == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.2} {:.2}", frame.x(phi), frame.y(p));
            }
            let _ = writeln!(
                s,
                r#"<path class="{class}" data-level="{}" d="{d}" stroke="{stroke}" stroke-width="{width}"/>"#,
                lc.level
            );
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="equilibria">"#);
    for eq in &grid.equilibria {
        if eq.phi < phi_lo - 1e-12 || eq.phi > phi_hi + 1e-12 {
            continue;
        }
        let (cx, cy) = (frame.x(eq.phi), frame.y(0.0));
        match eq.kind {
            EquilibriumKind::Stable => {
                let _ = writeln!(
                    s,
                    r##"<circle class="center" cx="{cx:.2}" cy="{cy:.2}" r="4" fill="#000000"/>"##
                );
            }
            EquilibriumKind::Unstable | EquilibriumKind::Degenerate => {
                let class = if eq.kind == EquilibriumKind::Unstable {
                    "saddle"
                } else {
                    "degenerate"
                };
                let r = 5.0;
                let _ = writeln!(
                    s,
                    r##"<path class="{class}" d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="#000000" stroke-width="1.5"/>"##,
                    cx - r,
                    cy - r,
                    cx + r,
                    cy + r,
                    cx - r,
                    cy + r,
                    cx + r,
                    cy - r
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

fn axes(s: &mut String, f: &Frame) {
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#000000"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        s,
        r##"<line class="p-zero" x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
        y = f.y(0.0)
    );
    let _ = writeln!(
        s,
        r#"<g class="ticks" font-family="sans-serif" font-size="12">"#
    );
    for k in 0..TICKS {
        let frac = k as f64 / (TICKS - 1) as f64;
        let phi = f.phi_lo + frac * (f.phi_hi - f.phi_lo);
        let x = f.x(phi);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="#000000"/><text x="{x:.2}" y="{}" text-anchor="middle">{phi:.2}</text>"##,
            BOTTOM + 5.0,
            BOTTOM + 20.0
        );
        let p = -f.p_max + frac * 2.0 * f.p_max;
        let y = f.y(p);
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000000"/><text x="{}" y="{:.2}" text-anchor="end">{p:.2}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="590" font-family="sans-serif" font-size="14" text-anchor="middle">φ</text>"#,
        (LEFT + RIGHT) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">p_φ</text>"#,
        (TOP + BOTTOM) / 2.0
    );
}
