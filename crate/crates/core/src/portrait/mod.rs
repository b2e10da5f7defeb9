//! Phase portraits of the reduced averaged system in the `(φ, p_φ)` plane.

mod contour;
mod svg;

pub use contour::{extract_contours, march, LevelContours, Polyline};
pub use svg::render_svg;

use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

use crate::dynamics::AveragedParams;
use crate::error::{Error, Result};
use crate::potential::{find_equilibria, v_bar, Equilibrium, EquilibriumKind};

/// Default grid resolution along each axis.
pub const DEFAULT_RESOLUTION: usize = 512;

/// Distance kept from the poles when the centrifugal barrier diverges there.
pub const POLE_INSET: f64 = 0.02;

/// Number of evenly spaced energy levels drawn besides the separatrix.
pub const AUTO_LEVELS: usize = 8;

/// `H(φ_i, p_j) = p_j²/2 + V(φ_i)` sampled on a rectangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PortraitGrid {
    pub params: AveragedParams,
    /// Sample positions along φ (`nx` of them).
    pub phi: Vec<f64>,
    /// Sample positions along `p_φ` (`ny` of them), symmetric about zero.
    pub p: Vec<f64>,
    /// `values[i][j]` is the energy at `(phi[i], p[j])`.
    pub values: Vec<Vec<f64>>,
    pub levels: Vec<f64>,
    /// Energy of the saddle, when there is one.
    pub separatrix: Option<f64>,
    pub equilibria: Vec<Equilibrium>,
}

impl PortraitGrid {
    pub fn nx(&self) -> usize {
        self.phi.len()
    }

    pub fn ny(&self) -> usize {
        self.p.len()
    }

    pub fn phi_range(&self) -> (f64, f64) {
        (self.phi[0], self.phi[self.phi.len() - 1])
    }

    pub fn p_max(&self) -> f64 {
        self.p[self.p.len() - 1]
    }

    /// Header row of `p_φ` samples, then one row per φ sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "phi")?;
        for p in &self.p {
            write!(w, ",{p}")?;
        }
        writeln!(w)?;
        for (phi, row) in self.phi.iter().zip(&self.values) {
            write!(w, "{phi}")?;
            for v in row {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Default φ window: the closed interval when `B = 0`, otherwise inset from the poles.
pub fn default_phi_range(ap: &AveragedParams) -> (f64, f64) {
    if ap.b == 0.0 {
        (0.0, PI)
    } else {
        (POLE_INSET, PI - POLE_INSET)
    }
}

/// Grid over the default φ window. `p_max = None` picks
/// `√(2 (V_max − V_min))` over the window.
pub fn build_grid(
    ap: &AveragedParams,
    nx: usize,
    ny: usize,
    p_max: Option<f64>,
) -> Result<PortraitGrid> {
    build_grid_in(ap, nx, ny, p_max, default_phi_range(ap))
}

pub fn build_grid_in(
    ap: &AveragedParams,
    nx: usize,
    ny: usize,
    p_max: Option<f64>,
    phi_range: (f64, f64),
) -> Result<PortraitGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2x2 samples, got {nx}x{ny}"
        )));
    }
    let (lo, hi) = phi_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("bad phi window ({lo}, {hi})")));
    }
    let phi: Vec<f64> = (0..nx)
        .map(|i| lo + (hi - lo) * i as f64 / (nx - 1) as f64)
        .collect();
    let potential: Vec<f64> = phi.iter().map(|&x| v_bar(x, ap)).collect::<Result<_>>()?;
    let v_min = potential.iter().copied().fold(f64::INFINITY, f64::min);
    let v_max = potential.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let p_max = match p_max {
        Some(p) if p.is_finite() && p > 0.0 => p,
        Some(p) => {
            return Err(Error::InvalidInput(format!(
                "p_max must be positive, got {p}"
            )))
        }
        None => {
            let span = (2.0 * (v_max - v_min)).sqrt();
            if span > 0.0 {
                span
            } else {
                1.0
            }
        }
    };
    // integer numerators keep p[ny-1-j] == -p[j] exactly
    let denom = (ny - 1) as f64;
    let p: Vec<f64> = (0..ny)
        .map(|j| p_max * (2.0 * j as f64 - denom) / denom)
        .collect();

    let values: Vec<Vec<f64>> = potential
        .par_iter()
        .map(|&v| p.iter().map(|&pj| 0.5 * pj * pj + v).collect())
        .collect();

    let in_window = |x: f64| x >= lo - 1e-12 && x <= hi + 1e-12;
    let equilibria: Vec<Equilibrium> = find_equilibria(ap);
    let saddles: Vec<f64> = equilibria
        .iter()
        .filter(|e| e.kind == EquilibriumKind::Unstable && in_window(e.phi))
        .map(|e| e.v_value)
        .collect();

    let mut levels: Vec<f64> = (1..=AUTO_LEVELS)
        .map(|i| v_min + (v_max - v_min) * i as f64 / (AUTO_LEVELS + 1) as f64)
        .collect();
    levels.extend(&saddles);
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    Ok(PortraitGrid {
        params: *ap,
        phi,
        p,
        values,
        levels,
        separatrix: saddles.first().copied(),
        equilibria,
    })
}
