//! Effective potential of the reduced averaged system and its bifurcations.
//!
//! In units m = l = g = 1 the reduced averaged Hamiltonian is
//! `p_φ²/2 + V(φ)` with
//!
//! ```text
//! V(φ) = B / (2 sin²φ) + (A - C) sin²φ / 2 - cos φ
//! ```
//!
//! `A` and `C` only ever enter through `A - C`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::dynamics::AveragedParams;
use crate::error::{Error, Result};

/// `|sin φ|` below this counts as the vertical axis.
pub const POLE_EPS: f64 = 1e-15;

/// Number of grid intervals used to bracket critical points.
pub const SCAN_INTERVALS: usize = 4096;

/// Distance of the scan window from the poles when `B > 0`.
pub const SCAN_INSET: f64 = 1e-6;

/// Bisection stops once the bracket is narrower than this.
pub const BISECT_WIDTH: f64 = 1e-12;

/// Roots closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-9;

/// Relative tolerance on `d²V/dφ²` below which an equilibrium is degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-8;

/// Relative tolerance on `dV/dφ` at an extremum of `dV/dφ` for it to count as a
/// tangential (double) root.
pub const TANGENCY_REL_TOL: f64 = 1e-10;

fn pole_guard(phi: f64, b: f64) -> Result<(f64, f64)> {
    let (s, c) = phi.sin_cos();
    if b != 0.0 && s.abs() < POLE_EPS {
        return Err(Error::Singular { phi });
    }
    Ok((s, c))
}

/// Effective potential `V(φ)`.
pub fn v_bar(phi: f64, ap: &AveragedParams) -> Result<f64> {
    let (s, c) = pole_guard(phi, ap.b)?;
    let k = ap.a_minus_c();
    let barrier = if ap.b == 0.0 {
        0.0
    } else {
        ap.b / (2.0 * s * s)
    };
    Ok(barrier + 0.5 * k * s * s - c)
}

/// `dV/dφ`.
pub fn dv(phi: f64, ap: &AveragedParams) -> Result<f64> {
    let (s, c) = pole_guard(phi, ap.b)?;
    let k = ap.a_minus_c();
    let barrier = if ap.b == 0.0 {
        0.0
    } else {
        -ap.b * c / (s * s * s)
    };
    Ok(barrier + k * s * c + s)
}

/// `d²V/dφ²`.
pub fn d2v(phi: f64, ap: &AveragedParams) -> Result<f64> {
    let (s, c) = pole_guard(phi, ap.b)?;
    let k = ap.a_minus_c();
    let barrier = if ap.b == 0.0 {
        0.0
    } else {
        let s2 = s * s;
        3.0 * ap.b * c * c / (s2 * s2) + ap.b / s2
    };
    Ok(barrier + k * (c * c - s * s) + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub phi: f64,
    pub kind: EquilibriumKind,
    #[serde(rename = "v")]
    pub v_value: f64,
    #[serde(rename = "d2v")]
    pub second_derivative: f64,
}

/// Scale applied to the relative tolerances so they stay meaningful for large
/// parameters.
pub fn parameter_scale(ap: &AveragedParams) -> f64 {
    1f64.max(ap.a_minus_c().abs()).max(ap.b)
}

fn classify(d2: f64, ap: &AveragedParams) -> EquilibriumKind {
    if d2.abs() < DEGENERACY_REL_TOL * parameter_scale(ap) {
        EquilibriumKind::Degenerate
    } else if d2 > 0.0 {
        EquilibriumKind::Stable
    } else {
        EquilibriumKind::Unstable
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    while hi - lo >= BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn make_equilibrium(phi: f64, ap: &AveragedParams, d2: f64) -> Equilibrium {
    let v_value = v_bar(phi, ap).unwrap_or(f64::NAN);
    Equilibrium {
        phi,
        kind: classify(d2, ap),
        v_value,
        second_derivative: d2,
    }
}

/// All critical points of `V` on `[0, π]`, sorted by `φ`.
///
/// For `B > 0` the interior is scanned for sign changes of `dV/dφ`, each
/// bracket bisected, and extrema of `dV/dφ` that touch zero without crossing
/// are reported as degenerate equilibria. For `B = 0` the poles are
/// equilibria as well and the interior roots are known in closed form.
pub fn find_equilibria(ap: &AveragedParams) -> Vec<Equilibrium> {
    let mut out = if ap.b == 0.0 {
        planar_equilibria(ap)
    } else {
        scan_equilibria(ap)
    };
    out.sort_by(|a, b| a.phi.total_cmp(&b.phi));
    out
}

fn planar_equilibria(ap: &AveragedParams) -> Vec<Equilibrium> {
    let k = ap.a_minus_c();
    let mut roots = vec![0.0, PI];
    if k.abs() >= 1.0 {
        let phi = (-1.0 / k).acos();
        if roots.iter().all(|r| (r - phi).abs() > DEDUP_TOL) {
            roots.push(phi);
        }
    }
    roots
        .into_iter()
        .map(|phi| {
            // at the poles use the one-sided limits k + 1 and k - 1
            let d2 = if phi == 0.0 {
                k + 1.0
            } else if phi == PI {
                k - 1.0
            } else {
                let (s, c) = phi.sin_cos();
                k * (c * c - s * s) + c
            };
            make_equilibrium(phi, ap, d2)
        })
        .collect()
}

fn scan_equilibria(ap: &AveragedParams) -> Vec<Equilibrium> {
    let lo = SCAN_INSET;
    let hi = PI - SCAN_INSET;
    let step = (hi - lo) / SCAN_INTERVALS as f64;
    let nodes: Vec<f64> = (0..=SCAN_INTERVALS).map(|i| lo + i as f64 * step).collect();
    let first = |phi: f64| dv(phi, ap).unwrap_or(f64::NAN);
    let second = |phi: f64| d2v(phi, ap).unwrap_or(f64::NAN);
    let d1: Vec<f64> = nodes.iter().map(|&p| first(p)).collect();
    let d2: Vec<f64> = nodes.iter().map(|&p| second(p)).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..SCAN_INTERVALS {
        let (a, b) = (d1[i], d1[i + 1]);
        if a == 0.0 {
            roots.push(nodes[i]);
        } else if a * b < 0.0 {
            roots.push(bisect(first, nodes[i], nodes[i + 1]));
        }
    }
    if d1[SCAN_INTERVALS] == 0.0 {
        roots.push(nodes[SCAN_INTERVALS]);
    }

    // double roots: dV/dφ reaches zero at one of its own extrema
    let tangency_tol = TANGENCY_REL_TOL * parameter_scale(ap);
    let mut tangents = Vec::new();
    for i in 0..SCAN_INTERVALS {
        if d2[i] * d2[i + 1] < 0.0 || d2[i + 1] == 0.0 {
            let phi_e = if d2[i + 1] == 0.0 {
                nodes[i + 1]
            } else {
                bisect(second, nodes[i], nodes[i + 1])
            };
            if first(phi_e).abs() <= tangency_tol && roots.iter().all(|r| (r - phi_e).abs() > step)
            {
                tangents.push(phi_e);
            }
        }
    }

    let mut all: Vec<(f64, bool)> = roots
        .into_iter()
        .map(|r| (r, false))
        .chain(tangents.into_iter().map(|r| (r, true)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, bool)> = Vec::with_capacity(all.len());
    for (phi, tangent) in all {
        match merged.last_mut() {
            Some(last) if (phi - last.0).abs() <= DEDUP_TOL => last.1 |= tangent,
            _ => merged.push((phi, tangent)),
        }
    }

    merged
        .into_iter()
        .map(|(phi, tangent)| {
            let mut eq = make_equilibrium(phi, ap, second(phi));
            if tangent {
                eq.kind = EquilibriumKind::Degenerate;
            }
            eq
        })
        .collect()
}

/// A point of the critical curve in the `(A - C, B)` plane together with its
/// curve parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub phi: f64,
    pub a_minus_c: f64,
    pub b: f64,
}

impl GammaPoint {
    pub fn params(&self) -> AveragedParams {
        AveragedParams::from_difference(self.a_minus_c, self.b)
    }
}

/// Critical-curve point where `V` has a degenerate critical point at `φ`.
pub fn gamma_point(phi: f64) -> Result<GammaPoint> {
    if !(phi > FRAC_PI_2 && phi <= PI) {
        return Err(Error::Domain(format!(
            "critical-curve parameter must lie in (pi/2, pi], got {phi}"
        )));
    }
    let (s, c) = phi.sin_cos();
    let c3 = c * c * c;
    let a_minus_c = -(3.0 * c * c + 1.0) / (4.0 * c3);
    let b = -0.25 * s.powi(6) / c3;
    Ok(GammaPoint { phi, a_minus_c, b })
}

pub fn gamma_curve(phi_values: &[f64]) -> Result<Vec<GammaPoint>> {
    phi_values.iter().map(|&phi| gamma_point(phi)).collect()
}

/// `n` curve parameters evenly spaced on `(π/2 + offset, π]`, ending at `π`.
pub fn gamma_parameters(n: usize, offset: f64) -> Vec<f64> {
    let lo = FRAC_PI_2 + offset;
    match n {
        0 => Vec::new(),
        1 => vec![PI],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    PI
                } else {
                    lo + (PI - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainLabel {
    /// One equilibrium.
    I,
    /// Three equilibria.
    II,
    /// A degenerate equilibrium is present: the parameters lie on the critical curve.
    #[serde(rename = "boundary")]
    Boundary,
}

impl std::fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainLabel::I => "I",
            DomainLabel::II => "II",
            DomainLabel::Boundary => "boundary",
        })
    }
}

/// Domain of the `(A - C, B)` plane by direct equilibrium count. Requires `B > 0`.
pub fn classify_domain(ap: &AveragedParams) -> Result<DomainLabel> {
    if ap.b.is_nan() || ap.b <= 0.0 {
        return Err(Error::Domain(format!(
            "domain classification needs B > 0, got {}",
            ap.b
        )));
    }
    label_from_equilibria(&find_equilibria(ap))
}

pub fn label_from_equilibria(eqs: &[Equilibrium]) -> Result<DomainLabel> {
    if eqs.iter().any(|e| e.kind == EquilibriumKind::Degenerate) {
        return Ok(DomainLabel::Boundary);
    }
    match eqs.len() {
        1 => Ok(DomainLabel::I),
        3 => Ok(DomainLabel::II),
        count => Err(Error::InconsistentCount { count }),
    }
}
