//! Periodic pivot excitations and their averaged velocity moments.
//!
//! Each axis of the suspension point follows `epsilon * f(omega * t / epsilon)`
//! where `f` is a zero-mean, 2π-periodic finite Fourier series. Velocities are
//! therefore `omega * f'(s)` and do not depend on `epsilon`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

/// Default tolerance for [`check_symmetry`].
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

/// Number of Simpson intervals used by the quadrature oracle.
pub const QUADRATURE_NODES: usize = 4096;

/// Zero-mean 2π-periodic function `Σ a_k cos(k s) + b_k sin(k s)`, k = 1..K.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSeries {
    #[serde(rename = "cos", default)]
    pub cosine_coeffs: Vec<f64>,
    #[serde(rename = "sin", default)]
    pub sine_coeffs: Vec<f64>,
}

impl HarmonicSeries {
    pub fn new(cosine_coeffs: Vec<f64>, sine_coeffs: Vec<f64>) -> Self {
        Self {
            cosine_coeffs,
            sine_coeffs,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Single-harmonic `cos(k s)`.
    pub fn cos(k: usize) -> Self {
        let mut c = vec![0.0; k];
        c[k - 1] = 1.0;
        Self::new(c, Vec::new())
    }

    /// Single-harmonic `sin(k s)`.
    pub fn sin(k: usize) -> Self {
        let mut s = vec![0.0; k];
        s[k - 1] = 1.0;
        Self::new(Vec::new(), s)
    }

    /// Highest harmonic index carried by either coefficient list.
    pub fn order(&self) -> usize {
        self.cosine_coeffs.len().max(self.sine_coeffs.len())
    }

    fn coeff(&self, k: usize) -> (f64, f64) {
        let a = self.cosine_coeffs.get(k - 1).copied().unwrap_or(0.0);
        let b = self.sine_coeffs.get(k - 1).copied().unwrap_or(0.0);
        (a, b)
    }

    pub fn value(&self, s: f64) -> f64 {
        (1..=self.order())
            .map(|k| {
                let (a, b) = self.coeff(k);
                let ks = k as f64 * s;
                a * ks.cos() + b * ks.sin()
            })
            .sum()
    }

    /// Derivative with respect to the phase `s`.
    pub fn derivative(&self, s: f64) -> f64 {
        (1..=self.order())
            .map(|k| {
                let (a, b) = self.coeff(k);
                let kf = k as f64;
                let ks = kf * s;
                kf * (b * ks.cos() - a * ks.sin())
            })
            .sum()
    }

    /// `(1/2π)∫ f'(s) g'(s) ds` in closed form.
    pub fn derivative_inner(&self, other: &HarmonicSeries) -> f64 {
        let k_max = self.order().min(other.order());
        0.5 * (1..=k_max)
            .map(|k| {
                let (a1, b1) = self.coeff(k);
                let (a2, b2) = other.coeff(k);
                let kf = k as f64;
                kf * kf * (a1 * a2 + b1 * b2)
            })
            .sum::<f64>()
    }

    fn validate(&self, axis: &str) -> Result<()> {
        if self
            .cosine_coeffs
            .iter()
            .chain(&self.sine_coeffs)
            .all(|c| c.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "non-finite coefficient on axis {axis}"
            )))
        }
    }
}

/// Three-axis periodic pivot motion. Axis order throughout is (τ, η, ξ):
/// two horizontal axes, then the vertical one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub epsilon: f64,
    pub omega: f64,
    #[serde(default)]
    pub tau: HarmonicSeries,
    #[serde(default)]
    pub eta: HarmonicSeries,
    #[serde(default)]
    pub xi: HarmonicSeries,
}

impl Excitation {
    pub fn new(
        epsilon: f64,
        omega: f64,
        tau: HarmonicSeries,
        eta: HarmonicSeries,
        xi: HarmonicSeries,
    ) -> Result<Self> {
        let e = Self {
            epsilon,
            omega,
            tau,
            eta,
            xi,
        };
        e.validate()?;
        Ok(e)
    }

    /// No pivot motion at all.
    pub fn zero(epsilon: f64, omega: f64) -> Result<Self> {
        Self::new(
            epsilon,
            omega,
            HarmonicSeries::zero(),
            HarmonicSeries::zero(),
            HarmonicSeries::zero(),
        )
    }

    /// Purely vertical pivot motion `xi`.
    pub fn vertical(epsilon: f64, omega: f64, xi: HarmonicSeries) -> Result<Self> {
        Self::new(
            epsilon,
            omega,
            HarmonicSeries::zero(),
            HarmonicSeries::zero(),
            xi,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidInput(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        self.tau.validate("tau")?;
        self.eta.validate("eta")?;
        self.xi.validate("xi")
    }

    /// Same shape with a different amplitude scale.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let mut e = self.clone();
        e.epsilon = epsilon;
        e.validate()?;
        Ok(e)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let e: Excitation = serde_json::from_str(s)?;
        e.validate()?;
        Ok(e)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Fast phase `s = omega * t / epsilon`.
    pub fn phase(&self, t: f64) -> f64 {
        self.omega * t / self.epsilon
    }

    /// Fast period `2π epsilon / omega` in time units.
    pub fn fast_period(&self) -> f64 {
        2.0 * PI * self.epsilon / self.omega
    }

    fn axes(&self) -> [&HarmonicSeries; 3] {
        [&self.tau, &self.eta, &self.xi]
    }
}

/// Pivot displacement `(τ, η, ξ)` at time `t`.
pub fn eval_displacement(e: &Excitation, t: f64) -> [f64; 3] {
    let s = e.phase(t);
    e.axes().map(|f| e.epsilon * f.value(s))
}

/// Pivot velocity `(τ̇, η̇, ξ̇)` at time `t`.
pub fn eval_velocity(e: &Excitation, t: f64) -> [f64; 3] {
    let s = e.phase(t);
    e.axes().map(|f| e.omega * f.derivative(s))
}

/// Time averages of pairwise products of pivot velocities, axis order (τ, η, ξ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentMatrix {
    pub m: [[f64; 3]; 3],
}

impl MomentMatrix {
    pub fn zero() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    pub fn tau_tau(&self) -> f64 {
        self.m[0][0]
    }
    pub fn eta_eta(&self) -> f64 {
        self.m[1][1]
    }
    pub fn xi_xi(&self) -> f64 {
        self.m[2][2]
    }
    pub fn tau_eta(&self) -> f64 {
        self.m[0][1]
    }
    pub fn tau_xi(&self) -> f64 {
        self.m[0][2]
    }
    pub fn eta_xi(&self) -> f64 {
        self.m[1][2]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let m = Matrix3::from_fn(|i, j| self.m[i][j]);
        let mut ev: [f64; 3] = m.symmetric_eigenvalues().into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Gram-matrix check: no eigenvalue below `-1e-12 * trace`.
    pub fn is_positive_semidefinite(&self) -> bool {
        let floor = -1e-12 * self.trace().abs().max(f64::MIN_POSITIVE);
        self.eigenvalues()[0] >= floor
    }
}

/// Closed-form velocity moments `ω²/2 · Σ k² (a_k a'_k + b_k b'_k)`.
pub fn velocity_moments(e: &Excitation) -> MomentMatrix {
    let axes = e.axes();
    let w2 = e.omega * e.omega;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = w2 * axes[i].derivative_inner(axes[j]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    MomentMatrix { m }
}

/// Composite Simpson rule for a 2π-periodic integrand averaged over one period.
pub fn periodic_mean_simpson<F: Fn(f64) -> f64>(f: F, intervals: usize) -> f64 {
    assert!(
        intervals >= 2 && intervals.is_multiple_of(2),
        "Simpson needs an even interval count"
    );
    let h = 2.0 * PI / intervals as f64;
    let mut acc = f(0.0) + f(2.0 * PI);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0 / (2.0 * PI)
}

/// Velocity moments by quadrature over one fast period. Used as an oracle for
/// [`velocity_moments`].
pub fn velocity_moments_quadrature(e: &Excitation) -> MomentMatrix {
    let axes = e.axes();
    let w2 = e.omega * e.omega;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let (fi, fj) = (axes[i], axes[j]);
            let v = w2
                * periodic_mean_simpson(|s| fi.derivative(s) * fj.derivative(s), QUADRATURE_NODES);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    MomentMatrix { m }
}

/// Residuals of the conditions under which the averaged Hamiltonian is
/// independent of the azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub horizontal_imbalance: f64,
    pub tau_eta: f64,
    pub tau_xi: f64,
    pub eta_xi: f64,
    pub tol: f64,
    pub passed: bool,
}

impl SymmetryReport {
    pub fn max_residual(&self) -> f64 {
        self.horizontal_imbalance
            .max(self.tau_eta)
            .max(self.tau_xi)
            .max(self.eta_xi)
    }
}

pub fn check_symmetry(mm: &MomentMatrix, tol: f64) -> SymmetryReport {
    let horizontal_imbalance = (mm.tau_tau() - mm.eta_eta()).abs();
    let tau_eta = mm.tau_eta().abs();
    let tau_xi = mm.tau_xi().abs();
    let eta_xi = mm.eta_xi().abs();
    let passed = [horizontal_imbalance, tau_eta, tau_xi, eta_xi]
        .iter()
        .all(|&r| r <= tol);
    SymmetryReport {
        horizontal_imbalance,
        tau_eta,
        tau_xi,
        eta_xi,
        tol,
        passed,
    }
}
