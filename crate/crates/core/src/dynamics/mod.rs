//! Hamiltonian dynamics of the pendulum with a moving suspension point.
//!
//! The bob sits at `(l sinφ cosα + τ, l sinφ sinα + η, −l cosφ + ξ)`. Writing
//!
//! ```text
//! u_φ = cosφ cosα τ̇ + cosφ sinα η̇ + sinφ ξ̇
//! w   = −sinα τ̇ + cosα η̇
//! ```
//!
//! the Hamiltonian, after dropping additive functions of time alone, is
//!
//! ```text
//! H = (p_φ − m l u_φ)² / (2 m l²) + (p_α / sinφ − m l w)² / (2 m l²) − m g l cosφ
//! ```

mod compare;
mod integrate;

pub use compare::{
    compare_full_averaged, compare_trajectories, convergence_sweep, successive_ratios, within_band,
    Comparison, ComparisonTrajectories, ConvergenceReport, AVERAGED_STEP, CONVERGENCE_BAND,
    NOISE_FLOOR, STEPS_PER_FAST_PERIOD,
};
pub use integrate::{hermite, integrate, write_trajectory_csv, Trajectory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excitation::{eval_velocity, Excitation, MomentMatrix};
use crate::potential::{self, POLE_EPS};

/// Canonical state. `phi` is the polar angle measured from the downward vertical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub phi: f64,
    pub alpha: f64,
    pub p_phi: f64,
    pub p_alpha: f64,
}

impl FullState {
    pub fn new(phi: f64, alpha: f64, p_phi: f64, p_alpha: f64) -> Self {
        Self {
            phi,
            alpha,
            p_phi,
            p_alpha,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.phi, self.alpha, self.p_phi, self.p_alpha]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub m: f64,
    pub l: f64,
    pub g: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, l: f64, g: f64) -> Result<Self> {
        if [m, l, g].iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(Self { m, l, g })
        } else {
            Err(Error::InvalidInput(format!(
                "m, l, g must be positive, got {m}, {l}, {g}"
            )))
        }
    }

    pub fn unit() -> Self {
        Self {
            m: 1.0,
            l: 1.0,
            g: 1.0,
        }
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Dimensionless parameters of the reduced averaged system: `a` is the mean
/// square vertical pivot velocity, `c` the mean square horizontal one and `b`
/// the square of the conserved azimuthal momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AveragedParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if [a, b, c].iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(Self { a, b, c })
        } else {
            Err(Error::InvalidInput(format!(
                "A, B, C must be finite and non-negative, got {a}, {b}, {c}"
            )))
        }
    }

    /// Any `(A, C)` with the given difference; the dynamics see nothing else.
    pub fn from_difference(a_minus_c: f64, b: f64) -> Self {
        Self {
            a: a_minus_c.max(0.0),
            b,
            c: (-a_minus_c).max(0.0),
        }
    }

    /// Nondimensionalize: `A = ⟨ξ̇²⟩/(g l)`, `C = ⟨η̇²⟩/(g l)`, `B = p_α²/(m² l³ g)`.
    pub fn from_moments(mm: &MomentMatrix, p_alpha: f64, phys: &PhysicalParams) -> Result<Self> {
        let gl = phys.g * phys.l;
        Self::new(
            mm.xi_xi() / gl,
            p_alpha * p_alpha / (phys.m * phys.m * phys.l.powi(3) * phys.g),
            mm.eta_eta() / gl,
        )
    }

    pub fn a_minus_c(&self) -> f64 {
        self.a - self.c
    }
}

struct PivotTerms {
    /// `cosα τ̇ + sinα η̇`
    radial: f64,
    /// `−sinα τ̇ + cosα η̇`
    azimuthal: f64,
    u_phi: f64,
}

fn pivot_terms(s: &FullState, vel: [f64; 3]) -> PivotTerms {
    let (sp, cp) = s.phi.sin_cos();
    let (sa, ca) = s.alpha.sin_cos();
    let [tau_dot, eta_dot, xi_dot] = vel;
    let radial = ca * tau_dot + sa * eta_dot;
    let azimuthal = -sa * tau_dot + ca * eta_dot;
    PivotTerms {
        radial,
        azimuthal,
        u_phi: cp * radial + sp * xi_dot,
    }
}

/// `p_α / sinφ − m l w`, finite at the pole only when `p_α = 0`.
fn azimuthal_momentum_excess(s: &FullState, w: f64, p: &PhysicalParams) -> Result<f64> {
    let sp = s.phi.sin();
    if s.p_alpha == 0.0 {
        Ok(-p.m * p.l * w)
    } else if sp.abs() < POLE_EPS {
        Err(Error::Singular { phi: s.phi })
    } else {
        Ok(s.p_alpha / sp - p.m * p.l * w)
    }
}

/// Full time-dependent Hamiltonian with pivot velocities supplied directly.
pub fn hamiltonian_with_velocity(s: &FullState, vel: [f64; 3], p: &PhysicalParams) -> Result<f64> {
    let pt = pivot_terms(s, vel);
    let ml = p.m * p.l;
    let ml2 = ml * p.l;
    let dp = s.p_phi - ml * pt.u_phi;
    let q = azimuthal_momentum_excess(s, pt.azimuthal, p)?;
    Ok((dp * dp + q * q) / (2.0 * ml2) - ml * p.g * s.phi.cos())
}

pub fn full_hamiltonian(s: &FullState, t: f64, e: &Excitation, p: &PhysicalParams) -> Result<f64> {
    hamiltonian_with_velocity(s, eval_velocity(e, t), p)
}

/// Hamilton's equations for [`hamiltonian_with_velocity`]. The returned
/// `FullState` holds time derivatives.
pub fn rhs_with_velocity(s: &FullState, vel: [f64; 3], p: &PhysicalParams) -> Result<FullState> {
    let pt = pivot_terms(s, vel);
    let (sp, cp) = s.phi.sin_cos();
    let ml = p.m * p.l;
    let ml2 = ml * p.l;
    let xi_dot = vel[2];

    let dp = s.p_phi - ml * pt.u_phi;
    let q = azimuthal_momentum_excess(s, pt.azimuthal, p)?;

    let phi_dot = dp / ml2;
    let alpha_dot = if q == 0.0 {
        0.0
    } else if sp.abs() < POLE_EPS {
        return Err(Error::Singular { phi: s.phi });
    } else {
        q / (ml2 * sp)
    };

    let du_dphi = -sp * pt.radial + cp * xi_dot;
    let barrier = if s.p_alpha == 0.0 {
        0.0
    } else {
        q * s.p_alpha * cp / (ml2 * sp * sp)
    };
    let p_phi_dot = dp * du_dphi / p.l + barrier - ml * p.g * sp;
    let p_alpha_dot = (dp * cp * pt.azimuthal - q * pt.radial) / p.l;

    Ok(FullState::new(phi_dot, alpha_dot, p_phi_dot, p_alpha_dot))
}

pub fn full_rhs(s: &FullState, t: f64, e: &Excitation, p: &PhysicalParams) -> Result<FullState> {
    rhs_with_velocity(s, eval_velocity(e, t), p)
}

/// Averaged Hamiltonian for a general moment matrix, α-dependent terms included.
pub fn averaged_hamiltonian(s: &FullState, mm: &MomentMatrix, p: &PhysicalParams) -> Result<f64> {
    let (sp, cp) = s.phi.sin_cos();
    let (sa, ca) = s.alpha.sin_cos();
    let ml2 = p.m * p.l * p.l;

    let centrifugal = if s.p_alpha == 0.0 {
        0.0
    } else if sp.abs() < POLE_EPS {
        return Err(Error::Singular { phi: s.phi });
    } else {
        s.p_alpha * s.p_alpha / (sp * sp)
    };
    let kinetic = (s.p_phi * s.p_phi + centrifugal) / (2.0 * ml2);

    let (c2p, c2a, s2a) = (cp * cp, ca * ca, sa * sa);
    let half_m = 0.5 * p.m;
    let vibration = half_m * (c2p * c2a + s2a) * mm.tau_tau()
        + half_m * (c2p * s2a + c2a) * mm.eta_eta()
        + half_m * sp * sp * mm.xi_xi()
        + p.m * (c2p * ca * sa - ca * sa) * mm.tau_eta()
        + p.m * cp * ca * sp * mm.tau_xi()
        + p.m * cp * sa * sp * mm.eta_xi();

    Ok(kinetic + vibration - p.m * p.g * p.l * cp)
}

/// Reduced averaged flow `(φ̇, ṗ_φ) = (p_φ, −dV/dφ)` in units m = l = g = 1.
pub fn reduced_rhs(phi: f64, p_phi: f64, ap: &AveragedParams) -> Result<(f64, f64)> {
    Ok((p_phi, -potential::dv(phi, ap)?))
}

/// Reduced averaged energy `p_φ²/2 + V(φ)`.
pub fn reduced_energy(phi: f64, p_phi: f64, ap: &AveragedParams) -> Result<f64> {
    Ok(0.5 * p_phi * p_phi + potential::v_bar(phi, ap)?)
}

/// Averaged flow lifted back to the four canonical variables (m = l = g = 1).
/// The azimuth follows `α̇ = p_α / sin²φ` and `p_α` never changes; `ap.b` is
/// expected to equal `p_α²`.
pub fn averaged_rhs(s: &FullState, ap: &AveragedParams) -> Result<FullState> {
    let (phi_dot, p_phi_dot) = reduced_rhs(s.phi, s.p_phi, ap)?;
    let alpha_dot = if s.p_alpha == 0.0 {
        0.0
    } else {
        let sp = s.phi.sin();
        if sp.abs() < POLE_EPS {
            return Err(Error::Singular { phi: s.phi });
        }
        s.p_alpha / (sp * sp)
    };
    Ok(FullState::new(phi_dot, alpha_dot, p_phi_dot, 0.0))
}
