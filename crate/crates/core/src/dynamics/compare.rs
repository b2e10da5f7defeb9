//! Full time-dependent flow against the reduced averaged flow.
//!
//! Both systems start from the same canonical state with no near-identity
//! correction, so the expected discrepancy is first order in `epsilon`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrate::{hermite, integrate, Trajectory};
use super::{averaged_rhs, full_rhs, AveragedParams, FullState, PhysicalParams};
use crate::error::{Error, Result};
use crate::excitation::{check_symmetry, velocity_moments, Excitation, DEFAULT_SYMMETRY_TOL};

/// Minimum RK4 steps per fast period `2π epsilon / omega` for the full system.
pub const STEPS_PER_FAST_PERIOD: usize = 64;

/// RK4 step of the averaged system.
pub const AVERAGED_STEP: f64 = 1e-3;

/// Accepted range for `error(2ε) / error(ε)` under first-order convergence.
pub const CONVERGENCE_BAND: (f64, f64) = (1.4, 3.5);

/// Errors at or below this are integrator noise: the two flows agree.
pub const NOISE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub epsilon: f64,
    pub max_err_phi: f64,
    pub max_err_p_phi: f64,
    pub p_alpha_drift: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonTrajectories {
    pub summary: Comparison,
    pub full: Trajectory<4>,
    pub averaged: Trajectory<4>,
}

fn check_excitation(e: &Excitation) -> Result<AveragedParams> {
    let mm = velocity_moments(e);
    let report = check_symmetry(&mm, DEFAULT_SYMMETRY_TOL);
    if !report.passed {
        return Err(Error::SymmetryViolation(report));
    }
    Ok(AveragedParams {
        a: mm.xi_xi(),
        b: 0.0,
        c: mm.eta_eta(),
    })
}

/// Integrates both flows (m = l = g = 1) and keeps the trajectories.
pub fn compare_trajectories(
    e: &Excitation,
    initial: &FullState,
    t_end: f64,
) -> Result<ComparisonTrajectories> {
    let mut ap = check_excitation(e)?;
    ap.b = initial.p_alpha * initial.p_alpha;
    if !initial.is_finite() {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    if initial.phi.sin().abs() < 1e-6 {
        return Err(Error::Singular { phi: initial.phi });
    }

    let phys = PhysicalParams::unit();
    // never coarser than the averaged step, so both flows share a truncation floor
    let full_step = (e.fast_period() / STEPS_PER_FAST_PERIOD as f64).min(AVERAGED_STEP);
    let full = integrate(
        |t, y| Ok(full_rhs(&FullState::from_array(*y), t, e, &phys)?.to_array()),
        initial.to_array(),
        (0.0, t_end),
        full_step,
    )?;
    let avg_rhs =
        |y: &[f64; 4]| Ok::<_, Error>(averaged_rhs(&FullState::from_array(*y), &ap)?.to_array());
    let averaged = integrate(
        |_, y| avg_rhs(y),
        initial.to_array(),
        (0.0, t_end),
        AVERAGED_STEP,
    )?;

    let rates: Vec<[f64; 4]> = averaged.states.iter().map(avg_rhs).collect::<Result<_>>()?;
    let h = averaged.step();
    let last = averaged.len() - 1;

    let mut max_err_phi = 0.0f64;
    let mut max_err_p_phi = 0.0f64;
    let mut p_alpha_drift = 0.0f64;
    for (&t, y) in full.times.iter().zip(&full.states) {
        let i = ((t / h).floor() as usize).min(last - 1);
        let reference = hermite(
            (averaged.times[i], &averaged.states[i], &rates[i]),
            (
                averaged.times[i + 1],
                &averaged.states[i + 1],
                &rates[i + 1],
            ),
            t,
        );
        max_err_phi = max_err_phi.max((y[0] - reference[0]).abs());
        max_err_p_phi = max_err_p_phi.max((y[2] - reference[2]).abs());
        p_alpha_drift = p_alpha_drift.max((y[3] - initial.p_alpha).abs());
    }

    Ok(ComparisonTrajectories {
        summary: Comparison {
            epsilon: e.epsilon,
            max_err_phi,
            max_err_p_phi,
            p_alpha_drift,
        },
        full,
        averaged,
    })
}

/// Maximum deviations on `[0, t_end]` between the full and averaged flows.
pub fn compare_full_averaged(
    e: &Excitation,
    initial: &FullState,
    t_end: f64,
) -> Result<Comparison> {
    compare_trajectories(e, initial, t_end).map(|c| c.summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    pub max_err_phi: Vec<f64>,
    pub max_err_p_phi: Vec<f64>,
    pub p_alpha_drift: Vec<f64>,
}

impl ConvergenceReport {
    pub fn from_comparisons(runs: &[Comparison]) -> Self {
        Self {
            epsilons: runs.iter().map(|c| c.epsilon).collect(),
            max_err_phi: runs.iter().map(|c| c.max_err_phi).collect(),
            max_err_p_phi: runs.iter().map(|c| c.max_err_p_phi).collect(),
            p_alpha_drift: runs.iter().map(|c| c.p_alpha_drift).collect(),
        }
    }

    pub fn phi_converges(&self) -> bool {
        within_band(&self.max_err_phi, CONVERGENCE_BAND, NOISE_FLOOR)
    }

    pub fn p_alpha_converges(&self) -> bool {
        within_band(&self.p_alpha_drift, CONVERGENCE_BAND, NOISE_FLOOR)
    }
}

/// Runs [`compare_full_averaged`] for every epsilon, in parallel, keeping the
/// input order. The sweep must be strictly decreasing.
pub fn convergence_sweep(
    e: &Excitation,
    initial: &FullState,
    t_end: f64,
    epsilons: &[f64],
) -> Result<ConvergenceReport> {
    if epsilons.is_empty() || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "epsilon sweep must be non-empty and strictly decreasing".into(),
        ));
    }
    check_excitation(e)?;
    let runs = epsilons
        .par_iter()
        .map(|&eps| compare_full_averaged(&e.with_epsilon(eps)?, initial, t_end))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_comparisons(&runs))
}

/// `values[i] / values[i + 1]`.
pub fn successive_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[0] / w[1]).collect()
}

/// True if all values sit below the noise floor, or every successive ratio
/// lies inside `band`.
pub fn within_band(values: &[f64], band: (f64, f64), floor: f64) -> bool {
    if values.iter().all(|v| v.abs() <= floor) {
        return true;
    }
    successive_ratios(values)
        .iter()
        .all(|r| r.is_finite() && *r >= band.0 && *r <= band.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excitation::HarmonicSeries;

    #[test]
    fn zero_excitation_flows_coincide() {
        let e = Excitation::zero(0.1, 1.0).unwrap();
        let c = compare_full_averaged(&e, &FullState::new(2.0, 0.0, 0.0, 0.3), 10.0).unwrap();
        assert!(c.max_err_phi < NOISE_FLOOR, "{c:?}");
        assert!(c.max_err_p_phi < NOISE_FLOOR, "{c:?}");
        assert_eq!(c.p_alpha_drift, 0.0);
    }

    #[test]
    fn asymmetric_excitation_is_refused() {
        let e = Excitation::new(
            0.1,
            1.0,
            HarmonicSeries::cos(1),
            HarmonicSeries::cos(1),
            HarmonicSeries::zero(),
        )
        .unwrap();
        let err = compare_full_averaged(&e, &FullState::new(2.0, 0.0, 0.0, 0.3), 1.0).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation(_)));
    }

    #[test]
    fn sweep_must_decrease() {
        let e = Excitation::zero(0.1, 1.0).unwrap();
        let s = FullState::new(2.0, 0.0, 0.0, 0.3);
        assert!(convergence_sweep(&e, &s, 1.0, &[0.05, 0.1]).is_err());
        assert!(convergence_sweep(&e, &s, 1.0, &[]).is_err());
    }

    #[test]
    fn band_logic() {
        assert!(within_band(&[0.0, 0.0, 0.0], CONVERGENCE_BAND, NOISE_FLOOR));
        assert!(within_band(&[0.4, 0.2, 0.1], CONVERGENCE_BAND, NOISE_FLOOR));
        assert!(!within_band(
            &[0.4, 0.39, 0.1],
            CONVERGENCE_BAND,
            NOISE_FLOOR
        ));
        assert!(!within_band(
            &[0.4, 0.0, 0.0],
            CONVERGENCE_BAND,
            NOISE_FLOOR
        ));
        assert_eq!(successive_ratios(&[4.0, 2.0, 0.5]), vec![2.0, 4.0]);
    }
}
