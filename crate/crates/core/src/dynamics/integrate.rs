use std::io::Write;

use crate::error::{Error, Result};

/// States recorded at every step of a fixed-step integration, initial state included.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64; N])> {
        Some((*self.times.last()?, self.states.last()?))
    }

    /// Step actually taken; uniform across the trajectory.
    pub fn step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// Classical fourth-order Runge-Kutta on `t_span` with a uniform step no larger
/// than `step`, chosen so the last node lands exactly on `t_span.1`.
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    y0: [f64; N],
    t_span: (f64, f64),
    step: f64,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let (t0, t1) = t_span;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidInput(format!("empty time span ({t0}, {t1})")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }

    let span = t1 - t0;
    let n = ((span / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = span / n as f64;

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(t0);
    states.push(y0);

    let mut y = y0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &y)?;
        let k2 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = rhs(t + h, &axpy(&y, h, &k3))?;
        y = std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]));
        let t_next = if i + 1 == n {
            t1
        } else {
            t0 + (i + 1) as f64 * h
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        times.push(t_next);
        states.push(y);
    }
    Ok(Trajectory { times, states })
}

/// Cubic Hermite interpolation between two nodes with known derivatives.
pub fn hermite<const N: usize>(
    (t0, y0, f0): (f64, &[f64; N], &[f64; N]),
    (t1, y1, f1): (f64, &[f64; N], &[f64; N]),
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    let u = (t - t0) / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    std::array::from_fn(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
}

/// CSV with header `t,phi,alpha,p_phi,p_alpha`.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory<4>) -> Result<()> {
    writeln!(w, "t,phi,alpha,p_phi,p_alpha")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        writeln!(w, "{t},{},{},{},{}", s[0], s[1], s[2], s[3])?;
    }
    Ok(())
}
