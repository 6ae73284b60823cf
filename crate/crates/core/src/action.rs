//! Classical data of the periodic orbit: complex turning points, the action
//! `S(E)`, its energy derivative and the orbit `γ` itself.
//!
//! With `I_j(E) = ∫_0^{x_j(E)} √(E − V_j)` the action is `S = 2(I_1 − I_2)`,
//! and with `J_j = ∫_0^{x_j} dx/√(E − V_j)` the half-times are `t_1 = J_1`,
//! `t_2 = −J_2`, so that `S'(E) = t_1 + t_2` by differentiating under the
//! integral (the boundary terms vanish at the turning points).

use crate::model::{CertifiedSetup, Channel, ModelError};
use crate::quadrature::{jacobi_half, jacobi_minus_half, legendre, GaussRule};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_RADIUS: f64 = 0.5;
const NEWTON_MAX_ITERS: usize = 60;
const SLOPE_TOL: f64 = 1e-8;
/// Largest energy increment of one continuation step from `E0`.
const CONTINUATION_STEP: f64 = 0.02;
const BRANCH_TOL: f64 = 1e-12;
const ENERGY_DRIFT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("Newton iteration for x_{channel}(E) at E = {e} left the trust disk")]
    NewtonDiverged { channel: usize, e: Complex64 },
    #[error("|V_{channel}'| < 1e-8 near the turning point for E = {e}")]
    DegenerateSlope { channel: usize, e: Complex64 },
    #[error("Re √(E − V_{channel}) vanishes on the integration segment for E = {e}")]
    BranchAmbiguity { channel: usize, e: Complex64 },
    #[error("trajectory integration failed: {0}")]
    IntegrationFailure(String),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ActionData {
    pub e: Complex64,
    pub x1: Complex64,
    pub x2: Complex64,
    pub s: Complex64,
    pub s_prime: Complex64,
    pub t1: Complex64,
    pub t2: Complex64,
    /// Smallest `Re √(E − V_j)` met at any quadrature node.
    pub branch_margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
    pub t: f64,
    pub channel: Channel,
}

/// `√z` with `Re ≥ 0`, plus its real part for the ambiguity check.
#[inline]
pub fn branch_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

fn channel_of(j: Channel) -> usize {
    j.index()
}

fn newton_from(setup: &CertifiedSetup, j: Channel, e: Complex64, seed: Complex64) -> Result<Complex64, ActionError> {
    let v = setup.potential(j);
    let mut x = seed;
    for _ in 0..NEWTON_MAX_ITERS {
        let f = v.at(x) - e;
        let d = v.derivative(x);
        if d.norm() < SLOPE_TOL {
            return Err(ActionError::DegenerateSlope { channel: channel_of(j), e });
        }
        if f.norm() < NEWTON_TOL {
            return Ok(x);
        }
        x -= f / d;
        if (x - seed).norm() > NEWTON_RADIUS || !x.re.is_finite() {
            return Err(ActionError::NewtonDiverged { channel: channel_of(j), e });
        }
    }
    let f = v.at(x) - e;
    if f.norm() < NEWTON_TOL {
        Ok(x)
    } else {
        Err(ActionError::NewtonDiverged { channel: channel_of(j), e })
    }
}

/// The zero of `V_j(x) − E` continued from the real turning point at `E0`.
///
/// The path `E0 → E` is split into steps of at most 0.02 and each step's
/// Newton solve is seeded with the previous root, so the result never jumps
/// to another zero of `V_j − E`.
pub fn turning_point(setup: &CertifiedSetup, j: Channel, e: Complex64) -> Result<Complex64, ActionError> {
    let e0 = Complex64::new(setup.e0, 0.0);
    let mut x = Complex64::new(setup.turning_point_at_e0(j), 0.0);
    let steps = ((e - e0).norm() / CONTINUATION_STEP).ceil().max(1.0) as usize;
    for k in 1..=steps {
        let ek = e0 + (e - e0) * (k as f64 / steps as f64);
        x = newton_from(setup, j, ek, x)?;
    }
    setup.eval_potential(j, x)?;
    Ok(x)
}

struct SegmentIntegrals {
    /// `∫_0^{x_t} √(E − V)`.
    action: Complex64,
    /// `∫_0^{x_t} 1/√(E − V)`.
    time: Complex64,
    branch_margin: f64,
}

/// Both endpoint-weighted integrals along the straight segment `[0, x_t]`.
///
/// With `x = x_t(1 + s)/2` the turning point sits at `s = 1`, where
/// `E − V ∝ (1 − s)`; the square-root behaviour is absorbed into the
/// Gauss–Jacobi weights `(1 − s)^{±1/2}`.
fn segment_integrals(setup: &CertifiedSetup, j: Channel, e: Complex64, xt: Complex64) -> Result<SegmentIntegrals, ActionError> {
    let v = setup.potential(j);
    let half = xt * 0.5;
    let mut margin = f64::INFINITY;
    let mut eval = |rule: &GaussRule, action: bool| -> Result<Complex64, ActionError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, w) in rule.iter() {
            let x = half * (1.0 + s);
            let root = branch_sqrt(e - v.at(x));
            if root.re.abs() < BRANCH_TOL {
                return Err(ActionError::BranchAmbiguity { channel: channel_of(j), e });
            }
            margin = margin.min(root.re);
            let sq = (1.0 - s).sqrt();
            acc += if action { root / sq } else { sq / root } * w;
        }
        Ok(acc * half)
    };
    let action = eval(jacobi_half(), true)?;
    let time = eval(jacobi_minus_half(), false)?;
    Ok(SegmentIntegrals { action, time, branch_margin: margin })
}

/// Turning points, action, period and half-times at a complex energy.
pub fn action_data(setup: &CertifiedSetup, e: Complex64) -> Result<ActionData, ActionError> {
    let x1 = turning_point(setup, Channel::One, e)?;
    let x2 = turning_point(setup, Channel::Two, e)?;
    let i1 = segment_integrals(setup, Channel::One, e, x1)?;
    let i2 = segment_integrals(setup, Channel::Two, e, x2)?;
    let t1 = i1.time;
    let t2 = -i2.time;
    Ok(ActionData {
        e,
        x1,
        x2,
        s: (i1.action - i2.action) * 2.0,
        s_prime: t1 + t2,
        t1,
        t2,
        branch_margin: i1.branch_margin.min(i2.branch_margin),
    })
}

pub fn action_s(setup: &CertifiedSetup, e: Complex64) -> Result<Complex64, ActionError> {
    Ok(action_data(setup, e)?.s)
}

pub fn period_t(setup: &CertifiedSetup, e: Complex64) -> Result<Complex64, ActionError> {
    Ok(action_data(setup, e)?.s_prime)
}

/// `∫_0^x √(E − V_j)` for `x` away from the turning point (Gauss–Legendre).
pub fn phase_integral(setup: &CertifiedSetup, j: Channel, e: Complex64, x: f64) -> Complex64 {
    let v = setup.potential(j);
    let half = 0.5 * x;
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, w) in legendre().iter() {
        let t = Complex64::new(half * (1.0 + s), 0.0);
        acc += branch_sqrt(e - v.at(t)) * w;
    }
    acc * half
}

fn hamilton_rhs(setup: &CertifiedSetup, j: Channel, (x, xi): (f64, f64)) -> (f64, f64) {
    (2.0 * xi, -setup.potential(j).derivative_real(x))
}

/// Classical RK4 over `[0, duration]` with `steps` equal steps; returns the end
/// point and the largest excursion of `ξ² + V_j(x)` from `E0`.
fn rk4_flow(setup: &CertifiedSetup, j: Channel, start: (f64, f64), duration: f64, steps: usize) -> ((f64, f64), f64) {
    let v = setup.potential(j);
    let dt = duration / steps as f64;
    let mut y = start;
    let mut drift: f64 = 0.0;
    for _ in 0..steps {
        let k1 = hamilton_rhs(setup, j, y);
        let k2 = hamilton_rhs(setup, j, (y.0 + 0.5 * dt * k1.0, y.1 + 0.5 * dt * k1.1));
        let k3 = hamilton_rhs(setup, j, (y.0 + 0.5 * dt * k2.0, y.1 + 0.5 * dt * k2.1));
        let k4 = hamilton_rhs(setup, j, (y.0 + dt * k3.0, y.1 + dt * k3.1));
        y.0 += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y.1 += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        drift = drift.max((y.1 * y.1 + v.at_real(y.0) - setup.e0).abs());
    }
    (y, drift)
}

/// The point of the periodic orbit at time `t` (taken modulo `T`).
///
/// The orbit starts at `(0, √E0)` on channel 1, follows `ẋ = 2ξ, ξ̇ = −V_1'(x)`
/// out to the turning point and back to `(0, −√E0)` at `t = t_1`, then runs on
/// channel 2 through its own turning point and closes at `t = T = t_1 + t_2`.
pub fn trajectory_gamma(setup: &CertifiedSetup, t: f64) -> Result<PhasePoint, ActionError> {
    if !t.is_finite() {
        return Err(ActionError::IntegrationFailure(format!("time {t} is not finite")));
    }
    let data = action_data(setup, Complex64::new(setup.e0, 0.0))?;
    let (t1, t2) = (data.t1.re, data.t2.re);
    let period = t1 + t2;
    let tm = t.rem_euclid(period);
    let p = setup.e0.sqrt();
    let (channel, start, duration) = if tm <= t1 {
        (Channel::One, (0.0, p), tm)
    } else {
        (Channel::Two, (0.0, -p), tm - t1)
    };
    let mut steps = ((duration / 1e-3).ceil() as usize).max(1);
    for _ in 0..8 {
        let ((x, xi), drift) = rk4_flow(setup, channel, start, duration, steps);
        if drift < ENERGY_DRIFT_TOL {
            return Ok(PhasePoint { x, xi, t: tm, channel });
        }
        steps *= 2;
    }
    Err(ActionError::IntegrationFailure(format!(
        "energy drift above {ENERGY_DRIFT_TOL:e} after step refinement"
    )))
}
