//! The principal monodromy symbol
//!
//! ```text
//! C0(E; h) = i h e^{iS(E)/h} π W0 / ((V1'(0) − V2'(0)) √E0)
//! ```
//!
//! and its level set `C0 = 1` (pseudo-resonances). Writing
//! `K = π|W0| / ((V1'(0) − V2'(0)) √E0)`, the condition `C0 = 1` is the pair
//!
//! ```text
//! Re S(E) = h (2πn − π/2 − arg W0),    Im S(E) = −h (log(1/h) − log K),
//! ```
//!
//! which is solved by Newton on `S(E) − target` since `S' = T` is at hand.

use crate::action::{action_data, ActionError};
use crate::model::CertifiedSetup;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

const NEWTON_MAX_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum QuantizationError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("invalid energy rectangle: {0}")]
    InvalidRectangle(String),
    #[error("Newton iteration for index {n} did not converge (|F| = {residual:.3e})")]
    NewtonDiverged { n: i64, residual: f64 },
}

/// `E0 + h log(1/h)·[−r, r] + i·[−M h log(1/h), 0]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRectangle {
    pub e0: f64,
    pub r: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub h: f64,
}

impl EnergyRectangle {
    pub fn new(e0: f64, r: f64, m: f64, h: f64) -> Result<Self, QuantizationError> {
        if !(h > 0.0 && h < 1.0) {
            return Err(QuantizationError::InvalidRectangle(format!("h = {h} is not in (0, 1)")));
        }
        if !(r > 0.0 && m > 0.0) {
            return Err(QuantizationError::InvalidRectangle(format!("need r > 0 and M > 0, got r = {r}, M = {m}")));
        }
        Ok(Self { e0, r, m, h })
    }

    /// `h log(1/h)`.
    pub fn scale(&self) -> f64 {
        self.h * (1.0 / self.h).ln()
    }

    pub fn re_bounds(&self) -> (f64, f64) {
        let w = self.r * self.scale();
        (self.e0 - w, self.e0 + w)
    }

    /// `(−M h log(1/h), 0)`.
    pub fn im_bounds(&self) -> (f64, f64) {
        (-self.m * self.scale(), 0.0)
    }

    pub fn contains(&self, e: Complex64) -> bool {
        let (lo, hi) = self.re_bounds();
        let (bottom, top) = self.im_bounds();
        e.re >= lo && e.re <= hi && e.im >= bottom && e.im <= top
    }

    /// Membership after moving the left, right and bottom sides inward by
    /// `margin`. The top side is the real axis, which the resonances avoid by
    /// a distance of order `h log(1/h)` already.
    pub fn contains_interior(&self, e: Complex64, margin: f64) -> bool {
        let (lo, hi) = self.re_bounds();
        let (bottom, top) = self.im_bounds();
        e.re >= lo + margin && e.re <= hi - margin && e.im >= bottom + margin && e.im <= top
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoResonance {
    #[serde(rename = "E")]
    pub e: Complex64,
    pub n: i64,
    /// `|C0(E; h) − 1|`.
    pub residual: f64,
    pub newton_iters: usize,
}

/// `π W0 / ((V1'(0) − V2'(0)) √E0)`.
pub fn monodromy_prefactor(setup: &CertifiedSetup) -> Complex64 {
    setup.w0() * PI / (setup.slope_gap() * setup.e0.sqrt())
}

/// `log K` with `K = |monodromy_prefactor|`.
pub fn log_k(setup: &CertifiedSetup) -> f64 {
    monodromy_prefactor(setup).norm().ln()
}

pub fn c0(setup: &CertifiedSetup, e: Complex64, h: f64) -> Result<Complex64, QuantizationError> {
    let s = action_data(setup, e)?.s;
    Ok(c0_from_action(setup, s, h))
}

pub fn c0_from_action(setup: &CertifiedSetup, s: Complex64, h: f64) -> Complex64 {
    Complex64::new(0.0, h) * (Complex64::i() * s / h).exp() * monodromy_prefactor(setup)
}

/// The action value at which `C0 = e^{2πi·offset}` for index `n`.
///
/// `offset = 0` gives the pseudo-resonance targets; `offset = 1/2` the points
/// where `C0 = −1`, half-way between consecutive pseudo-resonances.
pub fn action_target(setup: &CertifiedSetup, h: f64, n: i64, offset: f64) -> Complex64 {
    let arg_w0 = setup.w0().arg();
    let re = h * (2.0 * PI * (n as f64 + offset) - FRAC_PI_2 - arg_w0);
    let im = -h * ((1.0 / h).ln() - log_k(setup));
    Complex64::new(re, im)
}

/// Leading-order width `−h log(1/h) / T(E0)`.
pub fn width_estimate(setup: &CertifiedSetup, h: f64) -> Result<f64, QuantizationError> {
    let t0 = action_data(setup, Complex64::new(setup.e0, 0.0))?.s_prime.re;
    Ok(-h * (1.0 / h).ln() / t0)
}

struct Root {
    e: Complex64,
    iters: usize,
    s: Complex64,
}

/// Newton on `S(E) − target` with step halving.
///
/// A step is accepted only when the action is computable at the new point and
/// `|F|` decreases; near the edges of a wide rectangle the linearized seed can
/// land where the turning-point continuation fails, so the seed is pulled
/// towards `E0` until it is admissible.
fn newton_on_action(setup: &CertifiedSetup, target: Complex64, seed: Complex64, h: f64, n: i64) -> Result<Root, QuantizationError> {
    let e0 = Complex64::new(setup.e0, 0.0);
    let mut e = seed;
    let mut d = None;
    for _ in 0..40 {
        match action_data(setup, e) {
            Ok(v) => {
                d = Some(v);
                break;
            }
            Err(_) => e = e0 + (e - e0) * 0.5,
        }
    }
    let Some(mut d) = d else {
        return Err(QuantizationError::NewtonDiverged { n, residual: f64::INFINITY });
    };
    let mut f = d.s - target;
    for iters in 0..=NEWTON_MAX_ITERS {
        if f.norm() < NEWTON_TOL * h {
            return Ok(Root { e, iters, s: d.s });
        }
        if iters == NEWTON_MAX_ITERS {
            break;
        }
        let step = f / d.s_prime;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = e - step * lambda;
            if let Ok(dt) = action_data(setup, trial) {
                let ft = dt.s - target;
                if ft.norm() < f.norm() {
                    e = trial;
                    d = dt;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(QuantizationError::NewtonDiverged { n, residual: f.norm() })
}

/// Index range covering the rectangle's real window, one index beyond each side.
///
/// The action at the window edges is used where it can be evaluated; the
/// linearization `S0 + T0 (E − E0)` stands in elsewhere. Since `T` varies
/// across wide windows, the larger of the two estimates is kept at each end.
fn index_range(setup: &CertifiedSetup, rect: &EnergyRectangle, s0: f64, t0: f64, offset: f64) -> (i64, i64) {
    let (lo, hi) = rect.re_bounds();
    let base = FRAC_PI_2 + setup.w0().arg();
    let index = |s: f64| (s / rect.h + base) / (2.0 * PI) - offset;
    let estimates = |e: f64| {
        let linear = index(s0 + t0 * (e - rect.e0));
        match action_data(setup, Complex64::new(e, 0.0)) {
            Ok(d) => (linear.min(index(d.s.re)), linear.max(index(d.s.re))),
            Err(_) => (linear, linear),
        }
    };
    (estimates(lo).0.floor() as i64 - 1, estimates(hi).1.ceil() as i64 + 1)
}

/// Roots of `C0 = e^{2πi·offset}` inside the rectangle, sorted by `Re E`.
pub fn solve_level(setup: &CertifiedSetup, rect: &EnergyRectangle, offset: f64) -> Result<Vec<PseudoResonance>, QuantizationError> {
    let d0 = action_data(setup, Complex64::new(setup.e0, 0.0))?;
    let (s0, t0) = (d0.s, d0.s_prime);
    let (n_lo, n_hi) = index_range(setup, rect, s0.re, t0.re, offset);
    let h = rect.h;
    let level = Complex64::from_polar(1.0, 2.0 * PI * offset);
    let mut roots: Vec<PseudoResonance> = (n_lo..=n_hi)
        .into_par_iter()
        .filter_map(|n| {
            let target = action_target(setup, h, n, offset);
            let seed = Complex64::new(setup.e0, 0.0) + (target - s0) / t0;
            match newton_on_action(setup, target, seed, h, n) {
                Ok(root) => Some(PseudoResonance {
                    e: root.e,
                    n,
                    residual: (c0_from_action(setup, root.s, h) - level).norm(),
                    newton_iters: root.iters,
                }),
                Err(err) => {
                    log::debug!("index {n} skipped at h = {h}: {err}");
                    None
                }
            }
        })
        .filter(|p| rect.contains(p.e))
        .collect();
    roots.sort_by(|a, b| a.e.re.total_cmp(&b.e.re));
    roots.dedup_by(|a, b| (a.e - b.e).norm() < 0.1 * h);
    Ok(roots)
}

/// Roots of `C0(E; h) = 1` in the rectangle.
pub fn pseudo_resonances(setup: &CertifiedSetup, rect: &EnergyRectangle) -> Result<Vec<PseudoResonance>, QuantizationError> {
    solve_level(setup, rect, 0.0)
}
