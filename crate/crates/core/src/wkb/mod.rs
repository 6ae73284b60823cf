//! BKW solution on channel 1 between the crossing and the turning point, and
//! the outgoing-condition shooting oracle for the true resonances.
//!
//! The BKW vector is `w = e^{iφ/h} (σ1,0, h σ2,0)` with
//! `φ(x) = ∫_0^x √(E − V1)`, `σ1,0 = (E − V1)^{−1/4}` and
//! `σ2,0 = (r0 − i r1 √(E − V1)) / ((V1 − V2)(E − V1)^{1/4})`.
//! The second component is fixed by cancelling the `O(h)` term of the second
//! row of `(P − E)w`; what is left is `O(h²)`.

mod shooting;

pub use shooting::{
    asymptotic_modes, find_resonances_shooting, mode_residual, AsymptoticMode, ShootingError, ShootingOptions, ShootingProblem, ShootingResult,
};

use crate::action::{branch_sqrt, phase_integral};
use crate::model::{CertifiedSetup, Channel};
use num_complex::Complex64;
use thiserror::Error;

/// Default exclusion margin around the crossing and the turning point.
pub const DEFAULT_MARGIN: f64 = 0.1;

#[derive(Debug, Error)]
pub enum WkbError {
    #[error("x = {x} lies outside the valid interval ({lo}, {hi})")]
    EvaluationOutsideValidInterval { x: f64, lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct WkbSolution<'a> {
    setup: &'a CertifiedSetup,
    pub e: Complex64,
    pub h: f64,
    /// Open interval `(δ, Re x1(E) − δ)`.
    pub valid_interval: (f64, f64),
}

pub fn wkb_solution(setup: &CertifiedSetup, e: Complex64, h: f64) -> WkbSolution<'_> {
    wkb_solution_with_margin(setup, e, h, DEFAULT_MARGIN)
}

pub fn wkb_solution_with_margin(setup: &CertifiedSetup, e: Complex64, h: f64, margin: f64) -> WkbSolution<'_> {
    let x1 = crate::action::turning_point(setup, Channel::One, e)
        .map(|x| x.re)
        .unwrap_or(setup.x1_0);
    WkbSolution { setup, e, h, valid_interval: (margin, x1 - margin) }
}

impl WkbSolution<'_> {
    fn check(&self, x: f64) -> Result<(), WkbError> {
        let (lo, hi) = self.valid_interval;
        if x > lo && x < hi {
            Ok(())
        } else {
            Err(WkbError::EvaluationOutsideValidInterval { x, lo, hi })
        }
    }

    pub fn phase(&self, x: f64) -> Complex64 {
        phase_integral(self.setup, Channel::One, self.e, x)
    }

    fn quarter_root(&self, x: f64) -> (Complex64, Complex64) {
        let root = branch_sqrt(self.e - self.setup.system.v1.at_real(x));
        (root, root.sqrt())
    }

    pub fn sigma1_0(&self, x: f64) -> Complex64 {
        self.quarter_root(x).1.inv()
    }

    pub fn sigma2_0(&self, x: f64) -> Complex64 {
        let sys = &self.setup.system;
        let (root, quarter) = self.quarter_root(x);
        let num = Complex64::new(sys.r0.at_real(x), 0.0) - Complex64::i() * sys.r1.at_real(x) * root;
        num / (quarter * (sys.v1.at_real(x) - sys.v2.at_real(x)))
    }

    /// `e^{iφ/h} (σ1,0, h σ2,0)` without the interval check.
    fn raw(&self, x: f64) -> [Complex64; 2] {
        let carrier = (Complex64::i() * self.phase(x) / self.h).exp();
        [carrier * self.sigma1_0(x), carrier * self.sigma2_0(x) * self.h]
    }

    pub fn value(&self, x: f64) -> Result<[Complex64; 2], WkbError> {
        self.check(x)?;
        Ok(self.raw(x))
    }
}

/// 8th-order central weights for the first and second derivative, offsets −4..=4.
const FD1: [f64; 9] = [1.0 / 280.0, -4.0 / 105.0, 1.0 / 5.0, -4.0 / 5.0, 0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const FD2: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

/// Largest Euclidean norm of `(P(h) − E) w` over `x_grid`.
///
/// Derivatives of `w` use the 8th-order stencils with spacing `h/32`; the
/// coupling rows are applied literally, `W = r0 + r1 h d/dx` and
/// `W* = r0 − h r1' − r1 h d/dx`.
pub fn wkb_residual(sol: &WkbSolution<'_>, x_grid: &[f64]) -> Result<f64, WkbError> {
    let sys = &sol.setup.system;
    let h = sol.h;
    let step = h / 32.0;
    let mut worst: f64 = 0.0;
    for &x in x_grid {
        sol.check(x)?;
        let samples: Vec<[Complex64; 2]> = (-4..=4).map(|k| sol.raw(x + k as f64 * step)).collect();
        let diff = |weights: &[f64; 9], c: usize, scale: f64| -> Complex64 {
            samples.iter().zip(weights).map(|(s, w)| s[c] * *w).sum::<Complex64>() / scale
        };
        let (w1, w2) = (samples[4][0], samples[4][1]);
        let (d1w1, d1w2) = (diff(&FD1, 0, step), diff(&FD1, 1, step));
        let (d2w1, d2w2) = (diff(&FD2, 0, step * step), diff(&FD2, 1, step * step));
        let (v1, v2) = (sys.v1.at_real(x), sys.v2.at_real(x));
        let (r0, r1, r1p) = (sys.r0.at_real(x), sys.r1.at_real(x), sys.r1.derivative_real(x));
        let res1 = -d2w1 * h * h + w1 * (v1 - sol.e) + (w2 * r0 + d1w2 * (r1 * h)) * h;
        let res2 = -d2w2 * h * h + w2 * (v2 - sol.e) + (w1 * (r0 - h * r1p) - d1w1 * (r1 * h)) * h;
        worst = worst.max((res1.norm_sqr() + res2.norm_sqr()).sqrt());
    }
    Ok(worst)
}
