//! Resonances as zeros of a matching determinant.
//!
//! With `y = (u1, h u1', u2, h u2')` the eigenvalue equation is `h y' = B y`,
//!
//! ```text
//!     [ 0              1       0       0    ]
//! B = [ V1 − E         0       h r0    h r1 ]
//!     [ 0              0       0       1    ]
//!     [ h(r0 − h r1')  −h r1   V2 − E  0    ]
//! ```
//!
//! At `+L` the admissible solutions are the decaying channel-1 mode and the
//! outgoing channel-2 mode; at `−L` the outgoing channel-1 mode and the
//! decaying channel-2 mode. Both pairs are carried to `x = 0` and `E` is a
//! resonance when the four columns are linearly dependent.
//!
//! The integration mesh is chosen once per `h` by an adaptive Dormand–Prince
//! pass at `E0` and then frozen, so the determinant is the same analytic
//! function of `E` at every evaluation. Columns are re-orthonormalized at
//! fixed intervals; the discarded triangular factors enter the determinant
//! only through their diagonals, which are accumulated in log form.

use crate::action::branch_sqrt;
use crate::model::CertifiedSetup;
use crate::quantization::{pseudo_resonances, EnergyRectangle, QuantizationError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const OVERFLOW: f64 = 1e250;
const SECANT_MAX_ITERS: usize = 60;

#[derive(Debug, Error)]
pub enum ShootingError {
    #[error("solution norms overflowed near x = {x}; re-orthonormalization interval too coarse")]
    IntegrationOverflow { x: f64 },
    #[error("secant iteration from {seed} left its bracket")]
    NoRootInBracket { seed: Complex64 },
    #[error("shooting box half-length {l} is below 3·R0 = {min}")]
    BoxTooSmall { l: f64, min: f64 },
    #[error("adaptive mesh construction failed: {0}")]
    MeshFailure(String),
    #[error(transparent)]
    Quantization(#[from] QuantizationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootingOptions {
    /// Half-length of the shooting interval; `None` means `3·R0`.
    pub l: Option<f64>,
    pub reorth_interval: f64,
    pub rtol: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { l: None, reorth_interval: 0.1, rtol: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    #[serde(rename = "E")]
    pub e: Complex64,
    pub det_value: Complex64,
    /// `max |D|` on the circle of radius `h/2` about the seed.
    pub det_scale: f64,
    pub converged: bool,
    /// `[ch1 at −L, ch2 at −L, ch1 at +L, ch2 at +L]`.
    pub channel_rates: [Complex64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticMode {
    pub lambda: Complex64,
    pub vector: [Complex64; 4],
}

#[derive(Clone, Copy, Debug)]
struct Coeffs {
    v1: f64,
    v2: f64,
    r0: f64,
    r1: f64,
    r1p: f64,
}

fn coeffs_at(setup: &CertifiedSetup, x: f64) -> Coeffs {
    let s = &setup.system;
    Coeffs {
        v1: s.v1.at_real(x),
        v2: s.v2.at_real(x),
        r0: s.r0.at_real(x),
        r1: s.r1.at_real(x),
        r1p: s.r1.derivative_real(x),
    }
}

type State = [Complex64; 4];

#[inline]
fn rhs(c: &Coeffs, e: Complex64, h: f64, y: &State) -> State {
    let inv_h = 1.0 / h;
    [
        y[1] * inv_h,
        ((c.v1 - e) * y[0] + y[2] * (h * c.r0) + y[3] * (h * c.r1)) * inv_h,
        y[3] * inv_h,
        (y[0] * (h * (c.r0 - h * c.r1p)) - y[1] * (h * c.r1) + (c.v2 - e) * y[2]) * inv_h,
    ]
}

fn b_matrix(c: &Coeffs, e: Complex64, h: f64) -> [[Complex64; 4]; 4] {
    let z = Complex64::new(0.0, 0.0);
    let re = |v: f64| Complex64::new(v, 0.0);
    [
        [z, re(1.0), z, z],
        [re(c.v1) - e, z, re(h * c.r0), re(h * c.r1)],
        [z, z, z, re(1.0)],
        [re(h * (c.r0 - h * c.r1p)), re(-h * c.r1), re(c.v2) - e, z],
    ]
}

/// Mode of the frozen-coefficient system at `x`: the root of
/// `(λ² − a1)(λ² − a2) − h²(r0 + r1λ)(r0 − h r1' − r1λ)` nearest `guess`,
/// with its eigenvector normalized to 1 in the channel it belongs to.
fn refine_mode(c: &Coeffs, e: Complex64, h: f64, guess: Complex64, channel_one: bool) -> AsymptoticMode {
    let (a1, a2) = (c.v1 - e, c.v2 - e);
    let q = c.r0 - h * c.r1p;
    let p = |l: Complex64| (l * l - a1) * (l * l - a2) - (l * c.r1 + c.r0) * (-l * c.r1 + q) * (h * h);
    let dp = |l: Complex64| {
        l * 2.0 * (l * l - a2) + l * 2.0 * (l * l - a1) - ((-l * c.r1 + q) * c.r1 - (l * c.r1 + c.r0) * c.r1) * (h * h)
    };
    let mut lambda = guess;
    for _ in 0..50 {
        let step = p(lambda) / dp(lambda);
        lambda -= step;
        if step.norm() < 1e-16 * lambda.norm().max(1.0) {
            break;
        }
    }
    let vector = if channel_one {
        let u2 = (-lambda * c.r1 + q) * h / (lambda * lambda - a2);
        [Complex64::new(1.0, 0.0), lambda, u2, lambda * u2]
    } else {
        let u1 = (lambda * c.r1 + c.r0) * h / (lambda * lambda - a1);
        [u1, lambda * u1, Complex64::new(1.0, 0.0), lambda]
    };
    AsymptoticMode { lambda, vector }
}

/// The two admissible modes at `x`: for `x > 0` the decaying channel-1 and
/// outgoing channel-2 modes, for `x < 0` the outgoing channel-1 and decaying
/// channel-2 modes.
pub fn asymptotic_modes(setup: &CertifiedSetup, e: Complex64, h: f64, x: f64) -> [AsymptoticMode; 2] {
    let c = coeffs_at(setup, x);
    let i = Complex64::i();
    if x > 0.0 {
        [
            refine_mode(&c, e, h, -branch_sqrt(c.v1 - e), true),
            refine_mode(&c, e, h, i * branch_sqrt(e - c.v2), false),
        ]
    } else {
        [
            refine_mode(&c, e, h, -i * branch_sqrt(e - c.v1), true),
            refine_mode(&c, e, h, branch_sqrt(c.v2 - e), false),
        ]
    }
}

/// `‖(B − λ)v‖ / ‖v‖` for a mode of the system at `x`.
pub fn mode_residual(setup: &CertifiedSetup, e: Complex64, h: f64, x: f64, mode: &AsymptoticMode) -> f64 {
    let b = b_matrix(&coeffs_at(setup, x), e, h);
    let v = &mode.vector;
    let mut res = 0.0;
    for (row, vi) in b.iter().zip(v) {
        let bv: Complex64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        res += (bv - mode.lambda * vi).norm_sqr();
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (res / norm).sqrt()
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the 5th-order update and, when `stage7`
/// is set, the embedded error vector.
fn dp_step(coeffs: &[Coeffs], e: Complex64, h: f64, y: &State, dt: f64, stage7: bool) -> (State, Option<State>) {
    let stages = if stage7 { 7 } else { 6 };
    let mut k = [[Complex64::new(0.0, 0.0); 4]; 7];
    for s in 0..stages {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for c in 0..4 {
                    ys[c] += kj[c] * (a * dt);
                }
            }
        }
        k[s] = rhs(&coeffs[s.min(coeffs.len() - 1)], e, h, &ys);
    }
    let mut out = *y;
    for (s, ks) in k.iter().enumerate().take(6) {
        for c in 0..4 {
            out[c] += ks[c] * (B5[s] * dt);
        }
    }
    let err = stage7.then(|| {
        let mut err = [Complex64::new(0.0, 0.0); 4];
        for (s, ks) in k.iter().enumerate() {
            for c in 0..4 {
                err[c] += ks[c] * ((B5[s] - B4[s]) * dt);
            }
        }
        err
    });
    (out, err)
}

fn norm(v: &State) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram–Schmidt on the two columns; returns `log(R11 R22)`.
fn orthonormalize(cols: &mut [State; 2]) -> f64 {
    let n0 = norm(&cols[0]);
    for z in cols[0].iter_mut() {
        *z /= n0;
    }
    let proj: Complex64 = cols[0].iter().zip(&cols[1]).map(|(a, b)| a.conj() * b).sum();
    let c0 = cols[0];
    for (z, q) in cols[1].iter_mut().zip(&c0) {
        *z -= proj * q;
    }
    let n1 = norm(&cols[1]);
    for z in cols[1].iter_mut() {
        *z /= n1;
    }
    n0.ln() + n1.ln()
}

/// A frozen mesh from the box edge to the origin, with the coefficients at
/// every Dormand–Prince stage.
#[derive(Clone, Debug)]
struct Sweep {
    start: f64,
    nodes: Vec<f64>,
    stage_coeffs: Vec<[Coeffs; 6]>,
    reorth_after: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct ShootingProblem<'a> {
    setup: &'a CertifiedSetup,
    pub h: f64,
    pub l: f64,
    right: Sweep,
    left: Sweep,
}

impl<'a> ShootingProblem<'a> {
    pub fn new(setup: &'a CertifiedSetup, h: f64, options: &ShootingOptions) -> Result<Self, ShootingError> {
        let min = 3.0 * setup.system.cone.r0;
        let l = options.l.unwrap_or(min);
        if l < min - 1e-12 {
            return Err(ShootingError::BoxTooSmall { l, min });
        }
        let e_ref = Complex64::new(setup.e0, 0.0);
        let right = build_sweep(setup, h, l, e_ref, options)?;
        let left = build_sweep(setup, h, -l, e_ref, options)?;
        Ok(Self { setup, h, l, right, left })
    }

    pub fn mesh_steps(&self) -> usize {
        self.right.nodes.len() + self.left.nodes.len() - 2
    }

    /// Carries the two admissible modes from the edge to the origin; returns the
    /// orthonormal columns and the accumulated `log det R`.
    fn carry(&self, sweep: &Sweep, e: Complex64) -> Result<([State; 2], f64), ShootingError> {
        let modes = asymptotic_modes(self.setup, e, self.h, sweep.start);
        let mut cols = [modes[0].vector, modes[1].vector];
        let mut log_r = orthonormalize(&mut cols);
        for (k, window) in sweep.nodes.windows(2).enumerate() {
            let dt = window[1] - window[0];
            for col in cols.iter_mut() {
                *col = dp_step(&sweep.stage_coeffs[k], e, self.h, col, dt, false).0;
            }
            if sweep.reorth_after[k] {
                let biggest = norm(&cols[0]).max(norm(&cols[1]));
                if !(biggest < OVERFLOW) {
                    return Err(ShootingError::IntegrationOverflow { x: window[1] });
                }
                log_r += orthonormalize(&mut cols);
            }
        }
        Ok((cols, log_r))
    }

    /// Matching determinant `det[Y₋ | Y₊](0)`, scaled by the analytic factor
    /// `exp(−(L/h)(√(v1⁺ − E) + √(v2⁻ − E)))` that absorbs the growth of the
    /// decaying modes.
    pub fn determinant(&self, e: Complex64) -> Result<Complex64, ShootingError> {
        let (left, log_l) = self.carry(&self.left, e)?;
        let (right, log_r) = self.carry(&self.right, e)?;
        let v1p = self.setup.system.v1.limits().1;
        let v2m = self.setup.system.v2.limits().0;
        let growth = (branch_sqrt(v1p - e) + branch_sqrt(v2m - e)) * (self.l / self.h);
        let m = [left[0], left[1], right[0], right[1]];
        Ok(det4(m) * (Complex64::new(log_l + log_r, 0.0) - growth).exp())
    }

    /// The four outer rates `[ch1 at −L, ch2 at −L, ch1 at +L, ch2 at +L]`.
    pub fn channel_rates(&self, e: Complex64) -> [Complex64; 4] {
        let l = asymptotic_modes(self.setup, e, self.h, -self.l);
        let r = asymptotic_modes(self.setup, e, self.h, self.l);
        [l[0].lambda, l[1].lambda, r[0].lambda, r[1].lambda]
    }

    /// Secant iteration on the determinant from `seed`, confined to `|E − seed| < h`.
    pub fn refine(&self, seed: Complex64) -> Result<ShootingResult, ShootingError> {
        let h = self.h;
        let radius = 0.5 * h;
        let mut scale: f64 = 0.0;
        for k in 0..8 {
            let z = seed + Complex64::from_polar(radius, k as f64 * std::f64::consts::FRAC_PI_4);
            scale = scale.max(self.determinant(z)?.norm());
        }
        let mut ea = seed;
        let mut da = self.determinant(ea)?;
        let mut eb = seed + Complex64::new(1e-3 * h, 1e-3 * h);
        let mut db = self.determinant(eb)?;
        for _ in 0..SECANT_MAX_ITERS {
            if db == da {
                break;
            }
            let ec = eb - db * (eb - ea) / (db - da);
            if !(ec.re.is_finite() && ec.im.is_finite()) || (ec - seed).norm() > h {
                return Err(ShootingError::NoRootInBracket { seed });
            }
            let dc = self.determinant(ec)?;
            ea = eb;
            da = db;
            eb = ec;
            db = dc;
            if (eb - ea).norm() < 1e-14 * eb.norm().max(1.0) {
                break;
            }
        }
        Ok(ShootingResult {
            e: eb,
            det_value: db,
            det_scale: scale,
            converged: db.norm() < 1e-8 * scale,
            channel_rates: self.channel_rates(eb),
        })
    }
}

fn build_sweep(setup: &CertifiedSetup, h: f64, start: f64, e: Complex64, options: &ShootingOptions) -> Result<Sweep, ShootingError> {
    let dir = -start.signum();
    let modes = asymptotic_modes(setup, e, h, start);
    let mut cols = [modes[0].vector, modes[1].vector];
    orthonormalize(&mut cols);
    let mut x = start;
    let mut dt = 0.01 * h;
    let mut nodes = vec![start];
    let mut stage_coeffs = Vec::new();
    let mut reorth_after = Vec::new();
    let mut since_reorth = 0.0;
    let mut rejected = 0usize;
    while x * dir < 0.0 {
        let step = dt.min(x.abs());
        let signed = dir * step;
        let coeffs: [Coeffs; 7] = std::array::from_fn(|s| coeffs_at(setup, x + C[s] * signed));
        let mut err: f64 = 0.0;
        let mut next = cols;
        for (col, out) in cols.iter().zip(next.iter_mut()) {
            let (y, e_vec) = dp_step(&coeffs, e, h, col, signed, true);
            err = err.max(norm(&e_vec.expect("embedded error")) / norm(&y).max(1e-300));
            *out = y;
        }
        let factor = if err > 0.0 { 0.9 * (options.rtol / err).powf(0.2) } else { 5.0 };
        if err <= options.rtol {
            x = if step == x.abs() { 0.0 } else { x + signed };
            cols = next;
            nodes.push(x);
            stage_coeffs.push(std::array::from_fn(|s| coeffs[s]));
            since_reorth += step;
            let reorth = since_reorth >= options.reorth_interval - 1e-12 || x == 0.0;
            if reorth {
                since_reorth = 0.0;
                orthonormalize(&mut cols);
            }
            reorth_after.push(reorth);
            dt = step * factor.clamp(0.2, 5.0);
        } else {
            rejected += 1;
            if rejected > 100_000 || step < 1e-12 {
                return Err(ShootingError::MeshFailure(format!("step size collapsed near x = {x}")));
            }
            dt = step * factor.clamp(0.1, 0.9);
        }
        dt = dt.min(options.reorth_interval);
    }
    Ok(Sweep { start, nodes, stage_coeffs, reorth_after })
}

/// Determinant of the 4×4 matrix whose columns are given, by partial pivoting.
fn det4(cols: [State; 4]) -> Complex64 {
    let mut a = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            a[i][j] = col[i];
        }
    }
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..4 {
        let p = (k..4).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        if a[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..4 {
            let f = a[i][k] / a[k][k];
            for j in k..4 {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
    }
    det
}

/// Refines every pseudo-resonance of the rectangle into a zero of the
/// matching determinant; roots leaving the rectangle are dropped.
pub fn find_resonances_shooting(setup: &CertifiedSetup, rect: &EnergyRectangle, options: &ShootingOptions) -> Result<Vec<ShootingResult>, ShootingError> {
    let problem = ShootingProblem::new(setup, rect.h, options)?;
    let seeds = pseudo_resonances(setup, rect)?;
    let mut out: Vec<ShootingResult> = Vec::new();
    for seed in seeds {
        match problem.refine(seed.e) {
            Ok(res) if rect.contains(res.e) => {
                if !out.iter().any(|o| (o.e - res.e).norm() < 0.1 * rect.h) {
                    out.push(res);
                }
            }
            Ok(res) => log::debug!("shooting root {} left the rectangle", res.e),
            Err(err) => log::warn!("shooting from {} failed: {err}", seed.e),
        }
    }
    out.sort_by(|a, b| a.e.re.total_cmp(&b.e.re));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_problem, Family, ProblemConfig};

    fn tanh1() -> CertifiedSetup {
        CertifiedSetup::from_config(&ProblemConfig::tanh1()).unwrap()
    }

    #[test]
    fn boundary_modes_solve_the_frozen_system() {
        let s = tanh1();
        let e = Complex64::new(0.52, -0.03);
        for x in [-6.0, 6.0] {
            for mode in asymptotic_modes(&s, e, 0.1, x) {
                assert!(mode_residual(&s, e, 0.1, x, &mode) < 1e-8);
            }
        }
        let right = asymptotic_modes(&s, e, 0.1, 6.0);
        assert!(right[0].lambda.re < 0.0, "channel 1 decays to the right");
        let left = asymptotic_modes(&s, e, 0.1, -6.0);
        assert!(left[1].lambda.re > 0.0, "channel 2 decays to the left");
    }

    #[test]
    fn det4_matches_cofactor_expansion() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let cols = [
            [c(1.0, 0.5), c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)],
            [c(0.0, 0.0), c(1.0, -1.0), c(3.0, 0.0), c(0.5, 0.0)],
            [c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, -2.0)],
            [c(1.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        // Laplace expansion as the oracle
        fn minor(m: &[[Complex64; 4]; 4], skip_r: usize, skip_c: usize) -> Complex64 {
            let rows: Vec<usize> = (0..4).filter(|&r| r != skip_r).collect();
            let cs: Vec<usize> = (0..4).filter(|&c| c != skip_c).collect();
            let g = |i: usize, j: usize| m[cs[j]][rows[i]];
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        }
        let mut expected = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            expected += cols[j][0] * minor(&cols, 0, j) * sign;
        }
        assert!((det4(cols) - expected).norm() < 1e-12);
    }

    #[test]
    fn decoupled_determinant_factorizes() {
        let mut cfg = ProblemConfig::tanh1();
        cfg.coupling.r0 = Family::constant(0.0);
        let s = CertifiedSetup::waived(build_problem(&cfg).unwrap());
        let p = ShootingProblem::new(&s, 0.1, &ShootingOptions::default()).unwrap();
        let e = Complex64::new(0.5, -0.02);
        let (left, _) = p.carry(&p.left, e).unwrap();
        let (right, _) = p.carry(&p.right, e).unwrap();
        // channel 1 lives in rows 0-1, channel 2 in rows 2-3
        for col in [left[0], right[0]] {
            assert_eq!((col[2], col[3]), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        }
        let d1 = left[0][0] * right[0][1] - left[0][1] * right[0][0];
        let d2 = left[1][2] * right[1][3] - left[1][3] * right[1][2];
        let full = det4([left[0], left[1], right[0], right[1]]);
        // column order (c1, c2, c1, c2) → one transposition from block order
        assert!((full + d1 * d2).norm() < 1e-12 * full.norm().max(1e-300));
    }

    #[test]
    fn roots_do_not_depend_on_reorthonormalization() {
        let s = tanh1();
        let seed = Complex64::new(0.5298, -0.0434);
        let coarse = ShootingProblem::new(&s, 0.1, &ShootingOptions::default()).unwrap();
        let fine = ShootingProblem::new(&s, 0.1, &ShootingOptions { reorth_interval: 0.05, ..Default::default() }).unwrap();
        let a = coarse.refine(seed).unwrap();
        let b = fine.refine(seed).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.e - b.e).norm() < 1e-8, "{} vs {}", a.e, b.e);
    }

    #[test]
    fn determinant_is_analytic() {
        let s = tanh1();
        let p = ShootingProblem::new(&s, 0.1, &ShootingOptions::default()).unwrap();
        let e = Complex64::new(0.55, -0.04);
        let d = 1e-6;
        let dx = (p.determinant(e + d).unwrap() - p.determinant(e - d).unwrap()) / (2.0 * d);
        let dy = (p.determinant(e + Complex64::new(0.0, d)).unwrap() - p.determinant(e - Complex64::new(0.0, d)).unwrap()) / (2.0 * d);
        // Cauchy–Riemann: ∂D/∂y = i ∂D/∂x
        let cr = (dy - Complex64::i() * dx).norm() / dx.norm();
        assert!(cr < 1e-5, "CR residual {cr}");
    }
}
