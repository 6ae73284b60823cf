//! Resonances as eigenvalues of the exterior-rotated operator.
//!
//! Each diagonal block is discretized in the form
//! `−h² (ζ')⁻¹ d/dx (ζ')⁻¹ d/dx + V_j(ζ)`, expanded as
//! `−h² [ζ'⁻² D2 − ζ''ζ'⁻³ D1] + V_j(ζ)` so that only the 4th-order second
//! difference touches the highest derivative (composing two first differences
//! would decouple odd and even grid points). The coupling blocks are
//! `h(r0(ζ) + h r1(ζ) ζ'⁻¹ D1)` and `h(r0(ζ) − h ζ'⁻¹ D1 r1(ζ))`, the latter
//! being the formal adjoint `r0 − h r1' − r1 h d/dx` written in divergence form.

mod distortion;

pub use distortion::{build_distortion, Distortion};

use crate::model::{CertifiedSetup, ModelError, System};
use crate::quantization::EnergyRectangle;
use faer::{c64, Mat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Eigenvalues moving by less than this fraction of `h` under `N → 1.5N` count as grid-converged.
pub const GRID_STABILITY: f64 = 1e-2;
/// Floor of the θ-stability threshold, as a fraction of `h`.
pub const THETA_STABILITY: f64 = 1e-3;
/// Factor applied to θ for the stability re-solve.
pub const THETA_RATIO: f64 = 1.25;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid distortion angle: {0}")]
    InvalidAngle(String),
    #[error("grid too coarse: Δx = {dx:.4e} exceeds {limit:.4e}")]
    GridTooCoarse { dx: f64, limit: f64 },
    #[error("box half-length L = {l} is below 3·R0 = {min}")]
    BoxTooSmall { l: f64, min: f64 },
    #[error("ζ_θ({x}) = {zeta} leaves the analyticity domain")]
    ConeViolation { x: f64, zeta: Complex64 },
    #[error("eigensolver failed: {0}")]
    EigenSolverFailure(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Dense `2N × 2N` matrix in channel-blocked layout.
#[derive(Clone, Debug)]
pub struct DiscretizedOperator {
    pub n: usize,
    pub l: f64,
    pub h: f64,
    pub theta: f64,
    pub matrix: Mat<c64>,
}

impl DiscretizedOperator {
    pub fn grid(&self) -> Vec<f64> {
        grid(self.n, self.l)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, SpectralError> {
        self.matrix
            .eigenvalues()
            .map_err(|e| SpectralError::EigenSolverFailure(format!("{e:?}")))
    }
}

/// Interior points `x_j = −L + jΔx`, `j = 1..N`, `Δx = 2L/(N + 1)`.
pub fn grid(n: usize, l: f64) -> Vec<f64> {
    let dx = 2.0 * l / (n + 1) as f64;
    (1..=n).map(|j| -l + j as f64 * dx).collect()
}

const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];

/// Second-difference weight between rows `i` and `i + k − 2` with odd reflection
/// across the Dirichlet ends (the ghost value beyond the wall is `−u_1`).
fn d2_entry(i: usize, k: usize, n: usize) -> f64 {
    let mut w = D2[k];
    if k == 2 && (i == 0 || i == n - 1) {
        w += 1.0;
    }
    w
}

pub fn assemble_ptheta(setup: &CertifiedSetup, h: f64, dist: &Distortion, n: usize, l: f64) -> Result<DiscretizedOperator, SpectralError> {
    assemble_system(&setup.system, setup.e0, h, dist, n, l)
}

/// Assembly from the bare coefficients, for diagnostic systems that do not
/// satisfy the crossing hypotheses (free or decoupled channels).
///
/// `e_ref` sets the resolution requirement `2L/N ≤ (2πh/√e_ref)/10`.
pub fn assemble_system(system: &System, e_ref: f64, h: f64, dist: &Distortion, n: usize, l: f64) -> Result<DiscretizedOperator, SpectralError> {
    let min_l = 3.0 * system.cone.r0;
    if l < min_l - 1e-12 {
        return Err(SpectralError::BoxTooSmall { l, min: min_l });
    }
    let limit = 2.0 * std::f64::consts::PI * h / e_ref.sqrt() / 10.0;
    let dx_nominal = 2.0 * l / n as f64;
    if n < 5 || dx_nominal > limit {
        return Err(SpectralError::GridTooCoarse { dx: dx_nominal, limit });
    }
    let xs = grid(n, l);
    let dx = 2.0 * l / (n + 1) as f64;

    let mut zeta = Vec::with_capacity(n);
    let mut inv_zp = Vec::with_capacity(n);
    let mut drift = Vec::with_capacity(n);
    for &x in &xs {
        let z = dist.zeta(x);
        for model in [&system.v1, &system.v2, &system.r0, &system.r1] {
            if !model.in_domain(z) {
                return Err(SpectralError::ConeViolation { x, zeta: z });
            }
        }
        let zp = dist.zeta_prime(x);
        let zpp = dist.zeta_second(x);
        zeta.push(z);
        inv_zp.push(zp.inv());
        drift.push(zpp / (zp * zp * zp));
    }
    let v1: Vec<Complex64> = zeta.iter().map(|&z| system.v1.at(z)).collect();
    let v2: Vec<Complex64> = zeta.iter().map(|&z| system.v2.at(z)).collect();
    let r0: Vec<Complex64> = zeta.iter().map(|&z| system.r0.at(z)).collect();
    let r1: Vec<Complex64> = zeta.iter().map(|&z| system.r1.at(z)).collect();

    let h2 = h * h;
    let c2 = 1.0 / (12.0 * dx * dx);
    let c1 = 1.0 / (12.0 * dx);
    let mut m = Mat::<c64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let kinetic2 = inv_zp[i] * inv_zp[i] * (-h2 * c2);
        let kinetic1 = drift[i] * (h2 * c1);
        for k in 0..5 {
            let Some(j) = (i + k).checked_sub(2).filter(|&j| j < n) else {
                continue;
            };
            let lap = kinetic2 * d2_entry(i, k, n) + kinetic1 * D1[k];
            m[(i, j)] += lap;
            m[(n + i, n + j)] += lap;
            if D1[k] != 0.0 {
                // upper: h² r1(ζ_i) ζ'_i⁻¹ D1_ij ; lower: −h² ζ'_i⁻¹ D1_ij r1(ζ_j)
                let d = inv_zp[i] * (h2 * c1 * D1[k]);
                m[(i, n + j)] += d * r1[i];
                m[(n + i, j)] -= d * r1[j];
            }
        }
        m[(i, i)] += v1[i];
        m[(n + i, n + i)] += v2[i];
        m[(i, n + i)] += r0[i] * h;
        m[(n + i, i)] += r0[i] * h;
    }
    Ok(DiscretizedOperator { n, l, h, theta: dist.theta, matrix: m })
}

/// Discretization knobs with their defaults filled in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralSettings {
    /// Points per channel; `None` derives it from `points_per_wavelength`.
    pub n: Option<usize>,
    pub l: f64,
    pub m_prime: f64,
    pub theta_safety: f64,
    pub points_per_wavelength: f64,
}

impl SpectralSettings {
    /// Config values where present; otherwise `L = 3R0`, `M' = 2M`,
    /// safety 0.9 and 30 points per wavelength `2πh/√E0`.
    pub fn resolve(setup: &CertifiedSetup, m: f64) -> Self {
        let cfg = &setup.spectral;
        Self {
            n: cfg.n,
            l: cfg.l.unwrap_or(3.0 * setup.system.cone.r0),
            m_prime: cfg.m_prime.unwrap_or(2.0 * m),
            theta_safety: cfg.theta_safety.unwrap_or(0.9),
            points_per_wavelength: cfg.points_per_wavelength.unwrap_or(30.0),
        }
    }

    pub fn grid_size(&self, e0: f64, h: f64) -> usize {
        match self.n {
            Some(n) => n,
            None => {
                let wavelength = 2.0 * std::f64::consts::PI * h / e0.sqrt();
                let n = (self.points_per_wavelength * 2.0 * self.l / wavelength).ceil() as usize;
                n + n % 2
            }
        }
    }

    /// `θ = M' h log(1/h)`.
    pub fn theta(&self, h: f64) -> f64 {
        self.m_prime * h * (1.0 / h).ln()
    }
}

fn refined(n: usize) -> usize {
    let m = (1.5 * n as f64).round() as usize;
    m + m % 2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEigenvalue {
    #[serde(rename = "E")]
    pub e: Complex64,
    /// Distance to the nearest eigenvalue after `θ → 1.25θ`.
    pub theta_shift: f64,
    /// Distance to the nearest eigenvalue after `N → 1.5N`.
    pub grid_shift: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResonances {
    /// Eigenvalues in the rectangle that passed both filters, sorted by `Re E`.
    pub resonances: Vec<SpectralEigenvalue>,
    /// Eigenvalues in the rectangle that failed a filter.
    pub rejected: Vec<SpectralEigenvalue>,
    pub theta_used: f64,
    pub n: usize,
    pub l: f64,
}

fn nearest(e: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min)
}

/// θ-stable eigenvalues of the distorted operator inside the rectangle.
///
/// An eigenvalue is kept when it moves by less than `1e-2·h` under `N → 1.5N`
/// and by less than `max(1e-3·h, grid shift)` under `θ → 1.25θ`; rotated
/// continuum eigenvalues follow the rotation and fail the second test.
pub fn resonances_spectral(setup: &CertifiedSetup, rect: &EnergyRectangle, settings: &SpectralSettings) -> Result<SpectralResonances, SpectralError> {
    let h = rect.h;
    let theta = settings.theta(h);
    let theta0 = setup.system.cone.theta0;
    if THETA_RATIO * theta > settings.theta_safety * theta0 {
        return Err(SpectralError::InvalidAngle(format!(
            "1.25·θ = {:.4} exceeds {} · θ0 = {:.4}",
            THETA_RATIO * theta,
            settings.theta_safety,
            settings.theta_safety * theta0
        )));
    }
    let r0 = setup.system.cone.r0;
    let n = settings.grid_size(setup.e0, h);
    let l = settings.l;
    let base = build_distortion(r0, theta, theta0)?;
    let turned = build_distortion(r0, THETA_RATIO * theta, theta0)?;

    let solve = |dist: &Distortion, n: usize| -> Result<Vec<Complex64>, SpectralError> {
        let op = assemble_ptheta(setup, h, dist, n, l)?;
        log::info!("eigensolve h = {h}, θ = {:.4}, N = {n}", dist.theta);
        op.eigenvalues()
    };
    let ((base_ev, turned_ev), fine_ev) = rayon::join(
        || rayon::join(|| solve(&base, n), || solve(&turned, n)),
        || solve(&base, refined(n)),
    );
    let (base_ev, turned_ev, fine_ev) = (base_ev?, turned_ev?, fine_ev?);

    let mut resonances = Vec::new();
    let mut rejected = Vec::new();
    for &e in base_ev.iter().filter(|e| rect.contains(**e)) {
        let theta_shift = nearest(e, &turned_ev);
        let grid_shift = nearest(e, &fine_ev);
        let stable = grid_shift < GRID_STABILITY * h && theta_shift < (THETA_STABILITY * h).max(grid_shift);
        let item = SpectralEigenvalue { e, theta_shift, grid_shift, stable };
        if stable {
            resonances.push(item);
        } else {
            rejected.push(item);
        }
    }
    resonances.sort_by(|a, b| a.e.re.total_cmp(&b.e.re));
    rejected.sort_by(|a, b| a.e.re.total_cmp(&b.e.re));
    Ok(SpectralResonances { resonances, rejected, theta_used: theta, n, l })
}

/// `1/σ_min(A − E)` for the assembled matrix `A` at `θ = M' h log(1/h)`.
pub fn resolvent_probe(setup: &CertifiedSetup, e: Complex64, h: f64, settings: &SpectralSettings) -> Result<f64, SpectralError> {
    let theta = settings.theta(h);
    let dist = build_distortion(setup.system.cone.r0, theta, setup.system.cone.theta0)?;
    let n = settings.grid_size(setup.e0, h);
    let mut op = assemble_ptheta(setup, h, &dist, n, settings.l)?;
    for i in 0..2 * n {
        op.matrix[(i, i)] -= e;
    }
    let sv = op
        .matrix
        .singular_values()
        .map_err(|err| SpectralError::EigenSolverFailure(format!("{err:?}")))?;
    let smallest = sv.last().copied().unwrap_or(0.0);
    Ok(if smallest > 0.0 { 1.0 / smallest } else { f64::INFINITY })
}
