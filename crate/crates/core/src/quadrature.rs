//! Gauss–Jacobi rules on `[−1, 1]` for the weight `(1 − s)^α (1 + s)^β`,
//! computed by Golub–Welsch from the three-term recurrence.

use faer::{Mat, Side};
use statrs::function::gamma::gamma;
use std::sync::OnceLock;

/// Node count of the shared rules; far beyond the analytic integrands' needs.
pub const DEFAULT_NODES: usize = 64;

#[derive(Clone, Debug)]
pub struct GaussRule {
    pub alpha: f64,
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one node");
        assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed −1");
        let ab = alpha + beta;
        let diag: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    (beta - alpha) / (ab + 2.0)
                } else {
                    let s = 2.0 * k as f64 + ab;
                    (beta * beta - alpha * alpha) / (s * (s + 2.0))
                }
            })
            .collect();
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let kf = k as f64;
                let s = 2.0 * kf + ab;
                let b2 = if k == 1 {
                    // closed form with the removable (1 + α + β) factor cancelled
                    4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
                };
                b2.sqrt()
            })
            .collect();
        let jacobi = Mat::<f64>::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i == j + 1 {
                off[j]
            } else if j == i + 1 {
                off[i]
            } else {
                0.0
            }
        });
        let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
        let evd = jacobi
            .self_adjoint_eigen(Side::Lower)
            .expect("symmetric tridiagonal eigenproblem");
        let u = evd.U();
        let s = evd.S();
        let nodes: Vec<f64> = (0..n).map(|i| s[i]).collect();
        let weights: Vec<f64> = (0..n).map(|i| mu0 * u[(0, i)] * u[(0, i)]).collect();
        Self { alpha, beta, nodes, weights }
    }

    pub fn legendre(n: usize) -> Self {
        Self::jacobi(n, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Plain Gauss–Legendre, used for smooth phase integrals.
pub fn legendre() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::legendre(DEFAULT_NODES))
}

/// Weight `(1 − s)^{1/2}`: integrands vanishing like a square root at `s = 1`.
pub fn jacobi_half() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::jacobi(DEFAULT_NODES, 0.5, 0.0))
}

/// Weight `(1 − s)^{−1/2}`: inverse square-root singularity at `s = 1`.
pub fn jacobi_minus_half() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::jacobi(DEFAULT_NODES, -0.5, 0.0))
}
