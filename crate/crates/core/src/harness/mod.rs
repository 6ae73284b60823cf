//! Sweeps over `h`, cross-matching of the three resonance sets, and the
//! flat-file outputs consumed by plotting scripts.

mod matching;
mod output;
mod sweep;

pub use matching::{match_sets, Pair, Pairing};
pub use output::{write_csv, write_outputs, write_plot_data, CSV_HEADER};
pub use sweep::{default_depth, fit_slope, run_cells, run_sweep, CellFailure, HReport, MatchReport, MatchSummary, MatchedPair, SweepConfig, Trend};

use crate::model::{HypothesisReport, ModelError};
use crate::quantization::PseudoResonance;
use crate::spectral::SpectralEigenvalue;
use crate::wkb::ShootingResult;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("hypotheses failed:\n{0}")]
    Hypothesis(HypothesisReport),
    /// A turning-point scan failed before a report could be assembled.
    #[error("hypothesis failed: {0}")]
    TurningPoints(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl HarnessError {
    /// Process exit code: 1 configuration or I/O, 2 hypothesis failure, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 1,
            HarnessError::Hypothesis(_) | HarnessError::TurningPoints(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

impl From<ModelError> for HarnessError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::HypothesisFailure(report) => HarnessError::Hypothesis(report),
            ModelError::Io(e) => HarnessError::Io(e),
            e @ (ModelError::NoTurningPoint { .. } | ModelError::MultipleTurningPoints { .. }) => HarnessError::TurningPoints(e.to_string()),
            other => HarnessError::Config(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pseudo,
    Spectral,
    Shooting,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pseudo => "pseudo",
            Method::Spectral => "spectral",
            Method::Shooting => "shooting",
        }
    }
}

/// One CSV line. `residual` is each method's own certificate: `|C0 − 1|` for
/// pseudo-resonances, the `N → 1.5N` shift for spectral eigenvalues and
/// `|D|/scale` for shooting roots. `stability` is the `θ → 1.25θ` shift for
/// spectral eigenvalues, the convergence flag for shooting roots and empty
/// for pseudo-resonances.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceRow {
    pub method: Method,
    pub h: f64,
    pub n: Option<i64>,
    pub e: Complex64,
    pub residual: f64,
    pub stability: String,
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResonanceRow {
    pub fn from_pseudo(h: f64, p: &PseudoResonance) -> Self {
        Self { method: Method::Pseudo, h, n: Some(p.n), e: p.e, residual: p.residual, stability: String::new() }
    }

    pub fn from_spectral(h: f64, s: &SpectralEigenvalue) -> Self {
        Self { method: Method::Spectral, h, n: None, e: s.e, residual: s.grid_shift, stability: fmt_float(s.theta_shift) }
    }

    pub fn from_shooting(h: f64, s: &ShootingResult) -> Self {
        let stability = if s.converged { "converged" } else { "unconverged" };
        Self {
            method: Method::Shooting,
            h,
            n: None,
            e: s.e,
            residual: s.det_value.norm() / s.det_scale,
            stability: stability.to_string(),
        }
    }

    pub fn fields(&self) -> [String; 7] {
        [
            self.method.as_str().to_string(),
            fmt_float(self.h),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            fmt_float(self.e.re),
            fmt_float(self.e.im),
            fmt_float(self.residual),
            self.stability.clone(),
        ]
    }
}
