//! The two-channel operator
//!
//! ```text
//! P(h) = [ h²D² + V1      h W   ]      W  = r0 + r1·h d/dx
//!        [ h W*       h²D² + V2 ]      W* = r0 − h r1' − r1·h d/dx
//! ```
//!
//! together with the checks that make a parameter set a usable instance:
//! bounded analytic potentials with limits straddling `E0` in opposite order,
//! single simple turning points, a transversal crossing at the origin with
//! `V1'(0) > V2'(0)`, and a nonvanishing crossing coupling
//! `W0 = r0(0) + i r1(0)√E0`.

mod family;
mod hypotheses;

pub use family::{Family, KNOWN_FAMILIES};
pub use hypotheses::{validate_hypotheses, Hypothesis, HypothesisCheck, HypothesisReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Scan window and step used for every real-axis sign scan.
pub const SCAN_HALF_WIDTH: f64 = 50.0;
pub const SCAN_STEP: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),
    #[error("invalid problem config: {0}")]
    InvalidConfig(String),
    #[error("V{channel} − E0 has no real sign change on [−{SCAN_HALF_WIDTH}, {SCAN_HALF_WIDTH}]")]
    NoTurningPoint { channel: usize },
    #[error("V{channel} − E0 changes sign {count} times on the scan interval")]
    MultipleTurningPoints { channel: usize, count: usize },
    #[error("z = {z} lies outside the analyticity domain of the potential")]
    OutsideAnalyticityDomain { z: Complex64 },
    #[error("hypotheses failed: {0}")]
    HypothesisFailure(HypothesisReport),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Channel index of the 2×2 system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    One,
    Two,
}

impl Channel {
    pub fn index(self) -> usize {
        match self {
            Channel::One => 1,
            Channel::Two => 2,
        }
    }

    pub fn from_index(j: usize) -> Option<Self> {
        match j {
            1 => Some(Channel::One),
            2 => Some(Channel::Two),
            _ => None,
        }
    }
}

/// The cone `{ |Im x| < tan θ0 |Re x|, |Re x| > R0 }` where the data continue analytically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub theta0: f64,
    #[serde(rename = "R0", default = "default_r0")]
    pub r0: f64,
}

fn default_r0() -> f64 {
    5.0
}

impl Cone {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re.abs() > self.r0 && z.im.abs() < self.theta0.tan() * z.re.abs()
    }
}

/// A scalar coefficient of the system with its analyticity data.
#[derive(Clone, Debug)]
pub struct PotentialModel {
    family: Family,
    cone: Cone,
    limits: (f64, f64),
    rational_poles: Vec<Complex64>,
}

impl PotentialModel {
    pub fn new(family: Family, cone: Cone) -> Result<Self, ModelError> {
        family.check_bounded().map_err(ModelError::InvalidConfig)?;
        let limits = family.limits();
        let rational_poles = family.rational_poles();
        Ok(Self { family, cone, limits, rational_poles })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn cone(&self) -> Cone {
        self.cone
    }

    /// `(v⁻, v⁺)`.
    pub fn limits(&self) -> (f64, f64) {
        self.limits
    }

    /// Unchecked evaluation; callers are responsible for staying in the domain.
    #[inline]
    pub fn at(&self, z: Complex64) -> Complex64 {
        self.family.eval(z)
    }

    #[inline]
    pub fn at_real(&self, x: f64) -> f64 {
        self.family.eval_real(x)
    }

    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.family.derivative(z)
    }

    #[inline]
    pub fn derivative_real(&self, x: f64) -> f64 {
        self.family.derivative_real(x)
    }

    /// Half-width of the pole-free strip around the real axis.
    pub fn strip_half_width(&self) -> f64 {
        let rational = self
            .rational_poles
            .iter()
            .map(|p| p.im.abs())
            .fold(f64::INFINITY, f64::min);
        self.family.tanh_strip_half_width().min(rational)
    }

    fn pole_distance(&self, z: Complex64) -> f64 {
        let rational = self
            .rational_poles
            .iter()
            .map(|p| (z - p).norm())
            .fold(f64::INFINITY, f64::min);
        self.family.tanh_pole_distance(z).min(rational)
    }

    /// Admissible points: the cone Σ, or the half-strip `|Im z| ≤ strip/2` about the
    /// real axis; in both cases at least `1e-2·max(1, |z|)` away from any pole.
    pub fn in_domain(&self, z: Complex64) -> bool {
        if !z.re.is_finite() || !z.im.is_finite() {
            return false;
        }
        if self.pole_distance(z) < 1e-2 * z.norm().max(1.0) {
            return false;
        }
        z.im == 0.0 || self.cone.contains(z) || z.im.abs() <= 0.5 * self.strip_half_width()
    }

    pub fn eval_checked(&self, z: Complex64) -> Result<Complex64, ModelError> {
        if self.in_domain(z) {
            Ok(self.at(z))
        } else {
            Err(ModelError::OutsideAnalyticityDomain { z })
        }
    }
}

/// The first-order coupling `W = r0 + r1·h d/dx` and its crossing value `W0`.
#[derive(Clone, Debug)]
pub struct CouplingModel {
    pub r0: PotentialModel,
    pub r1: PotentialModel,
    pub w0: Complex64,
}

impl CouplingModel {
    pub fn new(r0: PotentialModel, r1: PotentialModel, e0: f64) -> Self {
        let w0 = Complex64::new(r0.at_real(0.0), r1.at_real(0.0) * e0.sqrt());
        Self { r0, r1, w0 }
    }

    pub fn recompute_w0(&self, e0: f64) -> Complex64 {
        Complex64::new(self.r0.at_real(0.0), self.r1.at_real(0.0) * e0.sqrt())
    }

    /// True when both coefficients are the zero constant.
    pub fn is_zero(&self) -> bool {
        let zero = |m: &PotentialModel| match m.family() {
            Family::Constant { value } => *value == 0.0,
            Family::Tanh { a, c, .. } => *a == 0.0 && *c == 0.0,
            _ => false,
        };
        zero(&self.r0) && zero(&self.r1)
    }
}

/// Operator coefficients alone, without a reference energy.
#[derive(Clone, Debug)]
pub struct System {
    pub v1: PotentialModel,
    pub v2: PotentialModel,
    pub r0: PotentialModel,
    pub r1: PotentialModel,
    pub cone: Cone,
}

impl System {
    pub fn potential(&self, channel: Channel) -> &PotentialModel {
        match channel {
            Channel::One => &self.v1,
            Channel::Two => &self.v2,
        }
    }
}

/// Spectral discretization knobs carried in the problem config.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "M_prime", default, skip_serializing_if = "Option::is_none")]
    pub m_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_safety: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_wavelength: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub r0: Family,
    pub r1: Family,
}

/// On-disk problem definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(rename = "V1")]
    pub v1: Family,
    #[serde(rename = "V2")]
    pub v2: Family,
    pub coupling: CouplingConfig,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub cone: Cone,
    #[serde(default)]
    pub spectral: SpectralConfig,
}

fn check_family_tags(value: &serde_json::Value) -> Result<(), ModelError> {
    let Some(obj) = value.as_object() else {
        return Err(ModelError::InvalidConfig("potential must be a JSON object".into()));
    };
    let tag = obj
        .get("family")
        .and_then(|t| t.as_str())
        .ok_or_else(|| ModelError::InvalidConfig("potential is missing `family`".into()))?;
    if !KNOWN_FAMILIES.contains(&tag) {
        return Err(ModelError::UnknownFamily(tag.to_string()));
    }
    if let Some(terms) = obj.get("terms").and_then(|t| t.as_array()) {
        terms.iter().try_for_each(check_family_tags)?;
    }
    Ok(())
}

impl ProblemConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::InvalidConfig(e.to_string()))?;
        for key in ["V1", "V2"] {
            if let Some(v) = value.get(key) {
                check_family_tags(v)?;
            }
        }
        if let Some(c) = value.get("coupling") {
            for key in ["r0", "r1"] {
                if let Some(v) = c.get(key) {
                    check_family_tags(v)?;
                }
            }
        }
        serde_json::from_value(value).map_err(|e| ModelError::InvalidConfig(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// The reference benchmark: `V1 = tanh x`, `V2 = −tanh x`, `E0 = 1/2`, `r0 = 1`, `r1 = 0`.
    pub fn tanh1() -> Self {
        Self {
            v1: Family::tanh(1.0, 1.0),
            v2: Family::tanh(-1.0, 1.0),
            coupling: CouplingConfig { r0: Family::constant(1.0), r1: Family::constant(0.0) },
            e0: 0.5,
            cone: Cone { theta0: 1.0, r0: 2.0 },
            spectral: SpectralConfig::default(),
        }
    }
}

/// A parsed problem instance with its real turning points at `E0`.
#[derive(Clone, Debug)]
pub struct ProblemSetup {
    pub system: System,
    pub coupling: CouplingModel,
    pub e0: f64,
    pub x1_0: f64,
    pub x2_0: f64,
    /// `(V1'(0), V2'(0))`.
    pub slopes: (f64, f64),
    pub spectral: SpectralConfig,
}

impl ProblemSetup {
    pub fn potential(&self, channel: Channel) -> &PotentialModel {
        self.system.potential(channel)
    }

    pub fn w0(&self) -> Complex64 {
        self.coupling.w0
    }

    /// `V1'(0) − V2'(0)`.
    pub fn slope_gap(&self) -> f64 {
        self.slopes.0 - self.slopes.1
    }

    pub fn turning_point_at_e0(&self, channel: Channel) -> f64 {
        match channel {
            Channel::One => self.x1_0,
            Channel::Two => self.x2_0,
        }
    }

    /// `V_j(z)` with the analyticity-domain check.
    pub fn eval_potential(&self, channel: Channel, z: Complex64) -> Result<Complex64, ModelError> {
        self.potential(channel).eval_checked(z)
    }
}

/// Grid point `k` of the real-axis scan; exact zero at the middle index.
pub(crate) fn scan_point(k: usize) -> f64 {
    (k as f64 - SCAN_HALF_WIDTH / SCAN_STEP) * SCAN_STEP
}

pub(crate) fn scan_len() -> usize {
    (2.0 * SCAN_HALF_WIDTH / SCAN_STEP).round() as usize + 1
}

/// Brackets of sign changes of `f` on the scan grid.
pub(crate) fn sign_changes(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev_x = scan_point(0);
    let mut prev = f(prev_x) > 0.0;
    for k in 1..scan_len() {
        let x = scan_point(k);
        let cur = f(x) > 0.0;
        if cur != prev {
            out.push((prev_x, x));
        }
        prev = cur;
        prev_x = x;
    }
    out
}

pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn locate_turning_point(v: &PotentialModel, e0: f64, channel: usize) -> Result<f64, ModelError> {
    let f = |x: f64| v.at_real(x) - e0;
    let brackets = sign_changes(f);
    match brackets.len() {
        0 => Err(ModelError::NoTurningPoint { channel }),
        1 => Ok(bisect(f, brackets[0].0, brackets[0].1)),
        count => Err(ModelError::MultipleTurningPoints { channel, count }),
    }
}

/// Parses the families, locates the real turning points and the crossing slopes.
pub fn build_problem(config: &ProblemConfig) -> Result<ProblemSetup, ModelError> {
    if !(config.e0 > 0.0 && config.e0.is_finite()) {
        return Err(ModelError::InvalidConfig(format!("E0 must be positive, got {}", config.e0)));
    }
    let cone = config.cone;
    if !(cone.theta0 > 0.0 && cone.theta0 < std::f64::consts::FRAC_PI_2) || !(cone.r0 > 0.0) {
        return Err(ModelError::InvalidConfig(format!(
            "cone needs 0 < theta0 < π/2 and R0 > 0, got theta0 = {}, R0 = {}",
            cone.theta0, cone.r0
        )));
    }
    let v1 = PotentialModel::new(config.v1.clone(), cone)?;
    let v2 = PotentialModel::new(config.v2.clone(), cone)?;
    let r0 = PotentialModel::new(config.coupling.r0.clone(), cone)?;
    let r1 = PotentialModel::new(config.coupling.r1.clone(), cone)?;
    let x1_0 = locate_turning_point(&v1, config.e0, 1)?;
    let x2_0 = locate_turning_point(&v2, config.e0, 2)?;
    let slopes = (v1.derivative_real(0.0), v2.derivative_real(0.0));
    let coupling = CouplingModel::new(r0.clone(), r1.clone(), config.e0);
    Ok(ProblemSetup {
        system: System { v1, v2, r0, r1, cone },
        coupling,
        e0: config.e0,
        x1_0,
        x2_0,
        slopes,
        spectral: config.spectral.clone(),
    })
}

/// A setup whose hypothesis report passed every check.
///
/// Everything downstream of the model takes this type, so an uncertified
/// instance cannot reach the quantization, action or WKB code.
#[derive(Clone, Debug)]
pub struct CertifiedSetup {
    setup: ProblemSetup,
    report: HypothesisReport,
}

impl CertifiedSetup {
    pub fn certify(setup: ProblemSetup) -> Result<Self, ModelError> {
        let report = validate_hypotheses(&setup);
        if report.all_passed() {
            Ok(Self { setup, report })
        } else {
            Err(ModelError::HypothesisFailure(report))
        }
    }

    pub fn from_config(config: &ProblemConfig) -> Result<Self, ModelError> {
        Self::certify(build_problem(config)?)
    }

    /// Wraps a setup regardless of its report, for diagnostic runs such as the
    /// decoupled `W = 0` system. The report is kept and can be inspected.
    pub fn waived(setup: ProblemSetup) -> Self {
        let report = validate_hypotheses(&setup);
        Self { setup, report }
    }

    pub fn report(&self) -> &HypothesisReport {
        &self.report
    }

    pub fn into_inner(self) -> ProblemSetup {
        self.setup
    }
}

impl std::ops::Deref for CertifiedSetup {
    type Target = ProblemSetup;

    fn deref(&self) -> &ProblemSetup {
        &self.setup
    }
}
