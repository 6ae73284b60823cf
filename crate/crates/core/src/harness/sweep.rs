use super::{match_sets, HarnessError, Method, Pairing, ResonanceRow};
use crate::action::period_t;
use crate::model::{CertifiedSetup, ProblemConfig, SpectralConfig};
use crate::quantization::{log_k, pseudo_resonances, EnergyRectangle, PseudoResonance};
use crate::spectral::{resonances_spectral, SpectralEigenvalue, SpectralSettings};
use crate::wkb::{find_resonances_shooting, ShootingOptions, ShootingResult};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

fn default_r() -> f64 {
    2.0
}

fn default_half() -> f64 {
    0.5
}

fn default_methods() -> Vec<Method> {
    vec![Method::Pseudo, Method::Spectral, Method::Shooting]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Problem config; relative paths resolve against the sweep file's directory.
    pub problem: PathBuf,
    pub h_list: Vec<f64>,
    #[serde(default = "default_r")]
    pub r: f64,
    /// Rectangle depth; `None` means `2/T(E0)`.
    #[serde(rename = "M", default)]
    pub m: Option<f64>,
    /// Overrides merged over the problem's own spectral block.
    #[serde(default)]
    pub spectral: SpectralConfig,
    #[serde(default)]
    pub shooting: ShootingOptions,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    pub output_dir: PathBuf,
    /// Matching cap in units of `h`.
    #[serde(default = "default_half")]
    pub cap: f64,
    /// Interior margin in units of `h`.
    #[serde(default = "default_half")]
    pub margin: f64,
}

impl SweepConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: SweepConfig = serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.problem.is_relative() {
            cfg.problem = base.join(&cfg.problem);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.h_list.is_empty() {
            return Err(HarnessError::Config("h_list is empty".into()));
        }
        if let Some(h) = self.h_list.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return Err(HarnessError::Config(format!("h = {h} is not in (0, 1)")));
        }
        if self.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HarnessError::Config("h_list must be strictly decreasing".into()));
        }
        if !(self.r > 0.0) || self.m.is_some_and(|m| !(m > 0.0)) {
            return Err(HarnessError::Config("r and M must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Config("no methods selected".into()));
        }
        Ok(())
    }

    pub fn load_problem(&self) -> Result<CertifiedSetup, HarnessError> {
        let mut problem = ProblemConfig::from_path(&self.problem)?;
        let o = &self.spectral;
        let s = &mut problem.spectral;
        s.n = o.n.or(s.n);
        s.l = o.l.or(s.l);
        s.m_prime = o.m_prime.or(s.m_prime);
        s.theta_safety = o.theta_safety.or(s.theta_safety);
        s.points_per_wavelength = o.points_per_wavelength.or(s.points_per_wavelength);
        Ok(CertifiedSetup::from_config(&problem)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub h: f64,
    pub method: Method,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub pseudo: Complex64,
    pub other: Complex64,
    pub distance: f64,
    pub distance_over_h: f64,
}

/// Pairing of the interior pseudo-resonances with one other method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub pairing: Pairing,
    pub pairs: Vec<MatchedPair>,
    pub unmatched_pseudo: Vec<Complex64>,
    pub unmatched_other: Vec<Complex64>,
    pub max_distance_over_h: Option<f64>,
}

impl MatchSummary {
    fn build(pseudo: &[Complex64], other: &[Complex64], h: f64, cap: f64) -> Self {
        let pairing = match_sets(pseudo, other, cap);
        let pairs = pairing
            .pairs
            .iter()
            .map(|p| MatchedPair { pseudo: pseudo[p.a], other: other[p.b], distance: p.distance, distance_over_h: p.distance / h })
            .collect();
        Self {
            unmatched_pseudo: pairing.unmatched_a.iter().map(|&i| pseudo[i]).collect(),
            unmatched_other: pairing.unmatched_b.iter().map(|&i| other[i]).collect(),
            max_distance_over_h: pairing.max_distance().map(|d| d / h),
            pairs,
            pairing,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HReport {
    pub h: f64,
    pub rect: EnergyRectangle,
    pub pseudo: Option<Vec<PseudoResonance>>,
    pub spectral: Option<Vec<SpectralEigenvalue>>,
    pub shooting: Option<Vec<ShootingResult>>,
    /// `Im E · T(E0) / (−h log(1/h))` per pseudo-resonance.
    pub width_ratios: Vec<f64>,
    pub spectral_match: Option<MatchSummary>,
    pub shooting_match: Option<MatchSummary>,
}

/// `max |E − Ẽ|/h` along the sweep and two log-log slopes of the distance
/// against `h`: one pooled over every matched pair, one through the maxima.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub h: Vec<f64>,
    pub max_distance_over_h: Vec<f64>,
    pub strictly_decreasing: bool,
    pub pooled_exponent: Option<f64>,
    pub max_exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub e0: f64,
    pub t0: f64,
    pub log_k: f64,
    pub r: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub per_h: Vec<HReport>,
    pub spectral_trend: Option<Trend>,
    pub shooting_trend: Option<Trend>,
    pub failures: Vec<CellFailure>,
}

impl MatchReport {
    /// CSV rows in sweep order, methods in the order pseudo, spectral, shooting.
    pub fn rows(&self) -> Vec<ResonanceRow> {
        let mut rows = Vec::new();
        for hr in &self.per_h {
            for p in hr.pseudo.iter().flatten() {
                rows.push(ResonanceRow::from_pseudo(hr.h, p));
            }
            for s in hr.spectral.iter().flatten() {
                rows.push(ResonanceRow::from_spectral(hr.h, s));
            }
            for s in hr.shooting.iter().flatten() {
                rows.push(ResonanceRow::from_shooting(hr.h, s));
            }
        }
        rows
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn trend(per_h: &[HReport], pick: impl Fn(&HReport) -> Option<&MatchSummary>) -> Option<Trend> {
    let mut h = Vec::new();
    let mut max_d = Vec::new();
    let (mut ph, mut pd) = (Vec::new(), Vec::new());
    for hr in per_h {
        let Some(summary) = pick(hr) else { continue };
        let Some(m) = summary.max_distance_over_h else { continue };
        h.push(hr.h);
        max_d.push(m);
        for p in &summary.pairs {
            ph.push(hr.h);
            pd.push(p.distance);
        }
    }
    if h.is_empty() {
        return None;
    }
    let max_abs: Vec<f64> = h.iter().zip(&max_d).map(|(h, d)| h * d).collect();
    Some(Trend {
        strictly_decreasing: max_d.windows(2).all(|w| w[1] < w[0]),
        pooled_exponent: fit_slope(&ph, &pd),
        max_exponent: fit_slope(&h, &max_abs),
        h,
        max_distance_over_h: max_d,
    })
}

enum CellOutput {
    Pseudo(Vec<PseudoResonance>),
    Spectral(Vec<SpectralEigenvalue>),
    Shooting(Vec<ShootingResult>),
}

/// Runs every `(h, method)` cell; failures are recorded and the other cells
/// continue.
pub fn run_cells(
    setup: &CertifiedSetup,
    h_list: &[f64],
    r: f64,
    m: f64,
    methods: &[Method],
    shooting: &ShootingOptions,
    cap: f64,
    margin: f64,
) -> Result<MatchReport, HarnessError> {
    let t0 = period_t(setup, Complex64::new(setup.e0, 0.0)).map_err(|e| HarnessError::Numerical(e.to_string()))?.re;
    let settings = SpectralSettings::resolve(setup, m);
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    let cells: Vec<(usize, Method)> = (0..h_list.len()).flat_map(|i| methods.iter().map(move |&mt| (i, mt))).collect();
    let outputs: Vec<Result<CellOutput, String>> = cells
        .par_iter()
        .map(|&(i, method)| {
            let rect = EnergyRectangle::new(setup.e0, r, m, h_list[i]).map_err(|e| e.to_string())?;
            log::info!("cell h = {}, {}", h_list[i], method.as_str());
            match method {
                Method::Pseudo => pseudo_resonances(setup, &rect).map(CellOutput::Pseudo).map_err(|e| e.to_string()),
                Method::Spectral => resonances_spectral(setup, &rect, &settings)
                    .map(|s| CellOutput::Spectral(s.resonances))
                    .map_err(|e| e.to_string()),
                Method::Shooting => find_resonances_shooting(setup, &rect, shooting).map(CellOutput::Shooting).map_err(|e| e.to_string()),
            }
        })
        .collect();

    let mut per_h: Vec<HReport> = Vec::new();
    for &h in h_list {
        let rect = EnergyRectangle::new(setup.e0, r, m, h).map_err(|e| HarnessError::Config(e.to_string()))?;
        per_h.push(HReport {
            h,
            rect,
            pseudo: None,
            spectral: None,
            shooting: None,
            width_ratios: Vec::new(),
            spectral_match: None,
            shooting_match: None,
        });
    }
    let mut failures = Vec::new();
    for (&(i, method), out) in cells.iter().zip(outputs) {
        let hr = &mut per_h[i];
        match out {
            Ok(CellOutput::Pseudo(p)) => hr.pseudo = Some(p),
            Ok(CellOutput::Spectral(s)) => hr.spectral = Some(s),
            Ok(CellOutput::Shooting(s)) => hr.shooting = Some(s),
            Err(message) => {
                log::warn!("cell h = {}, {} failed: {message}", hr.h, method.as_str());
                failures.push(CellFailure { h: hr.h, method, message });
            }
        }
    }

    for hr in &mut per_h {
        let h = hr.h;
        let Some(pseudo) = &hr.pseudo else { continue };
        let crude = -h * (1.0 / h).ln();
        hr.width_ratios = pseudo.iter().map(|p| p.e.im * t0 / crude).collect();
        let interior = |e: &Complex64| hr.rect.contains_interior(*e, margin * h);
        let p_in: Vec<Complex64> = pseudo.iter().map(|p| p.e).filter(interior).collect();
        if let Some(spec) = &hr.spectral {
            let s_in: Vec<Complex64> = spec.iter().map(|s| s.e).filter(interior).collect();
            hr.spectral_match = Some(MatchSummary::build(&p_in, &s_in, h, cap * h));
        }
        if let Some(shoot) = &hr.shooting {
            let s_in: Vec<Complex64> = shoot.iter().filter(|s| s.converged).map(|s| s.e).filter(interior).collect();
            hr.shooting_match = Some(MatchSummary::build(&p_in, &s_in, h, cap * h));
        }
    }

    Ok(MatchReport {
        e0: setup.e0,
        t0,
        log_k: log_k(setup),
        r,
        m,
        spectral_trend: trend(&per_h, |hr| hr.spectral_match.as_ref()),
        shooting_trend: trend(&per_h, |hr| hr.shooting_match.as_ref()),
        per_h,
        failures,
    })
}

/// `M = 2/T(E0)`: a rectangle deep enough to hold two widths.
pub fn default_depth(setup: &CertifiedSetup) -> Result<f64, HarnessError> {
    let t0 = period_t(setup, Complex64::new(setup.e0, 0.0)).map_err(|e| HarnessError::Numerical(e.to_string()))?;
    Ok(2.0 / t0.re)
}

/// Loads and certifies the problem, runs every cell and writes the outputs.
pub fn run_sweep(cfg: &SweepConfig) -> Result<MatchReport, HarnessError> {
    cfg.validate()?;
    let setup = cfg.load_problem()?;
    let m = match cfg.m {
        Some(m) => m,
        None => default_depth(&setup)?,
    };
    let report = run_cells(&setup, &cfg.h_list, cfg.r, m, &cfg.methods, &cfg.shooting, cfg.cap, cfg.margin)?;
    super::write_outputs(&report, &cfg.output_dir)?;
    Ok(report)
}
