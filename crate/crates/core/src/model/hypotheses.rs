use super::{bisect, sign_changes, ProblemSetup};
use serde::Serialize;
use std::fmt;

/// Distance (in units of `R0`) at which the limits are compared with the data.
const LIMIT_PROBE: f64 = 50.0;
const LIMIT_TOL: f64 = 1e-8;
const SLOPE_TOL: f64 = 1e-8;
const CROSSING_TOL: f64 = 1e-12;
const COUPLING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// Limits at ±∞ exist and match the closed forms.
    Limits,
    /// `v1⁻ < E0 < v1⁺` and `v2⁺ < E0 < v2⁻`.
    LimitOrdering,
    /// One simple turning point per channel, on opposite sides of the crossing.
    TurningPoints,
    /// `V1(0) = V2(0) = 0`, `V1'(0) > V2'(0)`, and no other crossing.
    Crossing,
    /// `W0 ≠ 0`.
    Coupling,
    /// Both turning points lie inside `|x| < R0`.
    ConeExtent,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn passed(&self, hypothesis: Hypothesis) -> bool {
        self.checks.iter().filter(|c| c.hypothesis == hypothesis).all(|c| c.passed)
    }

    fn push(&mut self, hypothesis: Hypothesis, name: &str, passed: bool, detail: String) {
        self.checks.push(HypothesisCheck { hypothesis, name: name.to_string(), passed, detail });
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<_> = self.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        if failed.is_empty() {
            write!(f, "all {} checks passed", self.checks.len())
        } else {
            write!(f, "{}", failed.join("; "))
        }
    }
}

pub fn validate_hypotheses(setup: &ProblemSetup) -> HypothesisReport {
    let mut report = HypothesisReport::default();
    let sys = &setup.system;
    let e0 = setup.e0;
    let far = LIMIT_PROBE * sys.cone.r0;

    for (j, v) in [(1, &sys.v1), (2, &sys.v2)] {
        let (lm, lp) = v.limits();
        let (am, ap) = (v.at_real(-far), v.at_real(far));
        let err = (am - lm).abs().max((ap - lp).abs());
        report.push(
            Hypothesis::Limits,
            &format!("V{j} limits"),
            err < LIMIT_TOL,
            format!("|V{j}(±{far}) − v{j}±| = {err:.3e}"),
        );
    }

    let (v1m, v1p) = sys.v1.limits();
    let (v2m, v2p) = sys.v2.limits();
    report.push(
        Hypothesis::LimitOrdering,
        "channel 1 ordering",
        v1m < e0 && e0 < v1p,
        format!("v1⁻ = {v1m}, E0 = {e0}, v1⁺ = {v1p}"),
    );
    report.push(
        Hypothesis::LimitOrdering,
        "channel 2 ordering",
        v2p < e0 && e0 < v2m,
        format!("v2⁺ = {v2p}, E0 = {e0}, v2⁻ = {v2m}"),
    );

    let d1 = sys.v1.derivative_real(setup.x1_0);
    let d2 = sys.v2.derivative_real(setup.x2_0);
    report.push(
        Hypothesis::TurningPoints,
        "simple turning points",
        d1.abs() > SLOPE_TOL && d2.abs() > SLOPE_TOL,
        format!("V1'(x1) = {d1:.6e}, V2'(x2) = {d2:.6e}"),
    );
    report.push(
        Hypothesis::TurningPoints,
        "turning point sides",
        setup.x1_0 > 0.0 && setup.x2_0 < 0.0,
        format!("x1 = {:.12}, x2 = {:.12}", setup.x1_0, setup.x2_0),
    );

    let (s1, s2) = setup.slopes;
    let (c1, c2) = (sys.v1.at_real(0.0), sys.v2.at_real(0.0));
    report.push(
        Hypothesis::Crossing,
        "crossing at origin",
        c1.abs() < CROSSING_TOL && c2.abs() < CROSSING_TOL,
        format!("V1(0) = {c1:.3e}, V2(0) = {c2:.3e}"),
    );
    report.push(
        Hypothesis::Crossing,
        "crossing slopes",
        s1 - s2 > SLOPE_TOL,
        format!("V1'(0) = {s1}, V2'(0) = {s2}"),
    );
    let diff = |x: f64| sys.v1.at_real(x) - sys.v2.at_real(x);
    let crossings: Vec<f64> = sign_changes(diff).into_iter().map(|(a, b)| bisect(diff, a, b)).collect();
    let unique = crossings.len() == 1 && crossings[0].abs() < 1e-9;
    report.push(
        Hypothesis::Crossing,
        "single crossing",
        unique,
        format!("V1 − V2 vanishes at {crossings:?}"),
    );

    let w0 = setup.w0();
    report.push(
        Hypothesis::Coupling,
        "coupling at crossing",
        w0.norm() > COUPLING_TOL,
        format!("|W0| = {:.6e}", w0.norm()),
    );

    let r0 = sys.cone.r0;
    report.push(
        Hypothesis::ConeExtent,
        "turning points inside R0",
        setup.x1_0.abs() < r0 && setup.x2_0.abs() < r0,
        format!("max |x_j| = {:.6}, R0 = {r0}", setup.x1_0.abs().max(setup.x2_0.abs())),
    );

    report
}
