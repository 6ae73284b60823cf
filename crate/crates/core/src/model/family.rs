//! Closed-form potential families that can be evaluated off the real axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Family tags accepted in problem configs.
pub const KNOWN_FAMILIES: [&str; 4] = ["tanh", "rational", "constant", "sum"];

/// A scalar profile on the line with an explicit analytic continuation.
///
/// `Tanh` is `a·tanh(b·x) + c`, `Rational` is `num(x)/den(x)` with ascending
/// coefficients and `deg num <= deg den`, and `Sum` adds its terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Tanh {
        a: f64,
        b: f64,
        #[serde(default)]
        c: f64,
    },
    Rational {
        num: Vec<f64>,
        den: Vec<f64>,
    },
    Constant {
        value: f64,
    },
    Sum {
        terms: Vec<Family>,
    },
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_prime(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

fn degree(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0.0)
}

impl Family {
    pub fn constant(value: f64) -> Self {
        Family::Constant { value }
    }

    pub fn tanh(a: f64, b: f64) -> Self {
        Family::Tanh { a, b, c: 0.0 }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Family::Tanh { a, b, c } => (z * *b).tanh() * *a + *c,
            Family::Rational { num, den } => horner(num, z) / horner(den, z),
            Family::Constant { value } => Complex64::new(*value, 0.0),
            Family::Sum { terms } => terms.iter().map(|t| t.eval(z)).sum(),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            Family::Tanh { a, b, .. } => {
                let sech = (z * *b).cosh().inv();
                sech * sech * (*a * *b)
            }
            Family::Rational { num, den } => {
                let q = horner(den, z);
                (horner_prime(num, z) * q - horner(num, z) * horner_prime(den, z)) / (q * q)
            }
            Family::Constant { .. } => Complex64::new(0.0, 0.0),
            Family::Sum { terms } => terms.iter().map(|t| t.derivative(z)).sum(),
        }
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex64::new(x, 0.0)).re
    }

    pub fn derivative_real(&self, x: f64) -> f64 {
        self.derivative(Complex64::new(x, 0.0)).re
    }

    /// Closed-form limits `(x → −∞, x → +∞)` along the real axis.
    pub fn limits(&self) -> (f64, f64) {
        match self {
            Family::Tanh { a, b, c } => {
                let s = if *b == 0.0 { 0.0 } else { b.signum() };
                (c - a * s, c + a * s)
            }
            Family::Rational { num, den } => match (degree(num), degree(den)) {
                (None, _) => (0.0, 0.0),
                (Some(p), Some(q)) if p == q => {
                    let l = num[p] / den[q];
                    (l, l)
                }
                _ => (0.0, 0.0),
            },
            Family::Constant { value } => (*value, *value),
            Family::Sum { terms } => terms.iter().fold((0.0, 0.0), |(lo, hi), t| {
                let (a, b) = t.limits();
                (lo + a, hi + b)
            }),
        }
    }

    /// Distance from `z` to the nearest pole of any `tanh` term (`f64::INFINITY` if none).
    pub fn tanh_pole_distance(&self, z: Complex64) -> f64 {
        match self {
            Family::Tanh { a, b, .. } => {
                if *a == 0.0 || *b == 0.0 {
                    return f64::INFINITY;
                }
                // poles of tanh(w) sit at w = iπ(k + 1/2)
                let w = z * *b;
                let k = (w.im / PI - 0.5).round();
                let pole = Complex64::new(0.0, PI * (k + 0.5));
                (w - pole).norm() / b.abs()
            }
            Family::Sum { terms } => terms
                .iter()
                .map(|t| t.tanh_pole_distance(z))
                .fold(f64::INFINITY, f64::min),
            _ => f64::INFINITY,
        }
    }

    /// Half-width of the pole-free strip about the real axis, counting `tanh` terms only.
    pub fn tanh_strip_half_width(&self) -> f64 {
        match self {
            Family::Tanh { a, b, .. } => {
                if *a == 0.0 || *b == 0.0 {
                    f64::INFINITY
                } else {
                    PI / (2.0 * b.abs())
                }
            }
            Family::Sum { terms } => terms
                .iter()
                .map(|t| t.tanh_strip_half_width())
                .fold(f64::INFINITY, f64::min),
            _ => f64::INFINITY,
        }
    }

    /// Roots of every rational denominator in the family.
    pub fn rational_poles(&self) -> Vec<Complex64> {
        match self {
            Family::Rational { den, .. } => polynomial_roots(den),
            Family::Sum { terms } => terms.iter().flat_map(|t| t.rational_poles()).collect(),
            _ => Vec::new(),
        }
    }

    /// Checks the parameters describe a bounded family on the real line.
    pub fn check_bounded(&self) -> Result<(), String> {
        match self {
            Family::Tanh { a, b, c } => {
                if [a, b, c].iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err("tanh parameters must be finite".into())
                }
            }
            Family::Rational { num, den } => {
                let q = degree(den).ok_or("rational denominator is identically zero")?;
                if let Some(p) = degree(num) {
                    if p > q {
                        return Err(format!("rational numerator degree {p} exceeds denominator degree {q}"));
                    }
                }
                if self.rational_poles().iter().any(|p| p.im.abs() < 1e-12) {
                    return Err("rational denominator vanishes on the real line".into());
                }
                Ok(())
            }
            Family::Constant { value } => {
                if value.is_finite() {
                    Ok(())
                } else {
                    Err("constant must be finite".into())
                }
            }
            Family::Sum { terms } => terms.iter().try_for_each(|t| t.check_bounded()),
        }
    }
}

/// Roots of an ascending-coefficient polynomial via the companion matrix.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let Some(deg) = degree(coeffs) else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let companion = faer::Mat::<f64>::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .eigenvalues()
        .map(|ev| ev.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_limits_follow_sign_of_b() {
        assert_eq!(Family::tanh(1.0, 1.0).limits(), (-1.0, 1.0));
        assert_eq!(Family::tanh(1.0, -2.0).limits(), (1.0, -1.0));
        assert_eq!(Family::Tanh { a: 0.5, b: 1.0, c: 0.25 }.limits(), (-0.25, 0.75));
    }

    #[test]
    fn rational_limits_and_poles() {
        // x / (1 + x^2): tends to zero, poles at ±i
        let f = Family::Rational { num: vec![0.0, 1.0], den: vec![1.0, 0.0, 1.0] };
        assert_eq!(f.limits(), (0.0, 0.0));
        let mut poles = f.rational_poles();
        poles.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((poles[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((poles[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);

        let g = Family::Rational { num: vec![0.0, 0.0, 3.0], den: vec![1.0, 0.0, 2.0] };
        assert_eq!(g.limits(), (1.5, 1.5));
    }

    #[test]
    fn rational_rejects_real_poles_and_unbounded() {
        let real_pole = Family::Rational { num: vec![1.0], den: vec![-1.0, 0.0, 1.0] };
        assert!(real_pole.check_bounded().is_err());
        let unbounded = Family::Rational { num: vec![0.0, 0.0, 1.0], den: vec![1.0, 1.0] };
        assert!(unbounded.check_bounded().is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let f = Family::Sum {
            terms: vec![
                Family::tanh(0.7, 1.3),
                Family::Rational { num: vec![0.2, 0.5], den: vec![1.0, 0.0, 0.4] },
            ],
        };
        let z = Complex64::new(0.4, 0.1);
        let d = 1e-6;
        let fd = (f.eval(z + d) - f.eval(z - d)) / (2.0 * d);
        assert!((fd - f.derivative(z)).norm() < 1e-8);
    }

    #[test]
    fn tanh_pole_distance() {
        let f = Family::tanh(1.0, 1.0);
        let near = Complex64::new(0.0, PI / 2.0 - 0.01);
        assert!((f.tanh_pole_distance(near) - 0.01).abs() < 1e-12);
        assert!((f.tanh_pole_distance(Complex64::new(0.0, 0.0)) - PI / 2.0).abs() < 1e-12);
        assert!((f.tanh_strip_half_width() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn config_round_trip_through_serde() {
        let json = r#"{"family":"sum","terms":[{"family":"tanh","a":1.0,"b":1.0},{"family":"constant","value":0.5}]}"#;
        let f: Family = serde_json::from_str(json).unwrap();
        assert_eq!(f.limits(), (-0.5, 1.5));
    }
}
