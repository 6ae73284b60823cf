use super::SpectralError;
use num_complex::Complex64;

/// Exterior rotation `ζ_θ(x) = x·exp(iθ g(|x|))` with a quintic blend `g`
/// from 0 at `|x| = R0` to 1 at `|x| = 2R0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distortion {
    pub theta: f64,
    pub r0: f64,
}

/// Samples of `[R0, 2R0]` used to certify `Re ζ' > 0`.
const CHECK_SAMPLES: usize = 2000;

pub fn build_distortion(r0: f64, theta: f64, theta0: f64) -> Result<Distortion, SpectralError> {
    if !(theta > 0.0 && theta < theta0) {
        return Err(SpectralError::InvalidAngle(format!("need 0 < θ < θ0, got θ = {theta}, θ0 = {theta0}")));
    }
    if !(r0 > 0.0) {
        return Err(SpectralError::InvalidAngle(format!("R0 must be positive, got {r0}")));
    }
    let d = Distortion { theta, r0 };
    for k in 0..=CHECK_SAMPLES {
        let x = r0 * (1.0 + k as f64 / CHECK_SAMPLES as f64);
        if d.zeta_prime(x).re <= 0.0 {
            return Err(SpectralError::InvalidAngle(format!("Re ζ'({x}) ≤ 0 at θ = {theta}")));
        }
    }
    Ok(d)
}

impl Distortion {
    /// The undistorted identity map, used for self-adjoint checks.
    pub fn identity(r0: f64) -> Self {
        Self { theta: 0.0, r0 }
    }

    fn s(&self, ax: f64) -> f64 {
        ((ax - self.r0) / self.r0).clamp(0.0, 1.0)
    }

    /// `g(|x|)`.
    pub fn blend(&self, ax: f64) -> f64 {
        let s = self.s(ax);
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }

    /// `dg/d|x|`.
    fn blend_prime(&self, ax: f64) -> f64 {
        let s = self.s(ax);
        30.0 * s * s * (1.0 - s) * (1.0 - s) / self.r0
    }

    /// `d²g/d|x|²`.
    fn blend_second(&self, ax: f64) -> f64 {
        let s = self.s(ax);
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (self.r0 * self.r0)
    }

    pub fn zeta(&self, x: f64) -> Complex64 {
        let ax = x.abs();
        if ax <= self.r0 {
            Complex64::new(x, 0.0)
        } else if ax >= 2.0 * self.r0 {
            Complex64::new(x * self.theta.cos(), x * self.theta.sin())
        } else {
            Complex64::from_polar(1.0, self.theta * self.blend(ax)) * x
        }
    }

    pub fn zeta_prime(&self, x: f64) -> Complex64 {
        let ax = x.abs();
        if ax <= self.r0 {
            Complex64::new(1.0, 0.0)
        } else if ax >= 2.0 * self.r0 {
            Complex64::from_polar(1.0, self.theta)
        } else {
            let rot = Complex64::from_polar(1.0, self.theta * self.blend(ax));
            rot * Complex64::new(1.0, self.theta * ax * self.blend_prime(ax))
        }
    }

    pub fn zeta_second(&self, x: f64) -> Complex64 {
        let ax = x.abs();
        if ax <= self.r0 || ax >= 2.0 * self.r0 {
            return Complex64::new(0.0, 0.0);
        }
        let (g1, g2) = (self.blend_prime(ax), self.blend_second(ax));
        let rot = Complex64::from_polar(1.0, self.theta * self.blend(ax));
        let i_theta = Complex64::new(0.0, self.theta);
        let inner = i_theta * g1 * Complex64::new(1.0, self.theta * ax * g1) + i_theta * (g1 + ax * g2);
        rot * inner * x.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_piece_definition_is_exact() {
        let d = build_distortion(2.0, 0.3, 1.0).unwrap();
        assert_eq!(d.zeta(1.0), Complex64::new(1.0, 0.0));
        let x = 6.0;
        assert_eq!(d.zeta(x), Complex64::new(x * 0.3f64.cos(), x * 0.3f64.sin()));
        assert_eq!(d.zeta(-x), Complex64::new(-x * 0.3f64.cos(), -x * 0.3f64.sin()));
        assert!((d.blend(3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_difference_quotients() {
        let d = build_distortion(2.0, 0.4, 1.0).unwrap();
        let eps = 1e-5;
        for &x in &[-3.7, -2.5, 2.2, 3.0, 3.9] {
            let fd1 = (d.zeta(x + eps) - d.zeta(x - eps)) / (2.0 * eps);
            assert!((fd1 - d.zeta_prime(x)).norm() < 1e-8, "ζ' at {x}");
            let fd2 = (d.zeta_prime(x + eps) - d.zeta_prime(x - eps)) / (2.0 * eps);
            assert!((fd2 - d.zeta_second(x)).norm() < 1e-7, "ζ'' at {x}");
        }
    }

    #[test]
    fn blend_is_c2_at_the_joins() {
        let d = Distortion { theta: 0.5, r0: 1.0 };
        for ax in [1.0, 2.0] {
            assert_eq!(d.blend_prime(ax), 0.0);
            assert_eq!(d.blend_second(ax), 0.0);
        }
    }

    #[test]
    fn angle_checks() {
        assert!(matches!(build_distortion(2.0, 0.0, 1.0), Err(SpectralError::InvalidAngle(_))));
        assert!(matches!(build_distortion(2.0, 1.2, 1.0), Err(SpectralError::InvalidAngle(_))));
        // a steep blend folds the contour back: Re ζ' < 0 near 1.5 R0
        assert!(matches!(build_distortion(2.0, 1.2, 1.5), Err(SpectralError::InvalidAngle(_))));
    }
}
