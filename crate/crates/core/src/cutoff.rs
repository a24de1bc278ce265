//! Smooth transition profiles used by the cutoffs.

use serde::{Deserialize, Serialize};

use crate::jet::Jet;

/// Monotone step `S: R -> [0, 1]` with `S = 0` on `(-inf, 0]`, `S = 1` on
/// `[1, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProfile {
    /// `e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)})`, smooth of every order.
    #[default]
    Exponential,
    /// `u^4 (35 - 84u + 70u^2 - 20u^3)`, three continuous derivatives.
    Septic,
}

// below this the exponential flank is exactly 0 in double precision
const FLANK_FLOOR: f64 = 1e-3;

impl CutoffProfile {
    pub fn smoothness(&self) -> Option<u32> {
        match self {
            CutoffProfile::Exponential => None,
            CutoffProfile::Septic => Some(3),
        }
    }

    pub fn step(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        match self {
            CutoffProfile::Exponential => {
                let a = flank(u);
                let b = flank(1.0 - u);
                a / (a + b)
            }
            CutoffProfile::Septic => u.powi(4) * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u))),
        }
    }

    pub fn step_jet(&self, u: Jet) -> Jet {
        let u0 = u.value();
        if u0 <= 0.0 {
            return Jet::constant(0.0);
        }
        if u0 >= 1.0 {
            return Jet::constant(1.0);
        }
        match self {
            CutoffProfile::Exponential => {
                let a = flank_jet(u);
                let b = flank_jet(1.0 - u);
                a / (a + b)
            }
            CutoffProfile::Septic => {
                let poly = 35.0 + u * (-84.0 + u * (70.0 - 20.0 * u));
                u.powi(2) * u.powi(2) * poly
            }
        }
    }

    /// Plateau `1` on `|s| <= inner`, `0` on `|s| >= outer`.
    pub fn plateau(&self, s: f64, inner: f64, outer: f64) -> f64 {
        1.0 - self.step((s.abs() - inner) / (outer - inner))
    }

    /// Plateau as a jet in whichever coordinate `s` carries.
    pub fn plateau_jet(&self, s: Jet, inner: f64, outer: f64) -> Jet {
        let s0 = s.value();
        if s0.abs() <= inner {
            return Jet::constant(1.0);
        }
        if s0.abs() >= outer {
            return Jet::constant(0.0);
        }
        let abs = if s0 < 0.0 { -s } else { s };
        1.0 - self.step_jet((abs - inner) * (1.0 / (outer - inner)))
    }
}

fn flank(v: f64) -> f64 {
    if v < FLANK_FLOOR {
        0.0
    } else {
        (-1.0 / v).exp()
    }
}

fn flank_jet(v: Jet) -> Jet {
    if v.value() < FLANK_FLOOR {
        Jet::constant(0.0)
    } else {
        (-v.recip()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn step_limits_and_symmetry() {
        for p in [CutoffProfile::Exponential, CutoffProfile::Septic] {
            assert_eq!(p.step(-0.2), 0.0);
            assert_eq!(p.step(0.0), 0.0);
            assert_eq!(p.step(1.0), 1.0);
            assert_eq!(p.step(3.0), 1.0);
            assert_abs_diff_eq!(p.step(0.5), 0.5, epsilon = 1e-15);
            for k in 1..100 {
                let u = k as f64 / 100.0;
                assert_abs_diff_eq!(p.step(u) + p.step(1.0 - u), 1.0, epsilon = 1e-14);
                assert!(p.step(u) >= p.step(u - 0.01));
            }
        }
    }

    #[test]
    fn step_jet_matches_finite_differences() {
        for p in [CutoffProfile::Exponential, CutoffProfile::Septic] {
            for &u in &[0.05, 0.3, 0.5, 0.81, 0.97] {
                let j = p.step_jet(Jet::var1(u));
                let e = 1e-4;
                let fd1 = (p.step(u + e) - p.step(u - e)) / (2.0 * e);
                let fd2 = (p.step(u + e) - 2.0 * p.step(u) + p.step(u - e)) / (e * e);
                let fd3 = (p.step(u + 2.0 * e) - 2.0 * p.step(u + e) + 2.0 * p.step(u - e)
                    - p.step(u - 2.0 * e))
                    / (2.0 * e * e * e);
                assert_abs_diff_eq!(j.value(), p.step(u), epsilon = 1e-15);
                assert_abs_diff_eq!(j.d(1, 0), fd1, epsilon = 1e-6 * (1.0 + fd1.abs()));
                assert_abs_diff_eq!(j.d(2, 0), fd2, epsilon = 1e-4 * (1.0 + fd2.abs()));
                assert_abs_diff_eq!(j.d(3, 0), fd3, epsilon = 1e-3 * (1.0 + fd3.abs()));
            }
        }
    }

    #[test]
    fn septic_has_flat_ends_to_third_order() {
        let p = CutoffProfile::Septic;
        let j = p.step_jet(Jet::var1(1e-9));
        assert!(j.d(1, 0).abs() < 1e-20 && j.d(2, 0).abs() < 1e-12 && j.d(3, 0).abs() < 1e-6);
    }

    #[test]
    fn plateau_shape() {
        let p = CutoffProfile::Exponential;
        assert_eq!(p.plateau(0.1, 0.25, 0.5), 1.0);
        assert_eq!(p.plateau(-0.25, 0.25, 0.5), 1.0);
        assert_eq!(p.plateau(0.6, 0.25, 0.5), 0.0);
        assert_abs_diff_eq!(p.plateau(0.375, 0.25, 0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.plateau(-0.3, 0.25, 0.5), p.plateau(0.3, 0.25, 0.5));
    }
}
