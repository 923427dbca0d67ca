//! Small-`r0` behaviour of the mass and the critical rotation rate at which
//! the centre of the disk stops being the optimal ring radius.
//!
//! Writing `M = pi[-3/8 - log(eps)/2 + S(r0)]`, the expansion
//! `S(r0) = a2(omega) r0^2 + O(r0^4)` holds, and `r0 = 0` is a local minimum of
//! the mass exactly when `a2 > 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::numerics::{bisect, NumericsError};
use crate::series::{c_m, regular_part, SeriesError, SeriesTruncation};
use crate::special::{bessel_prime_pair, BesselError, EULER_GAMMA};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcationError {
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("a2 does not change sign on the bracket: {0}")]
    NoSignChange(NumericsError),
    #[error("omega must be positive, got {0}")]
    NonPositiveOmega(f64),
}

/// Critical angular velocity together with the search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalOmega {
    pub omega_c: f64,
    pub bracket: (f64, f64),
    pub tol: f64,
}

/// `c1^2/8 [-1/4 - log(c1 rho/2) + K1'(c1)/I1'(c1) + (1 - 2 gamma)/2]`.
fn m1_bracket(omega: f64, rho: f64) -> Result<Complex64, BifurcationError> {
    if !(omega > 0.0) {
        return Err(BifurcationError::NonPositiveOmega(omega));
    }
    let c1 = c_m(omega, 1).value;
    let (di, dk) = bessel_prime_pair(1, c1)?;
    Ok(c1 * c1 / 8.0 * (-0.25 - (c1 * rho / 2.0).ln() + dk / di + 0.5 * (1.0 - 2.0 * EULER_GAMMA)))
}

/// Quadratic coefficient of `S(r0)`.
pub fn a2(omega: f64) -> Result<f64, BifurcationError> {
    Ok(0.5 - 2.0 * m1_bracket(omega, 1.0)?.re)
}

/// `a2` evaluated with `log(c1 r0 / 2)` in place of `log(c1 / 2)`; the real
/// part does not depend on `r0` because `c1^2` is purely imaginary.
pub fn a2_with_log_radius(omega: f64, r0: f64) -> Result<f64, BifurcationError> {
    Ok(0.5 - 2.0 * m1_bracket(omega, r0)?.re)
}

/// Leading small-`r0` expansion of `S(r0)`: only the `m = 1` mode contributes
/// to its real part at `O(r0^2)`.
pub fn small_r0_mass_coefficient_series(r0: f64, omega: f64) -> Result<f64, BifurcationError> {
    Ok(r0 * r0 / 2.0 - 2.0 * (m1_bracket(omega, r0)? * (r0 * r0)).re)
}

/// `S(r0) = M/pi + 3/8 + log(eps)/2` from the full Fourier–Bessel sum.
pub fn full_series_s(r0: f64, omega: f64, trunc: &SeriesTruncation) -> Result<f64, BifurcationError> {
    let r = regular_part(r0, omega, trunc)?;
    Ok(PI * r.value + 3.0 / 8.0)
}

/// Root of `a2` on `bracket` by bisection down to `tol` bracket width.
pub fn critical_omega(bracket: (f64, f64), tol: f64) -> Result<CriticalOmega, BifurcationError> {
    let mut failure = None;
    let root = bisect(
        |w| match a2(w) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        bracket.0,
        bracket.1,
        tol.min(1e-10),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CriticalOmega {
        omega_c: root.map_err(BifurcationError::NoSignChange)?,
        bracket,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_signs() {
        assert!(a2(2.0).unwrap() > 0.0);
        assert!(a2(3.5).unwrap() < 0.0);
    }

    #[test]
    fn log_radius_is_immaterial() {
        for w in [0.5, 3.0, 20.0] {
            let d = a2_with_log_radius(w, 0.1).unwrap() - a2_with_log_radius(w, 0.9).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn root_is_unique_on_sub_brackets() {
        let a = critical_omega((2.0, 4.0), 1e-6).unwrap().omega_c;
        let b = critical_omega((3.0, 3.1), 1e-6).unwrap().omega_c;
        assert!((a - b).abs() < 1e-9);
        assert!((a - 3.026).abs() < 5e-3, "{a}");
        assert!(critical_omega((4.0, 6.0), 1e-6).is_err());
    }

    #[test]
    fn single_sign_change_on_two_to_four() {
        let mut changes = 0;
        let mut prev = a2(2.0).unwrap();
        for k in 1..=400 {
            let v = a2(2.0 + 2.0 * k as f64 / 400.0).unwrap();
            if v.signum() != prev.signum() {
                changes += 1;
            }
            prev = v;
        }
        assert_eq!(changes, 1);
    }

    #[test]
    fn expansion_matches_full_series() {
        let t = SeriesTruncation::default();
        for w in [2.0, 3.5] {
            let r0 = 1e-3;
            let ratio = full_series_s(r0, w, &t).unwrap() / (r0 * r0) / a2(w).unwrap();
            assert!((ratio - 1.0).abs() < 1e-2, "omega = {w}: ratio {ratio}");
            let r0 = 0.02;
            let s = small_r0_mass_coefficient_series(r0, w).unwrap();
            assert!((s - a2(w).unwrap() * r0 * r0).abs() < 1e-15);
        }
    }

    #[test]
    fn remainder_is_fourth_order() {
        let t = SeriesTruncation::default();
        let w = 2.5;
        let rem = |r0: f64| full_series_s(r0, w, &t).unwrap() - a2(w).unwrap() * r0 * r0;
        let ratio = rem(2e-2) / rem(1e-2);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }
}
