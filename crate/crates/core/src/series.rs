//! Fourier–Bessel solution for moderate rotation rates.
//!
//! In the co-rotating frame the Neumann Green's function of the disk solves
//! `Delta G + omega G_theta = 1/pi - delta(x - x0)`. Expanding in `e^{i m theta}`
//! gives radial modes `R_m(r)` built from `I_m(c_m r)`, `K_m(c_m r)` with
//! `c_m = e^{-i pi/4} sqrt(omega m)`.
//!
//! The regular part at the source needs `sum_m T_m` with
//! `T_m = R_m(r0) - 1/(4 pi m)`. These terms decay only like `m^-3`, so the
//! sum is accelerated: exact terms are summed until they agree with a
//! large-order model of `T_m` (uniform Debye expansion of `I_m K_m`), and the
//! remaining tail of the model is added by Euler–Maclaurin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

use crate::numerics::gauss_legendre_on;
use crate::reference::{static_green_regular, TrapConfig};
use crate::special::{bessel_ik, debye_ik_corrections, BesselError, ComplexValue, Scaled};

/// Modes below this index are always summed exactly.
const MIN_EXACT_MODES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error("radius {0} outside [0, 1]")]
    RadiusOutOfRange(f64),
    #[error("source radius r0 = {0} must lie in [0, 1)")]
    SourceOutOfRange(f64),
    #[error("Green's function is singular at the source point")]
    SingularPoint,
    #[error("point at distance {dist:.3e} from the trap centre lies inside the trap (eps = {eps})")]
    InsideTrap { dist: f64, eps: f64 },
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
}

/// Controls the Fourier mode sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub m_max: usize,
    pub tail_tol: f64,
    pub consecutive_small: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        SeriesTruncation {
            m_max: 2000,
            tail_tol: 1e-13,
            consecutive_small: 3,
        }
    }
}

impl SeriesTruncation {
    pub fn validate(&self) -> Result<(), SeriesError> {
        if self.m_max < 1 {
            return Err(SeriesError::InvalidTruncation("m_max must be >= 1".into()));
        }
        if !(self.tail_tol > 0.0) {
            return Err(SeriesError::InvalidTruncation("tail_tol must be positive".into()));
        }
        if self.consecutive_small < 1 {
            return Err(SeriesError::InvalidTruncation(
                "consecutive_small must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A scalar produced by a truncated mode sum, with its truncation record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub modes_used: usize,
    /// False when the stopping rule was not met before `m_max`.
    pub converged: bool,
}

/// The mode argument `c_m`; `degenerate` is set when `omega = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeArgument {
    pub value: ComplexValue,
    pub degenerate: bool,
}

/// `c_m = -i sqrt(i omega m)` on the principal branch, i.e. `e^{-i pi/4} sqrt(omega m)`.
pub fn c_m(omega: f64, m: u32) -> ModeArgument {
    if omega == 0.0 {
        return ModeArgument {
            value: Complex64::new(0.0, 0.0),
            degenerate: true,
        };
    }
    ModeArgument {
        value: Complex64::from_polar((omega * m as f64).sqrt(), -PI / 4.0),
        degenerate: false,
    }
}

/// Bessel data of one mode that does not depend on the field radius.
#[derive(Debug, Clone, Copy)]
struct ModeData {
    c: Complex64,
    /// `K_m'(c) / I_m'(c)`
    q: Scaled,
    i_r0: Scaled,
    k_r0: Scaled,
}

impl ModeData {
    fn new(m: u32, r0: f64, omega: f64) -> Result<Self, SeriesError> {
        let c = c_m(omega, m).value;
        let at_one = bessel_ik(m, c)?;
        let at_r0 = bessel_ik(m, c * r0)?;
        Ok(ModeData {
            c,
            q: at_one.dk / at_one.di,
            i_r0: at_r0.i,
            k_r0: at_r0.k,
        })
    }

    /// `2 pi R_m(r0)`.
    fn at_source(&self) -> Complex64 {
        (self.i_r0 * self.k_r0 - self.q * self.i_r0 * self.i_r0).value()
    }

    /// `2 pi R_m(r)`.
    fn at(&self, m: u32, r: f64, r0: f64) -> Result<Complex64, SeriesError> {
        if r == r0 {
            return Ok(self.at_source());
        }
        if r == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let b = bessel_ik(m, self.c * r)?;
        Ok(if r < r0 {
            (b.i * self.k_r0 - self.q * self.i_r0 * b.i).value()
        } else {
            (b.k * self.i_r0 - self.q * b.i * self.i_r0).value()
        })
    }
}

fn zero_mode_constant(r0: f64) -> f64 {
    (2.0 * r0 * r0 - 3.0) / (8.0 * PI)
}

/// Radial mode `R_m(r)` of the Green's function with source at radius `r0`.
pub fn radial_mode(r: f64, r0: f64, omega: f64, m: u32) -> Result<ComplexValue, SeriesError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(SeriesError::RadiusOutOfRange(r));
    }
    if !(0.0..1.0).contains(&r0) {
        return Err(SeriesError::SourceOutOfRange(r0));
    }
    if m == 0 {
        let v = r * r / (4.0 * PI) + zero_mode_constant(r0) - r.max(r0).ln() / (2.0 * PI);
        return Ok(Complex64::new(v, 0.0));
    }
    if r0 == 0.0 {
        // a centred source only excites the symmetric mode
        return Ok(Complex64::new(0.0, 0.0));
    }
    if omega == 0.0 {
        return Ok(Complex64::new(static_mode(r, r0, m), 0.0));
    }
    let d = ModeData::new(m, r0, omega)?;
    Ok(d.at(m, r, r0)? / (2.0 * PI))
}

/// Mode of the non-rotating problem: free-space part plus image.
fn static_mode(r: f64, r0: f64, m: u32) -> f64 {
    let rho = r.min(r0) / r.max(r0);
    let mf = m as f64;
    (rho.powi(m as i32) + (r * r0).powi(m as i32)) / (4.0 * PI * mf)
}

/// Large-order model of `T_m = R_m(r0) - 1/(4 pi m)` for continuous `m`.
fn model_term(m: f64, omega: f64, r0: f64) -> Complex64 {
    let w = Complex64::new(0.0, omega * r0 * r0 / m);
    let root = (Complex64::new(1.0, 0.0) - w).sqrt();
    let t = root.inv();
    // t - 1 without cancellation
    let t_minus_1 = w / ((root + 1.0) * root);
    let (p1, p2) = debye_ik_corrections(t);
    let inv2 = 1.0 / (m * m);
    (t_minus_1 + t * (p1 * inv2 + p2 * inv2 * inv2)) / (4.0 * PI * m)
}

/// `sum_{m > big_m} model_term(m)` by the midpoint Euler–Maclaurin formula.
fn model_tail(big_m: usize, omega: f64, r0: f64) -> Complex64 {
    let x0 = big_m as f64 + 0.5;
    let f = |x: f64| model_term(x, omega, r0);
    // integral over (x0, inf) with x = x0 / s; split s in geometric panels so
    // the branch point of t near s = -i x0/(omega r0^2) is resolved
    let delta = (x0 / (omega * r0 * r0).max(1e-300)).min(1.0);
    let mut edges = vec![0.0, delta];
    while *edges.last().unwrap() < 1.0 {
        let next = (edges.last().unwrap() * 2.0).min(1.0);
        edges.push(next);
    }
    let mut integral = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (s, wt) = gauss_legendre_on(24, w[0], w[1]);
        for (s, wt) in s.iter().zip(&wt) {
            integral += f(x0 / s) * (wt * x0 / (s * s));
        }
    }
    let h = 0.25;
    let (fm2, fm1, fp1, fp2) = (f(x0 - 2.0 * h), f(x0 - h), f(x0 + h), f(x0 + 2.0 * h));
    let d1 = (fm2 - fm1 * 8.0 + fp1 * 8.0 - fp2) / (12.0 * h);
    let d3 = (fp2 - fp1 * 2.0 + fm1 * 2.0 - fm2) / (2.0 * h * h * h);
    integral + d1 / 24.0 - d3 * (7.0 / 5760.0)
}

/// `sum_{m >= 1} T_m` with tail acceleration.
fn source_mode_sum(
    r0: f64,
    omega: f64,
    trunc: &SeriesTruncation,
) -> Result<(Complex64, usize, bool), SeriesError> {
    trunc.validate()?;
    if r0 == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0, true));
    }
    if omega == 0.0 {
        // sum r0^{2m}/(4 pi m)
        return Ok((Complex64::new(-(1.0 - r0 * r0).ln() / (4.0 * PI), 0.0), 0, true));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut run = 0usize;
    for m in 1..=trunc.m_max {
        let d = ModeData::new(m as u32, r0, omega)?;
        let mf = m as f64;
        let t = d.at_source() / (2.0 * PI) - 1.0 / (4.0 * PI * mf);
        sum += t;
        let gap = (t - model_term(mf, omega, r0)).norm();
        if m >= MIN_EXACT_MODES && gap <= trunc.tail_tol * sum.norm() {
            run += 1;
        } else {
            run = 0;
        }
        if run >= trunc.consecutive_small {
            return Ok((sum + model_tail(m, omega, r0), m, true));
        }
    }
    log::debug!(
        "mode sum for r0 = {r0}, omega = {omega} did not meet the tail criterion by m_max = {}",
        trunc.m_max
    );
    Ok((sum + model_tail(trunc.m_max, omega, r0), trunc.m_max, false))
}

/// Exact source terms `T_m`, `m = 1..=n`, for diagnostics.
pub fn source_terms(r0: f64, omega: f64, n: usize) -> Result<Vec<ComplexValue>, SeriesError> {
    (1..=n)
        .map(|m| {
            let v = radial_mode(r0, r0, omega, m as u32)?;
            Ok(v - 1.0 / (4.0 * PI * m as f64))
        })
        .collect()
}

/// Regular part `R(x0; x0)` of the rotating-frame Green's function.
pub fn regular_part(
    r0: f64,
    omega: f64,
    trunc: &SeriesTruncation,
) -> Result<SeriesValue, SeriesError> {
    if !(0.0..1.0).contains(&r0) {
        return Err(SeriesError::SourceOutOfRange(r0));
    }
    if omega == 0.0 {
        return Ok(SeriesValue {
            value: static_green_regular(r0).map_err(|_| SeriesError::SourceOutOfRange(r0))?,
            modes_used: 0,
            converged: true,
        });
    }
    let (s, modes, converged) = source_mode_sum(r0, omega, trunc)?;
    Ok(SeriesValue {
        value: r0 * r0 / (2.0 * PI) - 3.0 / (8.0 * PI) + 2.0 * s.re,
        modes_used: modes,
        converged,
    })
}

/// Matching constant `H = pi R(x0; x0) - log(eps)/2`.
pub fn matching_h(cfg: &TrapConfig, trunc: &SeriesTruncation) -> Result<SeriesValue, SeriesError> {
    if cfg.omega0() > 0.1 {
        log::warn!(
            "eps*omega = {} is not small; the series regime is outside its range",
            cfg.omega0()
        );
    }
    matching_h_unchecked(cfg, trunc)
}

fn matching_h_unchecked(cfg: &TrapConfig, trunc: &SeriesTruncation) -> Result<SeriesValue, SeriesError> {
    let r = regular_part(cfg.r0, cfg.omega, trunc)?;
    Ok(SeriesValue {
        value: PI * r.value - 0.5 * cfg.eps.ln(),
        ..r
    })
}

/// Mass `M = pi H`, the disk integral of the MFPT.
pub fn mass_series(cfg: &TrapConfig, trunc: &SeriesTruncation) -> Result<SeriesValue, SeriesError> {
    let h = matching_h(cfg, trunc)?;
    Ok(SeriesValue {
        value: PI * h.value,
        ..h
    })
}

/// [`mass_series`] without the range warning, for callers that choose the
/// regime themselves.
pub fn mass_series_quiet(cfg: &TrapConfig, trunc: &SeriesTruncation) -> Result<SeriesValue, SeriesError> {
    let h = matching_h_unchecked(cfg, trunc)?;
    Ok(SeriesValue {
        value: PI * h.value,
        ..h
    })
}

/// Green's function and MFPT field for one source, caching mode data.
#[derive(Debug)]
pub struct SeriesGreen {
    r0: f64,
    omega: f64,
    trunc: SeriesTruncation,
    modes: Vec<OnceLock<Result<ModeData, SeriesError>>>,
}

impl SeriesGreen {
    pub fn new(r0: f64, omega: f64, trunc: SeriesTruncation) -> Result<Self, SeriesError> {
        trunc.validate()?;
        if !(0.0..1.0).contains(&r0) {
            return Err(SeriesError::SourceOutOfRange(r0));
        }
        Ok(SeriesGreen {
            r0,
            omega,
            trunc,
            modes: (0..trunc.m_max).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn mode(&self, m: u32) -> Result<ModeData, SeriesError> {
        self.modes[m as usize - 1]
            .get_or_init(|| ModeData::new(m, self.r0, self.omega))
            .clone()
    }

    /// `R_m(r) - rho^m/(4 pi m)` for `m = 1..`, truncated when the terms
    /// fall below `tail_tol` relative to the running sum of magnitudes.
    pub fn radial_coefficients(&self, r: f64) -> Result<Vec<ComplexValue>, SeriesError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(SeriesError::RadiusOutOfRange(r));
        }
        let r0 = self.r0;
        let mut out = Vec::new();
        if r0 == 0.0 || r == 0.0 {
            return Ok(out);
        }
        let rho = r.min(r0) / r.max(r0);
        let mut mag = 0.0;
        let mut run = 0;
        for m in 1..=self.trunc.m_max as u32 {
            let mf = m as f64;
            let free = rho.powi(m as i32) / (4.0 * PI * mf);
            let full = if self.omega == 0.0 {
                Complex64::new(static_mode(r, r0, m), 0.0)
            } else {
                self.mode(m)?.at(m, r, r0)? / (2.0 * PI)
            };
            let d = full - free;
            mag += d.norm();
            out.push(d);
            if d.norm() <= self.trunc.tail_tol * mag.max(1.0) {
                run += 1;
            } else {
                run = 0;
            }
            if run >= self.trunc.consecutive_small {
                break;
            }
        }
        Ok(out)
    }

    /// `G(r, theta)` from precomputed radial coefficients at radius `r`.
    pub fn green_with(&self, r: f64, theta: f64, coeffs: &[ComplexValue]) -> Result<f64, SeriesError> {
        let r0 = self.r0;
        let dx = r * theta.cos() - r0;
        let dy = r * theta.sin();
        let dist = dx.hypot(dy);
        if dist == 0.0 {
            return Err(SeriesError::SingularPoint);
        }
        let zero = radial_mode(r, r0, self.omega, 0)?.re;
        let mut sum = Complex64::new(0.0, 0.0);
        let step = Complex64::from_polar(1.0, theta);
        let mut phase = step;
        for d in coeffs {
            sum += d * phase;
            phase *= step;
        }
        Ok(-dist.ln() / (2.0 * PI) + zero + r.max(r0).ln() / (2.0 * PI) + 2.0 * sum.re)
    }

    /// Green's function at polar point `(r, theta)`; the source sits at `(r0, 0)`.
    pub fn green(&self, r: f64, theta: f64) -> Result<f64, SeriesError> {
        let c = self.radial_coefficients(r)?;
        self.green_with(r, theta, &c)
    }
}

/// `G(x; x0)` at polar point `(r, theta)` with the source at `(r0, 0)`.
pub fn green_function(
    r: f64,
    theta: f64,
    r0: f64,
    omega: f64,
    trunc: &SeriesTruncation,
) -> Result<f64, SeriesError> {
    SeriesGreen::new(r0, omega, *trunc)?.green(r, theta)
}

/// The leading-order MFPT field `u = -pi G + H` for one trap.
#[derive(Debug)]
pub struct SeriesField {
    cfg: TrapConfig,
    green: SeriesGreen,
    h: SeriesValue,
}

impl SeriesField {
    pub fn new(cfg: &TrapConfig, trunc: &SeriesTruncation) -> Result<Self, SeriesError> {
        Ok(SeriesField {
            cfg: *cfg,
            green: SeriesGreen::new(cfg.r0, cfg.omega, *trunc)?,
            h: matching_h(cfg, trunc)?,
        })
    }

    pub fn matching_constant(&self) -> SeriesValue {
        self.h
    }

    fn check_outside(&self, r: f64, theta: f64) -> Result<(), SeriesError> {
        let dist = (r * theta.cos() - self.cfg.r0).hypot(r * theta.sin());
        if dist < self.cfg.eps {
            return Err(SeriesError::InsideTrap {
                dist,
                eps: self.cfg.eps,
            });
        }
        Ok(())
    }

    pub fn u(&self, r: f64, theta: f64) -> Result<f64, SeriesError> {
        self.check_outside(r, theta)?;
        Ok(-PI * self.green.green(r, theta)? + self.h.value)
    }

    /// Field on a tensor polar grid, row-major in `r`; points inside the trap are `None`.
    pub fn u_polar_grid(&self, radii: &[f64], thetas: &[f64]) -> Result<Vec<Vec<Option<f64>>>, SeriesError> {
        let row = |r: f64| -> Result<Vec<Option<f64>>, SeriesError> {
            let c = self.green.radial_coefficients(r)?;
            thetas
                .iter()
                .map(|&t| {
                    if self.check_outside(r, t).is_err() {
                        Ok(None)
                    } else {
                        Ok(Some(-PI * self.green.green_with(r, t, &c)? + self.h.value))
                    }
                })
                .collect()
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            radii.par_iter().map(|&r| row(r)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            radii.iter().map(|&r| row(r)).collect()
        }
    }
}

/// `u(r, theta)` for a single point.
pub fn field_u(
    r: f64,
    theta: f64,
    cfg: &TrapConfig,
    trunc: &SeriesTruncation,
) -> Result<f64, SeriesError> {
    SeriesField::new(cfg, trunc)?.u(r, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr() -> SeriesTruncation {
        SeriesTruncation::default()
    }

    #[test]
    fn c_m_branch() {
        let c = c_m(1.0, 1);
        assert!((c.value - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        assert!(!c.degenerate);
        let c = c_m(7.0, 5);
        assert!((c.value.norm() - 35f64.sqrt()).abs() < 1e-13);
        assert!((c.value.arg() + PI / 4.0).abs() < 1e-15);
        assert!(c.value.re > 0.0);
        // same as -i sqrt(i omega m)
        let direct = Complex64::new(0.0, -1.0) * Complex64::new(0.0, 35.0).sqrt();
        assert!((c.value - direct).norm() < 1e-13);
        assert!(c_m(0.0, 3).degenerate);
    }

    #[test]
    fn zero_mode_at_boundary() {
        let r0: f64 = 0.6;
        let want = 1.0 / (4.0 * PI) + (2.0 * r0 * r0 - 3.0) / (8.0 * PI);
        assert!((radial_mode(1.0, r0, 3.0, 0).unwrap().re - want).abs() < 1e-15);
    }

    #[test]
    fn mode_continuity_and_jump() {
        let (r0, w) = (0.5, 4.0);
        let a = radial_mode(r0 - 1e-12, r0, w, 1).unwrap();
        let b = radial_mode(r0 + 1e-12, r0, w, 1).unwrap();
        assert!((a - b).norm() < 1e-10);
        let f = |r: f64| radial_mode(r, r0, w, 1).unwrap();
        let h = 1e-4;
        // second-order one-sided differences from each side of r0
        let dl = (f(r0) * 3.0 - f(r0 - h) * 4.0 + f(r0 - 2.0 * h)) / (2.0 * h);
        let dr = (f(r0) * -3.0 + f(r0 + h) * 4.0 - f(r0 + 2.0 * h)) / (2.0 * h);
        let jump = dr - dl;
        assert!((jump.re + 1.0 / (2.0 * PI * r0)).abs() < 1e-7, "{jump}");
        assert!(jump.im.abs() < 1e-7);
    }

    #[test]
    fn model_matches_exact_terms_for_large_m() {
        let (r0, w) = (0.7, 50.0);
        let err = |m: usize| {
            let exact = radial_mode(r0, r0, w, m as u32).unwrap() - 1.0 / (4.0 * PI * m as f64);
            (exact - model_term(m as f64, w, r0)).norm() / exact.norm()
        };
        let (e40, e80) = (err(40), err(80));
        assert!(e40 < 1e-7 && e80 < 2e-9, "{e40} {e80}");
        // omitted term is O(m^-6)
        assert!(e40 / e80 > 30.0, "{}", e40 / e80);
    }

    #[test]
    fn tail_matches_brute_force_sum() {
        let (r0, w) = (0.6, 10.0);
        // the difference of two tails is a finite sum
        let brute: Complex64 = (31..=1000).map(|m| model_term(m as f64, w, r0)).sum();
        let tail = model_tail(30, w, r0) - model_tail(1000, w, r0);
        // only the real part enters the mass; the imaginary part decays one
        // power slower and carries the omitted Euler–Maclaurin term
        assert!((brute.re - tail.re).abs() < 2e-13, "{brute} vs {tail}");
        assert!((brute.im - tail.im).abs() < 1e-11);
    }

    #[test]
    fn small_omega_reaches_static_limit() {
        for r0 in [0.2, 0.4, 0.6] {
            let r = regular_part(r0, 1e-3, &tr()).unwrap();
            assert!(r.converged);
            assert!((r.value - static_green_regular(r0).unwrap()).abs() < 1e-3);
        }
    }

    #[test]
    fn regular_part_stable_under_truncation_change() {
        let base = regular_part(0.6, 10.0, &tr()).unwrap();
        let forced = SeriesTruncation {
            m_max: 300,
            tail_tol: 1e-300,
            consecutive_small: 1,
        };
        let forced2 = SeriesTruncation { m_max: 600, ..forced };
        let a = regular_part(0.6, 10.0, &forced).unwrap();
        let b = regular_part(0.6, 10.0, &forced2).unwrap();
        assert!(!a.converged);
        assert!((a.value - base.value).abs() < 1e-8);
        assert!((b.value - base.value).abs() < 1e-8);
    }

    #[test]
    fn centred_source_has_only_the_symmetric_mode() {
        let cfg = TrapConfig::new(0.0, 1e-3, 5.0).unwrap();
        let m = mass_series(&cfg, &tr()).unwrap();
        assert!((m.value - PI * (-3.0 / 8.0 - 0.5 * 1e-3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn field_rejects_points_inside_trap() {
        let cfg = TrapConfig::new(0.5, 0.05, 2.0).unwrap();
        assert!(matches!(field_u(0.52, 0.0, &cfg, &tr()), Err(SeriesError::InsideTrap { .. })));
        assert!(matches!(green_function(0.5, 0.0, 0.5, 2.0, &tr()), Err(SeriesError::SingularPoint)));
    }
}
