//! Modified Bessel functions `I_n`, `K_n` of integer order and complex argument.
//!
//! Every routine carries values as [`Scaled`] numbers (`mantissa * exp(log_scale)`)
//! so that products such as `K_m(c) I_m(c r)` stay representable when the
//! individual factors would overflow or underflow. The unscaled entry points
//! ([`bessel_i`], [`bessel_k`], [`bessel_prime_pair`]) convert at the end and
//! report [`BesselError::Overflow`] instead of returning infinities.
//!
//! Evaluation paths:
//!
//! * `|z| <= 12`: ascending series for `I_n` and `I_{n+1}`.
//! * `|z| <= 2`: ascending series for `K_0`, `K_1`.
//! * `|z| > 2`: Steed's continued fraction for `K_0`, `K_1` (scaled by `e^z`).
//! * `K_n` for `n >= 2` by forward recurrence, which is stable for `K`.
//! * `|z| > 12`: `I_{n+1}/I_n` by continued fraction, then `I_n` from the
//!   Wronskian `I_n K_{n+1} + I_{n+1} K_n = 1/z`.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Complex scalar used for Bessel arguments and mode amplitudes.
pub type ComplexValue = Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius below which `I_n` is summed from its ascending series.
pub const I_SERIES_RADIUS: f64 = 12.0;
/// Radius below which `K_0`, `K_1` are summed from their ascending series.
pub const K_SERIES_RADIUS: f64 = 2.0;

const SERIES_EPS: f64 = 1e-17;
const CF_EPS: f64 = 1e-15;
const MAX_ITER: usize = 500_000;
const RESCALE_ABOVE: f64 = 1e200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BesselError {
    #[error("argument must be finite, got {0}")]
    NonFinite(Complex64),
    #[error("K_n is singular at z = 0")]
    ZeroArgument,
    #[error("argument {0} lies in the left half-plane; K_n is only evaluated for Re z >= 0")]
    LeftHalfPlane(Complex64),
    #[error("order {order} at z = {z} overflows f64 (log magnitude {log_magnitude:.1}); use the scaled form")]
    Overflow {
        order: u32,
        z: Complex64,
        log_magnitude: f64,
    },
    #[error("continued fraction did not converge at z = {0}")]
    NoConvergence(Complex64),
    #[error("digamma is only tabulated for positive integers, got {0}")]
    DigammaDomain(i64),
}

/// A complex number stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: Complex64::new(0.0, 0.0),
        log_scale: 0.0,
    };
    pub const ONE: Scaled = Scaled {
        mantissa: Complex64::new(1.0, 0.0),
        log_scale: 0.0,
    };

    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        Scaled {
            mantissa,
            log_scale,
        }
        .renormalize()
    }

    fn renormalize(self) -> Self {
        let a = self.mantissa.norm();
        if a == 0.0 || !a.is_finite() || (1e-150..=1e150).contains(&a) {
            return self;
        }
        Scaled {
            mantissa: self.mantissa / a,
            log_scale: self.log_scale + a.ln(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// Natural log of the modulus.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    /// Unscaled value; may round to zero or infinity.
    pub fn value(&self) -> Complex64 {
        if self.log_scale == 0.0 {
            self.mantissa
        } else {
            let a = self.mantissa.norm();
            if a == 0.0 {
                return self.mantissa;
            }
            // fold the modulus into the exponent so that a tiny mantissa
            // times a huge scale does not overflow prematurely
            (self.mantissa / a) * (a.ln() + self.log_scale).exp()
        }
    }

    pub fn conj(&self) -> Self {
        Scaled {
            mantissa: self.mantissa.conj(),
            log_scale: self.log_scale,
        }
    }

    pub fn recip(&self) -> Self {
        Scaled::new(self.mantissa.inv(), -self.log_scale)
    }

    fn aligned(a: Scaled, b: Scaled) -> (Complex64, Complex64, f64) {
        if a.is_zero() {
            return (a.mantissa, b.mantissa, b.log_scale);
        }
        if b.is_zero() {
            return (a.mantissa, b.mantissa, a.log_scale);
        }
        let s = a.log_scale.max(b.log_scale);
        let ma = if a.log_scale == s {
            a.mantissa
        } else {
            a.mantissa * (a.log_scale - s).exp()
        };
        let mb = if b.log_scale == s {
            b.mantissa
        } else {
            b.mantissa * (b.log_scale - s).exp()
        };
        (ma, mb, s)
    }
}

impl From<Complex64> for Scaled {
    fn from(z: Complex64) -> Self {
        Scaled::new(z, 0.0)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::new(Complex64::new(x, 0.0), 0.0)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa * rhs.mantissa, self.log_scale + rhs.log_scale)
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Complex64) -> Scaled {
        Scaled::new(self.mantissa * rhs, self.log_scale)
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: f64) -> Scaled {
        Scaled::new(self.mantissa * rhs, self.log_scale)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa / rhs.mantissa, self.log_scale - rhs.log_scale)
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        let (a, b, s) = Scaled::aligned(self, rhs);
        Scaled::new(a + b, s)
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        let (a, b, s) = Scaled::aligned(self, rhs);
        Scaled::new(a - b, s)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            log_scale: self.log_scale,
        }
    }
}

/// `I_n`, `I_n'`, `K_n`, `K_n'` at a single argument.
#[derive(Debug, Clone, Copy)]
pub struct BesselIk {
    pub i: Scaled,
    pub di: Scaled,
    pub k: Scaled,
    pub dk: Scaled,
}

fn check_argument(z: Complex64) -> Result<(), BesselError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(BesselError::NonFinite(z));
    }
    if z.norm() == 0.0 {
        return Err(BesselError::ZeroArgument);
    }
    if z.re < 0.0 {
        return Err(BesselError::LeftHalfPlane(z));
    }
    Ok(())
}

/// All four of `I_n, I_n', K_n, K_n'` at `z` (`Re z >= 0`, `z != 0`).
pub fn bessel_ik(order: u32, z: Complex64) -> Result<BesselIk, BesselError> {
    check_argument(z)?;
    let n = order as f64;
    let inv_z = z.inv();
    let (k_n, k_n1) = k_pair(order, z)?;
    let dk = k_n * (inv_z * n) - k_n1;

    let (i_n, i_n1) = if z.norm() <= I_SERIES_RADIUS {
        (i_series(order, z), i_series(order + 1, z))
    } else {
        let h = i_ratio(order, z)?;
        let i_n = ((k_n1 + k_n * h) * z).recip();
        (i_n, i_n * h)
    };
    let di = i_n1 + i_n * (inv_z * n);
    Ok(BesselIk {
        i: i_n,
        di,
        k: k_n,
        dk,
    })
}

/// `I_n(z)` in scaled form. Defined for every finite `z`.
pub fn bessel_i_scaled(order: u32, z: Complex64) -> Result<Scaled, BesselError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(BesselError::NonFinite(z));
    }
    if z.norm() == 0.0 {
        return Ok(if order == 0 { Scaled::ONE } else { Scaled::ZERO });
    }
    if z.re < 0.0 {
        // I_n(-z) = (-1)^n I_n(z)
        let v = bessel_i_scaled(order, -z)?;
        return Ok(if order % 2 == 0 { v } else { -v });
    }
    if z.norm() <= I_SERIES_RADIUS {
        Ok(i_series(order, z))
    } else {
        Ok(bessel_ik(order, z)?.i)
    }
}

/// `K_n(z)` in scaled form (`Re z >= 0`, `z != 0`).
pub fn bessel_k_scaled(order: u32, z: Complex64) -> Result<Scaled, BesselError> {
    check_argument(z)?;
    Ok(k_pair(order, z)?.0)
}

fn unscale(order: u32, z: Complex64, v: Scaled) -> Result<Complex64, BesselError> {
    let out = v.value();
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(BesselError::Overflow {
            order,
            z,
            log_magnitude: v.ln_abs(),
        });
    }
    Ok(out)
}

/// Modified Bessel function of the first kind, `I_n(z)`.
pub fn bessel_i(order: u32, z: Complex64) -> Result<Complex64, BesselError> {
    unscale(order, z, bessel_i_scaled(order, z)?)
}

/// Modified Bessel function of the second kind, `K_n(z)`, principal branch.
pub fn bessel_k(order: u32, z: Complex64) -> Result<Complex64, BesselError> {
    unscale(order, z, bessel_k_scaled(order, z)?)
}

/// `(I_n'(z), K_n'(z))`.
pub fn bessel_prime_pair(order: u32, z: Complex64) -> Result<(Complex64, Complex64), BesselError> {
    let b = bessel_ik(order, z)?;
    Ok((unscale(order, z, b.di)?, unscale(order, z, b.dk)?))
}

/// `psi(n)` for positive integers: `-gamma + sum_{k<n} 1/k`.
pub fn digamma_integer(n: i64) -> Result<f64, BesselError> {
    if n < 1 {
        return Err(BesselError::DigammaDomain(n));
    }
    Ok(-EULER_GAMMA + (1..n).map(|k| 1.0 / k as f64).sum::<f64>())
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Ascending series for `I_n`, returned as `(z/2)^n / n!` times the sum.
fn i_series(order: u32, z: Complex64) -> Scaled {
    if z.norm() == 0.0 {
        return if order == 0 { Scaled::ONE } else { Scaled::ZERO };
    }
    let n = order as f64;
    let q = z * z / 4.0;
    let qa = q.norm();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (n + k));
        sum += term;
        if term.norm() <= SERIES_EPS * sum.norm() && k * (n + k) > qa {
            break;
        }
        k += 1.0;
    }
    let half = z / 2.0;
    let log_scale = n * half.norm().ln() - ln_factorial(order);
    let phase = Complex64::from_polar(1.0, n * half.arg());
    Scaled::new(sum * phase, log_scale)
}

/// `I_{n+1}(z) / I_n(z)` by the modified Lentz method.
fn i_ratio(order: u32, z: Complex64) -> Result<Complex64, BesselError> {
    let tiny = 1e-100;
    let inv_z = z.inv();
    let mut f = Complex64::new(tiny, 0.0);
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for j in 1..MAX_ITER {
        let b = inv_z * (2.0 * (order as f64 + j as f64));
        d = b + d;
        if d.norm() == 0.0 {
            d = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        c = b + c.inv();
        if c.norm() == 0.0 {
            c = Complex64::new(tiny, 0.0);
        }
        let del = c * d;
        f *= del;
        if (del - 1.0).norm() < CF_EPS {
            return Ok(f);
        }
    }
    Err(BesselError::NoConvergence(z))
}

fn k0_series(z: Complex64) -> Complex64 {
    let q = z * z / 4.0;
    let lg = (z / 2.0).ln() + EULER_GAMMA;
    let mut term = Complex64::new(1.0, 0.0);
    let mut i0 = term;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        harmonic += 1.0 / k;
        i0 += term;
        tail += term * harmonic;
        if (term * harmonic).norm() <= SERIES_EPS * (tail.norm() + i0.norm()) {
            break;
        }
        k += 1.0;
    }
    -lg * i0 + tail
}

fn k1_series(z: Complex64) -> Complex64 {
    let q = z * z / 4.0;
    let lg = (z / 2.0).ln();
    // term_k = q^k / (k! (k+1)!)
    let mut term = Complex64::new(1.0, 0.0);
    let mut psi_sum = -2.0 * EULER_GAMMA + 1.0; // psi(1) + psi(2)
    let mut i1_sum = term;
    let mut tail = term * psi_sum;
    let mut harmonic = 1.0; // H_{k+1} for k = 0
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + 1.0));
        let h_k = harmonic; // H_k
        harmonic += 1.0 / (k + 1.0); // H_{k+1}
        psi_sum = -2.0 * EULER_GAMMA + h_k + harmonic;
        i1_sum += term;
        tail += term * psi_sum;
        if (term * psi_sum).norm() <= SERIES_EPS * tail.norm() {
            break;
        }
        k += 1.0;
    }
    let i1 = z / 2.0 * i1_sum;
    z.inv() + lg * i1 - z / 4.0 * tail
}

/// Integer-order ascending series for `K_n(z)`.
///
/// Accurate for small `|z|`; cancellation grows like `e^{2 Re z}` so the
/// production path only uses it (for orders 0, 1) below [`K_SERIES_RADIUS`].
pub fn bessel_k_ascending(order: u32, z: Complex64) -> Result<Complex64, BesselError> {
    check_argument(z)?;
    let n = order as usize;
    let half = z / 2.0;
    let q = half * half;
    let mut finite = Complex64::new(0.0, 0.0);
    if n > 0 {
        // sum_{k<n} (n-k-1)!/k! (-q)^k
        let mut fact_ratio = (1..n).map(|j| j as f64).product::<f64>(); // (n-1)!/0!
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 0..n {
            finite += pow * fact_ratio;
            pow *= -q;
            if k + 1 < n {
                fact_ratio /= ((n - k - 1) as f64) * ((k + 1) as f64);
            }
        }
        finite *= half.powi(-(n as i32)) * 0.5;
    }
    let i_n = i_series(order, z).value();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let log_part = -sign * half.ln() * i_n;

    let mut psi_a = digamma_integer(1)?;
    let mut psi_b = digamma_integer(n as i64 + 1)?;
    let inv_n_fact = (-ln_factorial(order)).exp();
    let mut term = Complex64::new(inv_n_fact, 0.0);
    let mut tail = term * (psi_a + psi_b);
    let mut k = 1.0;
    loop {
        term *= q / (k * (n as f64 + k));
        psi_a += 1.0 / k;
        psi_b += 1.0 / (n as f64 + k);
        let t = term * (psi_a + psi_b);
        tail += t;
        if t.norm() <= SERIES_EPS * tail.norm() && k * (n as f64 + k) > q.norm() {
            break;
        }
        k += 1.0;
    }
    let series = tail * half.powi(n as i32) * (0.5 * sign);
    Ok(finite + log_part + series)
}

/// Steed's continued fraction for `e^z K_0(z)` and `e^z K_1(z)`.
fn k01_steed(z: Complex64) -> Result<(Complex64, Complex64), BesselError> {
    let one = Complex64::new(1.0, 0.0);
    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += qnew * c;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < CF_EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(BesselError::NoConvergence(z));
    }
    h *= a1;
    let k0 = (Complex64::new(PI / 2.0, 0.0) / z).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    Ok((k0, k1))
}

/// `(K_n, K_{n+1})` sharing one scale.
fn k_pair(order: u32, z: Complex64) -> Result<(Scaled, Scaled), BesselError> {
    let (mut prev, mut cur, mut scale) = if z.norm() <= K_SERIES_RADIUS {
        (k0_series(z), k1_series(z), 0.0)
    } else {
        let (k0, k1) = k01_steed(z)?;
        // K = (e^z K) e^{-z}; keep the phase of e^{-z} in the mantissa
        let phase = Complex64::from_polar(1.0, -z.im);
        (k0 * phase, k1 * phase, -z.re)
    };
    let inv_z = z.inv();
    for l in 1..=order {
        let next = prev + cur * (inv_z * (2.0 * l as f64));
        prev = cur;
        cur = next;
        let a = cur.norm();
        if a > RESCALE_ABOVE {
            prev /= a;
            cur /= a;
            scale += a.ln();
        }
    }
    Ok((Scaled::new(prev, scale), Scaled::new(cur, scale)))
}

/// Correction polynomials `(p1(t), p2(t))` of the large-order product
/// `I_nu(x) K_nu(x) ~ t/(2 nu) [1 + p1/nu^2 + p2/nu^4]`, `t = (1 + (x/nu)^2)^{-1/2}`.
///
/// Built from the Debye polynomials `u_1..u_4` of both factors.
pub fn debye_ik_corrections(t: Complex64) -> (Complex64, Complex64) {
    let t2 = t * t;
    let t4 = t2 * t2;
    let u1 = t * (3.0 - 5.0 * t2) / 24.0;
    let u2 = t2 * (81.0 - 462.0 * t2 + 385.0 * t4) / 1152.0;
    let u3 = t * t2 * (30375.0 - 369603.0 * t2 + 765765.0 * t4 - 425425.0 * t4 * t2) / 414720.0;
    let u4 = t4
        * (4465125.0 - 94121676.0 * t2 + 349922430.0 * t4 - 446185740.0 * t4 * t2
            + 185910725.0 * t4 * t4)
        / 39813120.0;
    let p1 = u2 * 2.0 - u1 * u1;
    let p2 = u4 * 2.0 - u1 * u3 * 2.0 + u2 * u2;
    (p1, p2)
}

/// Uniform large-order approximation of the product `I_nu(x) K_nu(x)`,
/// with relative error `O(nu^-6)`.
pub fn debye_ik_product(nu: f64, x: Complex64) -> Complex64 {
    let w = x / nu;
    let t = (w * w + 1.0).sqrt().inv();
    let (p1, p2) = debye_ik_corrections(t);
    let inv2 = 1.0 / (nu * nu);
    t / (2.0 * nu) * (Complex64::new(1.0, 0.0) + p1 * inv2 + p2 * inv2 * inv2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn trivial_values_at_origin() {
        assert_eq!(bessel_i(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(bessel_i(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(bessel_k(0, c(0.0, 0.0)), Err(BesselError::ZeroArgument));
    }

    #[test]
    fn left_half_plane_is_rejected_for_k() {
        assert!(matches!(
            bessel_k(0, c(-1.0, 0.5)),
            Err(BesselError::LeftHalfPlane(_))
        ));
        // I is entire and handled through the parity relation
        let a = bessel_i(3, c(-1.0, 0.5)).unwrap();
        let b = bessel_i(3, c(1.0, -0.5)).unwrap();
        assert!(rel(a, -b) < 1e-14);
    }

    #[test]
    fn order_zero_derivatives() {
        let z = c(1.3, -0.7);
        let (di, dk) = bessel_prime_pair(0, z).unwrap();
        assert!(rel(di, bessel_i(1, z).unwrap()) < 1e-13);
        assert!(rel(dk, -bessel_k(1, z).unwrap()) < 1e-13);
    }

    #[test]
    fn digamma_values() {
        assert!((digamma_integer(1).unwrap() + 0.5772156649).abs() < 1e-10);
        assert!((digamma_integer(2).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        assert!((digamma_integer(5).unwrap() - (25.0 / 12.0 - EULER_GAMMA)).abs() < 1e-15);
        assert_eq!(digamma_integer(0), Err(BesselError::DigammaDomain(0)));
    }

    #[test]
    fn steed_matches_series_on_the_switch_circle() {
        for k in 0..16 {
            let phi = -PI / 2.0 + PI * k as f64 / 15.0;
            let z = Complex64::from_polar(2.0, phi);
            if z.re < 0.0 {
                continue;
            }
            let (k0s, k1s) = k01_steed(z).unwrap();
            let ez = (-z).exp();
            assert!(rel(k0s * ez, k0_series(z)) < 1e-12, "K0 at {z}");
            assert!(rel(k1s * ez, k1_series(z)) < 1e-12, "K1 at {z}");
        }
    }

    #[test]
    fn ascending_k_agrees_with_recurrence() {
        for &z in &[c(0.3, 0.1), c(1.0, -1.0), c(1.5, 0.9)] {
            for n in 0..8 {
                let a = bessel_k_ascending(n, z).unwrap();
                let b = bessel_k(n, z).unwrap();
                assert!(rel(a, b) < 1e-12, "n={n} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn i_paths_overlap_at_series_radius() {
        // series and continued-fraction/Wronskian paths around |z| = 12
        for &phi in &[-1.2, -PI / 4.0, 0.0, 0.6, 1.3] {
            let z = Complex64::from_polar(I_SERIES_RADIUS, phi);
            let (k_n, k_n1) = k_pair(4, z).unwrap();
            let h = i_ratio(4, z).unwrap();
            let wr = ((k_n1 + k_n * h) * z).recip();
            let s = i_series(4, z);
            assert!(rel(wr.value(), s.value()) < 1e-9, "phi={phi}");
        }
    }

    #[test]
    fn scaled_products_survive_large_orders() {
        // I_m(z) K_m(z) ~ 1/(2m) even where the factors under/overflow
        let z = c(3.0, -3.0);
        let b = bessel_ik(900, z).unwrap();
        let p = (b.i * b.k).value();
        // recurrence to order 900 costs a few digits
        assert!(rel(p, debye_ik_product(900.0, z)) < 1e-10);
        assert!(bessel_k(900, z).is_err());
    }

    #[test]
    fn debye_corrections_closed_form() {
        // 2 u2 - u1^2 collapses to (t^2 - 6 t^4 + 5 t^6)/8
        for &t in &[c(0.3, 0.0), c(0.9, -0.2), c(1.1, 0.4)] {
            let t2 = t * t;
            let want = t2 * (1.0 - 6.0 * t2 + 5.0 * t2 * t2) / 8.0;
            assert!((debye_ik_corrections(t).0 - want).norm() < 1e-14);
        }
    }

    #[test]
    fn debye_product_matches_exact_at_moderate_order() {
        let z = Complex64::from_polar(40.0, -PI / 4.0);
        let b = bessel_ik(60, z).unwrap();
        let exact = (b.i * b.k).value();
        // the next omitted term is O(nu^-6)
        assert!(rel(debye_ik_product(60.0, z), exact) < 1e-9);
    }
}
