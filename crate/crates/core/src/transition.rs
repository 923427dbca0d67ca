//! Transition regime `omega = omega0 / eps`: the trap moves a distance
//! comparable to its own size per unit diffusion time.
//!
//! In trap-scaled coordinates the inner problem is
//! `Δμ + s0 ∂_η μ = 0` outside the unit disk, `μ = -1` on its boundary and
//! `μ → 0` far away, with `s0 = r0 omega0`. It is solved as a first-kind
//! boundary integral equation for the single-layer density
//! `σ = ∂μ/∂r` on the unit circle, using the free-space adjoint Green's
//! function `G = -(1/2π) e^{k(η - z2)} K0(k|ξ - z|)`, `k = s0/2`.
//! The flux `Φ = -∮σ` fixes `u0(s0) = -π/Φ`, and the outer radial solution
//! gives the mass `π[r0²/2 - 3/8 - log(r0)/2 + u0(r0 omega0)]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::numerics::{bisect, fornberg_weights, golden_section, NumericsError, Pchip};
use crate::special::{bessel_i, bessel_k_scaled, BesselError, Scaled, EULER_GAMMA};

/// Width, in units of `k d`, of the window that confines the analytic
/// log-splitting to the neighbourhood of the diagonal.
const SPLIT_WINDOW: f64 = 2.0;
/// Condition estimates above this are reported as failures.
const MAX_CONDITION: f64 = 1e13;
/// Disagreement between 3- and 5-point derivatives that triggers a warning.
const DERIV_WARN: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransitionError {
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid inner-solver parameters: {0}")]
    InvalidParams(String),
    #[error("s0 must be positive and finite, got {0}")]
    InvalidS0(f64),
    #[error("adjoint Green's function evaluated at its source")]
    CoincidentPoints,
    #[error("boundary system for s0 = {s0} is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { s0: f64, condition: f64 },
    #[error("u0({s0}) = {u0} is not positive: flux has the wrong sign")]
    NonPositiveU0 { s0: f64, u0: f64 },
    #[error("r0 = {0} must lie in (0, 1)")]
    InvalidRadius(f64),
    #[error("omega0 must be positive, got {0}")]
    InvalidOmega0(f64),
    #[error("s0 = {s0} lies outside the tabulated range [{lo}, {hi}]")]
    OutOfTable { s0: f64, lo: f64, hi: f64 },
}

/// Discretisation of the boundary integral equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerSolverParams {
    /// Minimum number of equispaced nodes; raised automatically for large
    /// `s0`, see [`effective_nodes`].
    pub n_nodes: usize,
    pub s0_grid: Vec<f64>,
    /// Relative step in `log s0` for [`u0_prime_direct`].
    pub deriv_step: f64,
}

impl Default for InnerSolverParams {
    fn default() -> Self {
        InnerSolverParams {
            n_nodes: 128,
            s0_grid: default_s0_grid(),
            deriv_step: 0.05,
        }
    }
}

impl InnerSolverParams {
    pub fn validate(&self) -> Result<(), TransitionError> {
        let bad = |m: String| Err(TransitionError::InvalidParams(m));
        if self.n_nodes < 32 || self.n_nodes % 2 != 0 {
            return bad(format!("n_nodes = {} must be even and at least 32", self.n_nodes));
        }
        if self.s0_grid.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return bad("s0_grid entries must be positive".into());
        }
        if self.s0_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("s0_grid must be strictly increasing".into());
        }
        if !(self.deriv_step > 0.0 && self.deriv_step < 1.0) {
            return bad(format!("deriv_step = {} must lie in (0, 1)", self.deriv_step));
        }
        Ok(())
    }
}

/// Geometrically spaced grid of `count` points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default table grid: 49 points geometric in `s0` from 0.05 to 60.
pub fn default_s0_grid() -> Vec<f64> {
    geometric_grid(0.05, 60.0, 49)
}

/// Node count actually used at `s0`: the kernel varies on the angular scale
/// `1/k`, so resolution grows linearly with `s0`.
pub fn effective_nodes(s0: f64, requested: usize) -> usize {
    let k = s0 / 2.0;
    let needed = (12.0 * k).ceil() as usize;
    requested.max(needed.div_ceil(4) * 4)
}

fn check_s0(s0: f64) -> Result<(), TransitionError> {
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(TransitionError::InvalidS0(s0));
    }
    Ok(())
}

/// `e^{x} K_n(x)` for real `x > 0`.
fn k_exp_scaled(order: u32, x: f64) -> Result<f64, BesselError> {
    let k = bessel_k_scaled(order, Complex64::new(x, 0.0))?;
    Ok((k * Scaled::new(Complex64::new(1.0, 0.0), x)).value().re)
}

fn i_real(order: u32, x: f64) -> Result<f64, BesselError> {
    Ok(bessel_i(order, Complex64::new(x, 0.0))?.re)
}

/// Free-space adjoint Green's function `G(ξ; z)` with drift `s0`.
pub fn adjoint_green(point: [f64; 2], source: [f64; 2], s0: f64) -> Result<f64, TransitionError> {
    check_s0(s0)?;
    let k = s0 / 2.0;
    let dist = (point[0] - source[0]).hypot(point[1] - source[1]);
    if dist == 0.0 {
        return Err(TransitionError::CoincidentPoints);
    }
    let x = k * dist;
    // both exponents combined keep the product finite
    let e = k * (point[1] - source[1]) - x;
    Ok(-(e.exp() * k_exp_scaled(0, x)?) / (2.0 * PI))
}

/// Per-offset kernel data; everything depends on `θ - φ` except the drift factor.
struct OffsetData {
    d: f64,
    log_4sin2: f64,
    k0s: f64,
    k1s: f64,
    i0: f64,
    i1: f64,
    window: f64,
    kress: f64,
}

fn kress_weight(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mut s = 0.0;
    for m in 1..n {
        s += (m as f64 * t).cos() / m as f64;
    }
    -2.0 * PI / nf * s - PI / (nf * nf) * (nf * t).cos()
}

fn offset_table(k: f64, nodes: usize) -> Result<Vec<OffsetData>, BesselError> {
    let half = nodes / 2;
    (0..nodes)
        .map(|q| {
            let t = 2.0 * PI * q as f64 / nodes as f64;
            let kress = kress_weight(t, half);
            if q == 0 {
                return Ok(OffsetData {
                    d: 0.0,
                    log_4sin2: 0.0,
                    k0s: 0.0,
                    k1s: 0.0,
                    i0: 1.0,
                    i1: 0.0,
                    window: 1.0,
                    kress,
                });
            }
            let d = 2.0 * (t / 2.0).sin().abs();
            let x = k * d;
            let w_arg = (x / SPLIT_WINDOW).powi(8);
            let (window, i0, i1) = if w_arg < 700.0 {
                ((-w_arg).exp(), i_real(0, x)?, i_real(1, x)?)
            } else {
                (0.0, 0.0, 0.0)
            };
            Ok(OffsetData {
                d,
                log_4sin2: (d * d).ln(),
                k0s: k_exp_scaled(0, x)?,
                k1s: k_exp_scaled(1, x)?,
                i0,
                i1,
                window,
                kress,
            })
        })
        .collect()
}

/// Single-layer density on the unit circle together with solve diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDensity {
    pub s0: f64,
    pub theta: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Max-norm residual of the discrete system relative to the right-hand side.
    pub residual: f64,
    /// 1-norm condition estimate of the system matrix.
    pub condition: f64,
}

impl BoundaryDensity {
    /// `Φ = ∮ ∂μ/∂n` with the normal pointing into the trap.
    pub fn flux(&self) -> f64 {
        let h = 2.0 * PI / self.sigma.len() as f64;
        -h * self.sigma.iter().sum::<f64>()
    }

    /// `u0 = -π/Φ`.
    pub fn u0(&self) -> f64 {
        -PI / self.flux()
    }

    /// Reconstruct `μ` at a point outside the unit disk from the density.
    pub fn field(&self, point: [f64; 2]) -> Result<f64, TransitionError> {
        let (zx, zy) = (point[0], point[1]);
        if zx.hypot(zy) <= 1.0 {
            return Err(TransitionError::InvalidParams(
                "field reconstruction needs a point outside the unit circle".into(),
            ));
        }
        let k = self.s0 / 2.0;
        let h = 2.0 * PI / self.sigma.len() as f64;
        let mut acc = 0.0;
        for (&th, &sig) in self.theta.iter().zip(&self.sigma) {
            let (s, c) = th.sin_cos();
            let dist = (c - zx).hypot(s - zy);
            let x = k * dist;
            let e = (k * (s - zy) - x).exp();
            let g = -e * k_exp_scaled(0, x)? / (2.0 * PI);
            let dg_dr = -e / (2.0 * PI) * (k * s * k_exp_scaled(0, x)?
                - k * k_exp_scaled(1, x)? * (1.0 - c * zx - s * zy) / dist);
            acc += dg_dr + g * sig - self.s0 * g * s;
        }
        Ok(h * acc)
    }

    /// Limit of `μ/F` along the ray at angle `phi`.
    pub fn far_field_coefficient(&self, phi: f64) -> f64 {
        let k = self.s0 / 2.0;
        let h = 2.0 * PI / self.sigma.len() as f64;
        let sum: f64 = self
            .theta
            .iter()
            .zip(&self.sigma)
            .map(|(&th, &sig)| {
                let proj = th.sin() + (th - phi).cos();
                (k * proj).exp() * (sig + k * proj - self.s0 * th.sin())
            })
            .sum();
        -h * sum / (2.0 * PI)
    }
}

/// Far-field shape `K0(k ρ) e^{-k η}` that `μ` must approach.
///
/// Along the ray at angle `φ`, `μ ≈ C(φ) F` with a relative error of order
/// `k/ρ` (see [`BoundaryDensity::far_field_coefficient`]).
pub fn far_field_shape(point: [f64; 2], s0: f64) -> Result<f64, TransitionError> {
    check_s0(s0)?;
    let k = s0 / 2.0;
    let rho = point[0].hypot(point[1]);
    let x = k * rho;
    Ok((-k * point[1] - x).exp() * k_exp_scaled(0, x)?)
}

/// 1-norm estimate of `A^{-1}` (Hager's method).
fn inverse_norm_estimate(
    solve: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
    solve_t: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
    n: usize,
) -> Option<f64> {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x)?;
        est = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve_t(&xi)?;
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |acc, (i, v)| {
            if v.abs() > acc.1 {
                (i, v.abs())
            } else {
                acc
            }
        });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    Some(est)
}

/// Nyström solution of the boundary integral equation at `s0`.
///
/// The log singularity of `K0` and `K1` is split off analytically and
/// integrated with exact trigonometric weights; the remainder is smooth and
/// integrated by the trapezoid rule.
pub fn solve_boundary_density(s0: f64, params: &InnerSolverParams) -> Result<BoundaryDensity, TransitionError> {
    check_s0(s0)?;
    params.validate()?;
    let n = effective_nodes(s0, params.n_nodes);
    let k = s0 / 2.0;
    let h = 2.0 * PI / n as f64;
    let table = offset_table(k, n)?;
    let theta: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
    let sin: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let log_half_k = (k / 2.0).ln() + EULER_GAMMA;

    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::from_element(n, 0.5);
    for i in 0..n {
        let mut rhs = 0.0;
        for j in 0..n {
            let q = (j + n - i) % n;
            let o = &table[q];
            let (la, ma, lb, mb) = if q == 0 {
                (
                    -1.0 / (4.0 * PI),
                    -log_half_k / (2.0 * PI),
                    -k * sin[i] / (4.0 * PI),
                    -k * sin[i] * log_half_k / (2.0 * PI) + 1.0 / (4.0 * PI),
                )
            } else {
                let x = k * o.d;
                let de = k * (sin[j] - sin[i]);
                let full_a = (de - x).exp() * o.k0s / (2.0 * PI);
                let full_b = k / (2.0 * PI) * (de - x).exp() * (sin[j] * o.k0s + o.k1s * o.d / 2.0);
                let (la, lb) = if o.window > 0.0 {
                    let e = de.exp() * o.window;
                    (
                        -e * o.i0 / (4.0 * PI),
                        e * (x * o.i1 / (8.0 * PI) - k * sin[j] * o.i0 / (4.0 * PI)),
                    )
                } else {
                    (0.0, 0.0)
                };
                (la, full_a - la * o.log_4sin2, lb, full_b - lb * o.log_4sin2)
            };
            a[(i, j)] = o.kress * la + h * ma;
            rhs += o.kress * lb + h * mb;
        }
        b[i] += rhs;
    }

    let lu = a.clone().full_piv_lu();
    let singular = || TransitionError::IllConditioned {
        s0,
        condition: f64::INFINITY,
    };
    let sigma = lu.solve(&b).ok_or_else(singular)?;
    let lu_t = a.transpose().lu();
    let inv_norm = inverse_norm_estimate(|v| lu.solve(v), |v| lu_t.solve(v), n).ok_or_else(singular)?;
    let a_norm = (0..n)
        .map(|j| a.column(j).lp_norm(1))
        .fold(0.0, f64::max);
    let condition = a_norm * inv_norm;
    if !(condition < MAX_CONDITION) {
        return Err(TransitionError::IllConditioned { s0, condition });
    }
    let residual = (&a * &sigma - &b).amax() / b.amax();
    log::debug!("s0 = {s0}: {n} nodes, condition {condition:.3e}, residual {residual:.2e}");
    Ok(BoundaryDensity {
        s0,
        theta,
        sigma: sigma.iter().copied().collect(),
        residual,
        condition,
    })
}

/// Inner constant `u0(s0) = -π/Φ(s0)`.
pub fn inner_constant_u0(s0: f64, params: &InnerSolverParams) -> Result<f64, TransitionError> {
    let u0 = solve_boundary_density(s0, params)?.u0();
    if !(u0 > 0.0) {
        return Err(TransitionError::NonPositiveU0 { s0, u0 });
    }
    Ok(u0)
}

/// Small-`s0` behaviour `u0 ≈ -[log(s0/4) + γ]/2`.
pub fn u0_small_s0(s0: f64) -> f64 {
    -0.5 * ((s0 / 4.0).ln() + EULER_GAMMA)
}

/// `du0/ds0` by a central difference in `log s0` of two direct solves.
pub fn u0_prime_direct(s0: f64, params: &InnerSolverParams) -> Result<f64, TransitionError> {
    let f = params.deriv_step.exp();
    let up = inner_constant_u0(s0 * f, params)?;
    let dn = inner_constant_u0(s0 / f, params)?;
    Ok((up - dn) / (2.0 * params.deriv_step) / s0)
}

/// Tabulated `u0(s0)` and `u0'(s0)` with monotone cubic interpolation in
/// `log s0`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxTable {
    pub s0: Vec<f64>,
    pub u0: Vec<f64>,
    pub u0_prime: Vec<f64>,
    #[serde(skip)]
    interp: Option<(Pchip, Pchip)>,
}

impl FluxTable {
    /// Solve the inner problem at every grid point.
    pub fn build(params: &InnerSolverParams) -> Result<Self, TransitionError> {
        params.validate()?;
        let solve = |s: &f64| inner_constant_u0(*s, params);
        #[cfg(feature = "parallel")]
        let u0: Result<Vec<f64>, _> = {
            use rayon::prelude::*;
            params.s0_grid.par_iter().map(solve).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let u0: Result<Vec<f64>, _> = params.s0_grid.iter().map(solve).collect();
        Self::from_samples(params.s0_grid.clone(), u0?)
    }

    /// Table from precomputed samples; derivatives by finite differences.
    pub fn from_samples(s0: Vec<f64>, u0: Vec<f64>) -> Result<Self, TransitionError> {
        if s0.len() != u0.len() || s0.len() < 5 {
            return Err(NumericsError::BadGrid {
                needed: 5,
                got: s0.len().min(u0.len()),
            }
            .into());
        }
        let mut t = FluxTable {
            s0,
            u0,
            u0_prime: Vec::new(),
            interp: None,
        };
        t.u0_prime = u0_derivative(&t)?;
        let logs: Vec<f64> = t.s0.iter().map(|s| s.ln()).collect();
        t.interp = Some((
            Pchip::new(logs.clone(), t.u0.clone())?,
            Pchip::new(logs, t.u0_prime.clone())?,
        ));
        Ok(t)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s0[0], self.s0[self.s0.len() - 1])
    }

    fn interpolants(&self) -> (Pchip, Pchip) {
        // deserialised tables carry no interpolants; rebuild on demand
        match &self.interp {
            Some(p) => p.clone(),
            None => {
                let logs: Vec<f64> = self.s0.iter().map(|s| s.ln()).collect();
                (
                    Pchip::new(logs.clone(), self.u0.clone()).expect("validated grid"),
                    Pchip::new(logs, self.u0_prime.clone()).expect("validated grid"),
                )
            }
        }
    }

    fn check_range(&self, s0: f64) -> Result<(), TransitionError> {
        let (lo, hi) = self.range();
        if !(s0 >= lo && s0 <= hi) {
            return Err(TransitionError::OutOfTable { s0, lo, hi });
        }
        Ok(())
    }

    pub fn u0_at(&self, s0: f64) -> Result<f64, TransitionError> {
        self.check_range(s0)?;
        match &self.interp {
            Some((p, _)) => Ok(p.eval(s0.ln())?),
            None => Ok(self.interpolants().0.eval(s0.ln())?),
        }
    }

    pub fn u0_prime_at(&self, s0: f64) -> Result<f64, TransitionError> {
        self.check_range(s0)?;
        match &self.interp {
            Some((_, p)) => Ok(p.eval(s0.ln())?),
            None => Ok(self.interpolants().1.eval(s0.ln())?),
        }
    }
}

/// `du0/ds0` at the table nodes: 5-point Fornberg stencils in `log s0`
/// (one-sided at the ends), checked against 3-point stencils.
pub fn u0_derivative(table: &FluxTable) -> Result<Vec<f64>, TransitionError> {
    let n = table.s0.len();
    if n < 5 || table.u0.len() != n {
        return Err(NumericsError::BadGrid { needed: 5, got: n }.into());
    }
    let x: Vec<f64> = table.s0.iter().map(|s| s.ln()).collect();
    let stencil = |i: usize, width: usize| {
        let lo = i.saturating_sub(width / 2).min(n - width);
        lo..lo + width
    };
    let apply = |i: usize, width: usize| {
        let r = stencil(i, width);
        let w = fornberg_weights(x[i], &x[r.clone()], 1);
        w.iter().zip(&table.u0[r]).map(|(w, u)| w * u).sum::<f64>()
    };
    let mut worst = 0.0f64;
    let out = (0..n)
        .map(|i| {
            let fine = apply(i, 5);
            let coarse = apply(i, 3);
            worst = worst.max((fine - coarse).abs());
            fine / table.s0[i]
        })
        .collect();
    if worst > DERIV_WARN {
        log::warn!("u0 grid may be too coarse: 3- and 5-point derivatives differ by {worst:.2e}");
    }
    Ok(out)
}

/// Outer radial MFPT, `u = u0` on the ring `r = r0`.
pub fn outer_field(r: f64, r0: f64, u0: f64) -> f64 {
    let base = u0 + (r0 * r0 - r * r) / 4.0;
    if r > r0 {
        base + 0.5 * (r / r0).ln()
    } else {
        base
    }
}

fn check_radius(r0: f64, omega0: f64) -> Result<(), TransitionError> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(TransitionError::InvalidRadius(r0));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(TransitionError::InvalidOmega0(omega0));
    }
    Ok(())
}

/// Leading-order mass; depends on `eps` and `omega` only through `omega0`.
pub fn mass_transition(r0: f64, omega0: f64, table: &FluxTable) -> Result<f64, TransitionError> {
    check_radius(r0, omega0)?;
    let u0 = table.u0_at(r0 * omega0)?;
    Ok(PI * (r0 * r0 / 2.0 - 3.0 / 8.0 - 0.5 * r0.ln() + u0))
}

/// `dM/dr0 = π[r0 - 1/(2 r0) + omega0 u0'(r0 omega0)]`.
pub fn mass_transition_gradient(r0: f64, omega0: f64, table: &FluxTable) -> Result<f64, TransitionError> {
    check_radius(r0, omega0)?;
    let du = table.u0_prime_at(r0 * omega0)?;
    Ok(PI * (r0 - 0.5 / r0 + omega0 * du))
}

/// Optimal ring radius in the transition regime, with every local minimum found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionOptimum {
    pub r0_opt: f64,
    pub mass: f64,
    /// `(r0, mass)` of every local minimum, ascending in `r0`.
    pub local_minima: Vec<(f64, f64)>,
}

/// Radii admissible for `omega0` given the table range, clipped to `(0, 1)`.
pub fn admissible_radii(omega0: f64, table: &FluxTable) -> Option<(f64, f64)> {
    let (lo, hi) = table.range();
    let a = (lo / omega0).max(1e-6);
    let b = (hi / omega0).min(1.0 - 1e-9);
    (a < b).then_some((a, b))
}

/// Roots of the first-order condition on a scan of `scan` points; multiple
/// minima are ranked by direct mass comparison. If the mass still descends at
/// an end of the admissible interval, that end is a candidate too.
pub fn optimal_radius_transition(omega0: f64, table: &FluxTable) -> Result<TransitionOptimum, TransitionError> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(TransitionError::InvalidOmega0(omega0));
    }
    let (a, b) = admissible_radii(omega0, table).ok_or_else(|| {
        let (lo, hi) = table.range();
        TransitionError::OutOfTable { s0: omega0, lo, hi }
    })?;
    let scan = 400;
    let r: Vec<f64> = (0..=scan).map(|i| a + (b - a) * i as f64 / scan as f64).collect();
    let g: Vec<f64> = r
        .iter()
        .map(|&x| mass_transition_gradient(x, omega0, table))
        .collect::<Result<_, _>>()?;
    let mut minima = Vec::new();
    for i in 0..scan {
        if g[i] < 0.0 && g[i + 1] >= 0.0 {
            let root = bisect(
                |x| mass_transition_gradient(x, omega0, table).unwrap_or(f64::NAN),
                r[i],
                r[i + 1],
                1e-12,
            )?;
            minima.push((root, mass_transition(root, omega0, table)?));
        }
    }
    if g[scan] < 0.0 {
        minima.push((b, mass_transition(b, omega0, table)?));
    }
    if g[0] > 0.0 {
        minima.insert(0, (a, mass_transition(a, omega0, table)?));
    }
    let best = minima
        .iter()
        .copied()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or(TransitionError::InvalidOmega0(omega0))?;
    Ok(TransitionOptimum {
        r0_opt: best.0,
        mass: best.1,
        local_minima: minima,
    })
}

/// Argmin of the mass by golden section on `[lo, hi]`; an independent check
/// on the first-order condition.
pub fn argmin_mass_transition(omega0: f64, table: &FluxTable, lo: f64, hi: f64) -> (f64, f64) {
    golden_section(
        |x| mass_transition(x, omega0, table).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-9,
    )
}
