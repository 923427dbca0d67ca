//! Boundary-layer solution for fast rotation, `1 << omega << 1/eps`.
//!
//! Away from the ring `r = r0` the Green's function is radially symmetric.
//! Near the trap an elliptic layer of width `1/omega` resolves the
//! advection–diffusion balance, and behind it a parabolic wake of width
//! `omega^{-1/2}` wraps around the ring. The composite is
//! `G = G_outer + G_elliptic + G_wake - G_common`.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::reference::TrapConfig;
use crate::special::{bessel_k_scaled, BesselError, Scaled, EULER_GAMMA};

/// Above `eps * omega` of this size the regime assumption `omega << 1/eps` fails.
pub const VALIDITY_EPS_OMEGA: f64 = 0.1;
/// Below `r0 * omega` of this size the boundary layers are not thin.
pub const VALIDITY_SPEED: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LargeOmegaError {
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error("composite solution is singular at the trap centre")]
    SingularPoint,
    #[error("requires 0 < r0 < 1 and omega > 0 (got r0 = {r0}, omega = {omega})")]
    InvalidParameters { r0: f64, omega: f64 },
}

fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

fn check(r0: f64, omega: f64) -> Result<(), LargeOmegaError> {
    if !(r0 > 0.0 && r0 < 1.0 && omega > 0.0 && omega.is_finite()) {
        return Err(LargeOmegaError::InvalidParameters { r0, omega });
    }
    if r0 * omega < VALIDITY_SPEED {
        log::warn!("r0*omega = {} is small; boundary layers are not thin", r0 * omega);
    }
    Ok(())
}

/// Constant `H_hat` fixed by the zero-mean condition on `G`.
pub fn h_hat(r0: f64) -> f64 {
    -(-r0 * r0 / 2.0 + 3.0 / 8.0 + 0.5 * r0.ln()) / PI
}

/// Radially symmetric outer solution, including `H_hat`.
pub fn outer_green(r: f64, r0: f64) -> f64 {
    let log_part = if r > 0.0 {
        heaviside(r - r0) * (r / r0).ln()
    } else {
        0.0
    };
    (r * r - r0 * r0) / (4.0 * PI) - log_part / (2.0 * PI) + h_hat(r0)
}

/// Elliptic-layer term `K0(r0 rho/2) e^{-r0 eta/2} / (2 pi)` in stretched
/// coordinates `(xi, eta)` around the trap.
pub fn elliptic_layer(xi: f64, eta: f64, r0: f64) -> Result<f64, LargeOmegaError> {
    let rho = xi.hypot(eta);
    if rho == 0.0 {
        return Err(LargeOmegaError::SingularPoint);
    }
    let k = bessel_k_scaled(0, Complex64::new(r0 * rho / 2.0, 0.0))?;
    // the product e^{-(r0/2)(rho + eta)} never overflows
    let v = (k * Scaled::new(Complex64::new(1.0, 0.0), -r0 * eta / 2.0)).value();
    Ok(v.re / (2.0 * PI))
}

/// Far-wake form of the elliptic layer, present only behind the trap (`eta < 0`).
pub fn common_part(xi: f64, eta: f64, r0: f64) -> f64 {
    if eta >= 0.0 {
        return 0.0;
    }
    let a = eta.abs();
    (-r0 * xi * xi / (4.0 * a)).exp() / (2.0 * (PI * r0 * a).sqrt())
}

/// Parabolic wake along the ring; `theta` in `[0, 2 pi)` measured from the trap.
pub fn parabolic_layer(r: f64, theta: f64, r0: f64, omega: f64) -> f64 {
    let lag = 2.0 * PI - theta;
    if lag <= 0.0 {
        return 0.0;
    }
    let dr = r - r0;
    (-omega * dr * dr / (4.0 * lag)).exp() / (2.0 * r0 * (PI * omega * lag).sqrt())
}

/// Composite Green's function at polar point `(r, theta)`, source at `(r0, 0)`.
pub fn composite_green(r: f64, theta: f64, r0: f64, omega: f64) -> Result<f64, LargeOmegaError> {
    check(r0, omega)?;
    let theta = theta.rem_euclid(2.0 * PI);
    let xi = omega * (r * theta.cos() - r0);
    let eta = omega * r * theta.sin();
    Ok(outer_green(r, r0) + elliptic_layer(xi, eta, r0)? + parabolic_layer(r, theta, r0, omega)
        - common_part(xi, eta, r0))
}

/// Near-trap limit of the composite, used to fix the matching constant.
pub fn near_trap_green(dist: f64, r0: f64, omega: f64) -> f64 {
    (-dist.ln() - (r0 * omega / 4.0).ln() - EULER_GAMMA) / (2.0 * PI) + h_hat(r0)
}

/// Matching constant `H = pi H_hat - [log(r0 omega eps / 4) + gamma]/2`.
pub fn matching_h(cfg: &TrapConfig) -> Result<f64, LargeOmegaError> {
    check(cfg.r0, cfg.omega)?;
    if cfg.omega0() > VALIDITY_EPS_OMEGA {
        log::warn!(
            "eps*omega = {} is not small; large-omega asymptotics are leaving their range",
            cfg.omega0()
        );
    }
    Ok(PI * h_hat(cfg.r0) - 0.5 * ((cfg.r0 * cfg.omega * cfg.eps / 4.0).ln() + EULER_GAMMA))
}

/// Leading-order mass `pi H`.
pub fn mass_large_omega(cfg: &TrapConfig) -> Result<f64, LargeOmegaError> {
    Ok(PI * matching_h(cfg)?)
}

/// `dM/dr0` of [`mass_large_omega`].
pub fn mass_large_omega_gradient(r0: f64) -> f64 {
    PI * (r0 - 1.0 / r0)
}

/// MFPT field `u = -pi G + H` from the composite.
pub fn field_u(r: f64, theta: f64, cfg: &TrapConfig) -> Result<f64, LargeOmegaError> {
    Ok(-PI * composite_green(r, theta, cfg.r0, cfg.omega)? + matching_h(cfg)?)
}
