//! Closed-form MFPT solutions: the 1D interval, the 1D circle with a moving
//! trap, the fast-rotation (radially symmetric) disk limit and the static
//! Neumann Green's function.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::numerics::bisect;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error("invalid trap configuration: {0}")]
    InvalidConfig(String),
    #[error("radius {r} lies inside the absorbing annulus ({lo}, {hi})")]
    InsideAnnulus { r: f64, lo: f64, hi: f64 },
    #[error("{0} is undefined at r0 = 0 (logarithmic singularity)")]
    SingularAtCenter(&'static str),
    #[error("static regular part diverges as r0 -> 1 (got r0 = {0})")]
    BoundaryDivergence(f64),
}

/// Trap geometry and rotation rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Radius of the ring the trap centre travels on.
    pub r0: f64,
    /// Trap radius.
    pub eps: f64,
    /// Angular velocity.
    pub omega: f64,
}

impl TrapConfig {
    pub fn new(r0: f64, eps: f64, omega: f64) -> Result<Self, ReferenceError> {
        let bad = |m: String| Err(ReferenceError::InvalidConfig(m));
        if !(r0.is_finite() && (0.0..1.0).contains(&r0)) {
            return bad(format!("r0 = {r0} must lie in [0, 1)"));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return bad(format!("eps = {eps} must be positive"));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return bad(format!("omega = {omega} must be finite and non-negative"));
        }
        if r0 + eps >= 1.0 {
            return bad(format!("trap (r0 + eps = {}) must lie inside the disk", r0 + eps));
        }
        if eps > 0.2 {
            log::warn!("eps = {eps} is not small; asymptotic formulas lose accuracy");
        }
        Ok(TrapConfig { r0, eps, omega })
    }

    /// `eps * omega`, the parameter of the transition regime.
    pub fn omega0(&self) -> f64 {
        self.eps * self.omega
    }

    /// Linear speed of the trap centre, `r0 * omega`.
    pub fn speed(&self) -> f64 {
        self.r0 * self.omega
    }
}

/// MFPT on `[0, 1]` with reflecting ends and an absorbing point at `trap_pos`.
pub fn interval_exact(x: f64, trap_pos: f64, d: f64) -> f64 {
    if x <= trap_pos {
        (trap_pos * trap_pos - x * x) / (2.0 * d)
    } else {
        let (a, b) = (1.0 - trap_pos, 1.0 - x);
        (a * a - b * b) / (2.0 * d)
    }
}

/// MFPT on the circle, trap at `theta = 0` moving with angular velocity
/// `omega` in the negative direction (stationary in the co-rotating frame).
pub fn circle_exact(theta: f64, omega: f64, d: f64) -> f64 {
    if omega == 0.0 {
        return theta * (2.0 * PI - theta) / (2.0 * d);
    }
    let c = 2.0 * PI * omega / d;
    if c.abs() < 1.0 {
        // v = theta (theta - 2 pi)/d * [phi(a theta) - phi(c)] / [(x - y) phi(c)]
        // with phi(x) = (1 - e^{-x})/x, expanded to avoid the 1/omega^2 cancellation
        let (x, y) = (omega * theta / d, c);
        let (mut diff, mut phi_c) = (0.0, 1.0);
        let (mut sym, mut xk, mut yk, mut fact) = (0.0, 1.0, 1.0, 1.0);
        for k in 1..40 {
            // sym = sum_{j<k} x^j y^{k-1-j}
            sym = sym * y + xk;
            xk *= x;
            yk *= y;
            fact *= (k + 1) as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            diff += sign * sym / fact;
            phi_c += sign * yk / fact;
        }
        return theta * (theta - 2.0 * PI) / d * diff / phi_c;
    }
    let b = 2.0 * PI / (omega * (-2.0 * PI * omega / d).exp_m1());
    b * (-omega * theta / d).exp_m1() - theta / omega
}

/// Radially symmetric field of the infinitely fast trap, which smears into an
/// absorbing annulus `r0 - eps < r < r0 + eps`.
pub fn fast_regime_field(r: f64, cfg: &TrapConfig) -> Result<f64, ReferenceError> {
    let (r0, e) = (cfg.r0, cfg.eps);
    let lo = r0 - e;
    let hi = r0 + e;
    let base = (r0 * r0 + e * e - r * r) / 4.0;
    if r <= lo {
        Ok(base - e * r0 / 2.0)
    } else if r >= hi {
        Ok(base + e * r0 / 2.0 + 0.5 * (r / hi).ln())
    } else {
        Err(ReferenceError::InsideAnnulus { r, lo, hi })
    }
}

/// Mass (disk integral of the MFPT) in the fast-rotation limit.
pub fn fast_regime_mass(cfg: &TrapConfig) -> Result<f64, ReferenceError> {
    let (r0, e) = (cfg.r0, cfg.eps);
    if r0 <= 0.0 {
        return Err(ReferenceError::SingularAtCenter("fast_regime_mass"));
    }
    Ok(PI
        * (r0 * r0 / 2.0 - 3.0 / 8.0 - 0.5 * (r0 + e).ln() + e * r0 * (1.0 - r0 * r0)
            + 0.5 * e * e
            - e * e * e * r0))
}

/// `dM/dr0` of [`fast_regime_mass`].
pub fn fast_regime_mass_gradient(r0: f64, eps: f64) -> f64 {
    PI * (r0 - 0.5 / (r0 + eps) + eps * (1.0 - 3.0 * r0 * r0) - eps * eps * eps)
}

/// Minimiser of [`fast_regime_mass`] over `r0`, for small `eps`.
pub fn fast_regime_optimal_radius(eps: f64) -> f64 {
    // M is convex on this bracket for small eps; the root of M' is the argmin
    bisect(|r| fast_regime_mass_gradient(r, eps), 0.3, 0.99, 1e-14)
        .unwrap_or(std::f64::consts::FRAC_1_SQRT_2)
}

/// Regular part of the static (`omega = 0`) Neumann Green's function of the
/// unit disk, evaluated at its own source a distance `r0` from the centre.
pub fn static_green_regular(r0: f64) -> Result<f64, ReferenceError> {
    if !(0.0..1.0).contains(&r0) {
        return Err(ReferenceError::BoundaryDivergence(r0));
    }
    Ok((-(1.0 - r0 * r0).ln() + r0 * r0 - 0.75) / (2.0 * PI))
}
