//! Lattice random walks for the MFPT problems, independent of every analytic
//! solution in the crate.
//!
//! Each agent draws from its own ChaCha8 stream, selected by
//! `(seed, stream id)`, so the estimate does not depend on how agents are
//! scheduled across threads. First passage times are accumulated as integer
//! step counts, which keeps the reduction exact in any order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};
use thiserror::Error;

use crate::reference::TrapConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid walk parameters: {0}")]
    InvalidParams(String),
    #[error("start point ({x}, {y}) lies outside the unit disk")]
    StartOutsideDisk { x: f64, y: f64 },
    #[error("start {0} lies outside the domain")]
    StartOutsideDomain(f64),
    #[error("trap position {0} must lie strictly inside (0, 1)")]
    InvalidTrap(f64),
}

/// Lattice spacing, time step, and sampling budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub space_step: f64,
    pub time_step: f64,
    pub n_agents: usize,
    pub seed: u64,
    /// Walkers still free after this many steps are censored.
    pub max_steps: u64,
}

impl WalkParams {
    /// Parameters with the time step chosen so the 1D diffusivity equals `d`.
    pub fn for_diffusivity_1d(space_step: f64, d: f64, n_agents: usize, seed: u64) -> Self {
        WalkParams {
            space_step,
            time_step: space_step * space_step / (2.0 * d),
            n_agents,
            seed,
            max_steps: 100_000_000,
        }
    }

    /// Parameters with the time step chosen so the 2D diffusivity equals `d`.
    pub fn for_diffusivity_2d(space_step: f64, d: f64, n_agents: usize, seed: u64) -> Self {
        WalkParams {
            time_step: space_step * space_step / (4.0 * d),
            ..Self::for_diffusivity_1d(space_step, d, n_agents, seed)
        }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        let bad = |m: String| Err(WalkError::InvalidParams(m));
        if !(self.space_step.is_finite() && self.space_step > 0.0) {
            return bad(format!("space step {} must be positive", self.space_step));
        }
        if !(self.time_step.is_finite() && self.time_step > 0.0) {
            return bad(format!("time step {} must be positive", self.time_step));
        }
        if self.n_agents == 0 {
            return bad("need at least one agent".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }

    /// `dx^2 / (2 dt)`.
    pub fn diffusivity_1d(&self) -> f64 {
        self.space_step * self.space_step / (2.0 * self.time_step)
    }

    /// `dl^2 / (4 dt)`.
    pub fn diffusivity_2d(&self) -> f64 {
        self.space_step * self.space_step / (4.0 * self.time_step)
    }
}

/// Sample mean of the first passage time over captured walkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub mean_fpt: f64,
    pub std_error: f64,
    pub n_captured: usize,
    pub n_censored: usize,
}

impl WalkStats {
    fn from_steps(steps: &[Option<u64>], dt: f64) -> Self {
        let mut n = 0u64;
        let mut sum = 0u128;
        let mut sum_sq = 0u128;
        for s in steps.iter().flatten() {
            n += 1;
            sum += *s as u128;
            sum_sq += (*s as u128) * (*s as u128);
        }
        let n_censored = steps.len() - n as usize;
        if n_censored > 0 {
            log::warn!("{n_censored} of {} walkers censored at max_steps", steps.len());
        }
        if n == 0 {
            return WalkStats {
                mean_fpt: f64::NAN,
                std_error: f64::NAN,
                n_captured: 0,
                n_censored,
            };
        }
        let nf = n as f64;
        let mean = sum as f64 / nf;
        let std_error = if n > 1 {
            // exact integer sums, so the only rounding is in this line
            let var = (sum_sq as f64 - nf * mean * mean) / (nf - 1.0);
            (var.max(0.0) / nf).sqrt()
        } else {
            0.0
        };
        WalkStats {
            mean_fpt: mean * dt,
            std_error: std_error * dt,
            n_captured: n as usize,
            n_censored,
        }
    }

    /// `|mean - expected|` in units of the standard error.
    pub fn z_score(&self, expected: f64) -> f64 {
        if self.std_error == 0.0 {
            return if self.mean_fpt == expected { 0.0 } else { f64::INFINITY };
        }
        (self.mean_fpt - expected).abs() / self.std_error
    }
}

/// Hands out random bits from 64-bit draws; `take` returns the low `n` bits.
struct Bits {
    rng: ChaCha8Rng,
    word: u64,
    left: u32,
}

impl Bits {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Bits { rng, word: 0, left: 0 }
    }

    #[inline]
    fn take(&mut self, n: u32) -> u64 {
        if self.left < n {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let v = self.word & ((1u64 << n) - 1);
        self.word >>= n;
        self.left -= n;
        v
    }
}

fn run_agents<F>(params: &WalkParams, stream_base: u64, walk: F) -> WalkStats
where
    F: Fn(&mut Bits) -> Option<u64> + Sync,
{
    let one = |a: usize| walk(&mut Bits::new(params.seed, stream_base | a as u64));
    #[cfg(feature = "parallel")]
    let steps: Vec<Option<u64>> = {
        use rayon::prelude::*;
        (0..params.n_agents).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let steps: Vec<Option<u64>> = (0..params.n_agents).map(one).collect();
    WalkStats::from_steps(&steps, params.time_step)
}

/// Walk on `[0, 1]` with mirror-reflecting ends; the trap absorbs a walker
/// landing within half a lattice step of `trap_pos`.
pub fn mfpt_interval(x_start: f64, trap_pos: f64, params: &WalkParams) -> Result<WalkStats, WalkError> {
    params.validate()?;
    if !(0.0..=1.0).contains(&x_start) {
        return Err(WalkError::StartOutsideDomain(x_start));
    }
    if !(trap_pos > 0.0 && trap_pos < 1.0) {
        return Err(WalkError::InvalidTrap(trap_pos));
    }
    let dx = params.space_step;
    let half = dx / 2.0;
    Ok(run_agents(params, 0, |bits| {
        let mut x = x_start;
        if (x - trap_pos).abs() <= half {
            return Some(0);
        }
        for n in 1..=params.max_steps {
            x += if bits.take(1) == 1 { dx } else { -dx };
            if x < 0.0 {
                x = -x;
            } else if x > 1.0 {
                x = 2.0 - x;
            }
            if (x - trap_pos).abs() <= half {
                return Some(n);
            }
        }
        None
    }))
}

/// Walk on the circle with a trap starting at `theta = 0` and moving with
/// angular velocity `-omega`. Each step the trap advances first, then the
/// walker jumps `±dtheta`, then capture within half a step is tested.
pub fn mfpt_circle(theta_start: f64, omega: f64, params: &WalkParams) -> Result<WalkStats, WalkError> {
    params.validate()?;
    if !theta_start.is_finite() {
        return Err(WalkError::StartOutsideDomain(theta_start));
    }
    if !omega.is_finite() {
        return Err(WalkError::InvalidParams(format!("omega = {omega}")));
    }
    let dth = params.space_step;
    let half = dth / 2.0;
    let shift = omega * params.time_step;
    let gap = |psi: f64| {
        let p = psi.rem_euclid(2.0 * PI);
        p.min(2.0 * PI - p)
    };
    Ok(run_agents(params, 0, |bits| {
        // angle relative to the trap; the trap moving by -omega dt shifts it by +omega dt
        let mut psi = theta_start.rem_euclid(2.0 * PI);
        if gap(psi) <= half {
            return Some(0);
        }
        for n in 1..=params.max_steps {
            psi += shift + if bits.take(1) == 1 { dth } else { -dth };
            if psi >= 2.0 * PI {
                psi -= 2.0 * PI;
            } else if psi < 0.0 {
                psi += 2.0 * PI;
            }
            if psi <= half || 2.0 * PI - psi <= half {
                return Some(n);
            }
        }
        None
    }))
}

/// Trap centre `(r0 cos(omega t), -r0 sin(omega t))`.
pub fn trap_centre(cfg: &TrapConfig, t: f64) -> [f64; 2] {
    let a = cfg.omega * t;
    [cfg.r0 * a.cos(), -cfg.r0 * a.sin()]
}

fn disk_walk(start: [f64; 2], cfg: &TrapConfig, params: &WalkParams, stream_base: u64) -> WalkStats {
    let dl = params.space_step;
    let eps2 = cfg.eps * cfg.eps;
    let (rot_c, rot_s) = ((cfg.omega * params.time_step).cos(), (cfg.omega * params.time_step).sin());
    run_agents(params, stream_base, |bits| {
        let (mut x, mut y) = (start[0], start[1]);
        // unit vector of the trap phase, advanced by an exact rotation each step
        let (mut c, mut s) = (1.0f64, 0.0f64);
        let hit = |x: f64, y: f64, c: f64, s: f64| {
            let (dx, dy) = (x - cfg.r0 * c, y + cfg.r0 * s);
            dx * dx + dy * dy <= eps2
        };
        if hit(x, y, c, s) {
            return Some(0);
        }
        for n in 1..=params.max_steps {
            let (nc, ns) = (c * rot_c - s * rot_s, s * rot_c + c * rot_s);
            c = nc;
            s = ns;
            if n % 4096 == 0 {
                // the product of rotations drifts off the unit circle very slowly
                let t = n as f64 * params.time_step;
                c = (cfg.omega * t).cos();
                s = (cfg.omega * t).sin();
            }
            match bits.take(2) {
                0 => x += dl,
                1 => x -= dl,
                2 => y += dl,
                _ => y -= dl,
            }
            let rho2 = x * x + y * y;
            if rho2 > 1.0 {
                let rho = rho2.sqrt();
                let f = (2.0 - rho) / rho;
                x *= f;
                y *= f;
            }
            if hit(x, y, c, s) {
                return Some(n);
            }
        }
        None
    })
}

/// Walk on a square lattice of spacing `dl` anchored at `start`, inside the
/// reflecting unit disk. A step ending at radius `rho > 1` is mirrored to
/// `2 - rho` on the same ray.
pub fn mfpt_disk(start: [f64; 2], cfg: &TrapConfig, params: &WalkParams) -> Result<WalkStats, WalkError> {
    params.validate()?;
    check_start(start)?;
    Ok(disk_walk(start, cfg, params, 0))
}

fn check_start(p: [f64; 2]) -> Result<(), WalkError> {
    if !(p[0].is_finite() && p[1].is_finite() && p[0] * p[0] + p[1] * p[1] <= 1.0) {
        return Err(WalkError::StartOutsideDisk { x: p[0], y: p[1] });
    }
    Ok(())
}

/// One row of a disk field scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub stats: WalkStats,
}

/// Estimates at each point. Point `i` uses streams `(i << 32) | agent`, so
/// samples at different points are independent.
pub fn disk_field_scan(
    points: &[[f64; 2]],
    cfg: &TrapConfig,
    params: &WalkParams,
) -> Result<Vec<FieldSample>, WalkError> {
    params.validate()?;
    if params.n_agents > u32::MAX as usize || points.len() > u32::MAX as usize {
        return Err(WalkError::InvalidParams("too many agents or points for stream ids".into()));
    }
    points.iter().try_for_each(|&p| check_start(p))?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, &p)| FieldSample {
            x: p[0],
            y: p[1],
            stats: disk_walk(p, cfg, params, (i as u64) << 32),
        })
        .collect())
}

/// Cartesian grid of `n x n` cell centres on `[-1, 1]^2`, keeping those
/// inside the disk.
pub fn square_grid_in_disk(n: usize) -> Vec<[f64; 2]> {
    let h = 2.0 / n as f64;
    let mut pts = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let p = [-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h];
            if p[0] * p[0] + p[1] * p[1] <= 1.0 {
                pts.push(p);
            }
        }
    }
    pts
}

/// Polar midpoint grid with area weights `r dr dtheta`; the weights sum to `pi`.
pub fn polar_grid(n_r: usize, n_theta: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    let (dr, dth) = (1.0 / n_r as f64, 2.0 * PI / n_theta as f64);
    let mut pts = Vec::with_capacity(n_r * n_theta);
    let mut w = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = (i as f64 + 0.5) * dr;
        for j in 0..n_theta {
            let th = (j as f64 + 0.5) * dth;
            pts.push([r * th.cos(), r * th.sin()]);
            w.push(r * dr * dth);
        }
    }
    (pts, w)
}

/// Weighted average of the scan and its standard error.
pub fn area_average(samples: &[FieldSample], weights: &[f64]) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let mean = samples
        .iter()
        .zip(weights)
        .map(|(s, w)| w * s.stats.mean_fpt)
        .sum::<f64>()
        / total;
    let var = samples
        .iter()
        .zip(weights)
        .map(|(s, w)| (w * s.stats.std_error).powi(2))
        .sum::<f64>()
        / (total * total);
    (mean, var.sqrt())
}

/// CSV with a `#` comment header, one row per sample.
pub fn write_field_csv<W: Write>(out: &mut W, samples: &[FieldSample]) -> io::Result<()> {
    writeln!(out, "# x,y,mean_fpt,std_error,n_captured")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.x, s.y, s.stats.mean_fpt, s.stats.std_error, s.stats.n_captured
        )?;
    }
    Ok(())
}
