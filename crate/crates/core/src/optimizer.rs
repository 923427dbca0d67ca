//! Regime dispatch for the mass `M(r0; omega, eps)` and global minimisation
//! over the ring radius.
//!
//! The mass curve can have two competing local minima (one near the wall, one
//! interior), so every search is a dense scan followed by refinement of each
//! bracketed minimum, never a single descent.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

use crate::large_omega::{mass_large_omega, LargeOmegaError};
use crate::numerics::golden_section;
use crate::reference::{fast_regime_mass, ReferenceError, TrapConfig};
use crate::series::{mass_series_quiet as mass_series, SeriesError, SeriesTruncation};
use crate::transition::{
    mass_transition, u0_small_s0, FluxTable, InnerSolverParams, TransitionError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    LargeOmega(#[from] LargeOmegaError),
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error("no regime covers eps = {eps}, omega = {omega}: {reason}")]
    NoValidRegime { eps: f64, omega: f64, reason: String },
    #[error("invalid grid: {0}")]
    BadGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Series,
    LargeOmega,
    Transition,
    Fast,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Series => "series",
            Regime::LargeOmega => "large_omega",
            Regime::Transition => "transition",
            Regime::Fast => "fast",
        })
    }
}

/// Regime boundaries in terms of `eps * omega` and `r0 * omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Series regime for `eps * omega` up to this value.
    pub series_max: f64,
    /// Transition regime for `eps * omega` up to this value; fast beyond.
    pub transition_max: f64,
    /// Large-omega diagnostics when `r0 * omega` is at least this (series window only).
    pub large_omega_min_speed: f64,
    /// Relative discrepancy in overlap windows above which a warning is logged.
    pub overlap_tolerance: f64,
    /// Largest admissible trap radius.
    pub max_eps: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            series_max: 0.02,
            transition_max: 50.0,
            large_omega_min_speed: 20.0,
            overlap_tolerance: 0.05,
            max_eps: 0.2,
        }
    }
}

/// Showing the second regime evaluated in an overlap window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub regime: Regime,
    pub mass: f64,
    pub rel_discrepancy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub mass: f64,
    pub regime: Regime,
    pub overlap: Option<Overlap>,
}

/// Sampled mass curve at fixed `(omega, eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassCurve {
    pub r0_samples: Vec<f64>,
    pub mass_values: Vec<f64>,
    /// Regime of the `(omega, eps)` window.
    pub regime_tag: Regime,
    /// Regime actually used at each sample (differs only where the
    /// transition table does not reach small `r0 * eps * omega`).
    pub point_regimes: Vec<Regime>,
    /// Samples strictly below both neighbours, as `(r0, mass)`.
    pub local_minima: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimumResult {
    pub omega: f64,
    pub eps: f64,
    pub r0_opt: f64,
    pub mass_at_opt: f64,
    pub regime_tag: Regime,
    /// Every refined local minimum `(r0, mass)`, including the optimum,
    /// ascending in `r0`. In the transition window masses are on the
    /// wall-resolving composite scale used for ranking.
    pub competing_minima: Vec<(f64, f64)>,
}

static DEFAULT_TABLE: OnceLock<Arc<FluxTable>> = OnceLock::new();

/// `u0` table on the default grid, built once per process.
pub fn default_flux_table() -> Result<Arc<FluxTable>, TransitionError> {
    if let Some(t) = DEFAULT_TABLE.get() {
        return Ok(t.clone());
    }
    let t = Arc::new(FluxTable::build(&InnerSolverParams::default())?);
    Ok(DEFAULT_TABLE.get_or_init(|| t).clone())
}

/// Number of scan points for global searches.
const SCAN_POINTS: usize = 240;
/// Distance within which a composite minimum is identified with a
/// leading-order transition minimum.
const MATCH_RADIUS: f64 = 0.02;
/// Bracket tolerance for golden-section refinement.
const REFINE_TOL: f64 = 1e-7;

/// Mass evaluator with fixed thresholds, truncation and `u0` table.
#[derive(Debug, Clone)]
pub struct MassModel {
    pub thresholds: Thresholds,
    pub trunc: SeriesTruncation,
    pub table: Arc<FluxTable>,
}

impl MassModel {
    pub fn new(thresholds: Thresholds, trunc: SeriesTruncation, table: Arc<FluxTable>) -> Self {
        MassModel {
            thresholds,
            trunc,
            table,
        }
    }

    /// Default thresholds and truncation with the shared default table.
    pub fn with_defaults() -> Result<Self, OptimizerError> {
        Ok(Self::new(
            Thresholds::default(),
            SeriesTruncation::default(),
            default_flux_table()?,
        ))
    }

    /// Regime window selected by `eps * omega` alone.
    pub fn window(&self, omega: f64, eps: f64) -> Result<Regime, OptimizerError> {
        let t = &self.thresholds;
        if !(eps > 0.0 && eps <= t.max_eps && omega >= 0.0 && omega.is_finite()) {
            return Err(OptimizerError::NoValidRegime {
                eps,
                omega,
                reason: format!("need 0 < eps <= {} and finite omega >= 0", t.max_eps),
            });
        }
        let w0 = eps * omega;
        Ok(if w0 <= t.series_max {
            Regime::Series
        } else if w0 <= t.transition_max {
            Regime::Transition
        } else {
            Regime::Fast
        })
    }

    /// Regime used at a specific configuration. Inside the transition
    /// window, points whose inner Péclet number `r0 eps omega` falls below
    /// the table use the series, which is valid there.
    pub fn regime_for(&self, cfg: &TrapConfig) -> Result<Regime, OptimizerError> {
        let w = self.window(cfg.omega, cfg.eps)?;
        if w == Regime::Transition && (cfg.r0 == 0.0 || cfg.r0 * cfg.omega0() < self.table.range().0) {
            return Ok(Regime::Series);
        }
        Ok(w)
    }

    fn mass_in(&self, cfg: &TrapConfig, regime: Regime) -> Result<f64, OptimizerError> {
        Ok(match regime {
            Regime::Series => mass_series(cfg, &self.trunc)?.value,
            Regime::LargeOmega => mass_large_omega(cfg)?,
            Regime::Transition => mass_transition(cfg.r0, cfg.omega0(), &self.table)?,
            Regime::Fast => fast_regime_mass(cfg)?,
        })
    }

    /// Mass with its regime; in overlap windows the neighbouring regime is
    /// evaluated as well and the discrepancy reported (and logged when large).
    pub fn mass(&self, cfg: &TrapConfig) -> Result<MassEstimate, OptimizerError> {
        let regime = self.regime_for(cfg)?;
        let mass = self.mass_in(cfg, regime)?;
        let t = &self.thresholds;
        let other = match regime {
            Regime::Series if cfg.r0 > 0.0 && cfg.speed() >= t.large_omega_min_speed => {
                Some(Regime::LargeOmega)
            }
            Regime::Transition if cfg.omega0() > 0.5 * t.transition_max => Some(Regime::Fast),
            _ => None,
        };
        let overlap = match other {
            Some(o) => {
                let m = self.mass_in(cfg, o)?;
                let rel = ((m - mass) / mass).abs();
                if rel > t.overlap_tolerance {
                    log::warn!(
                        "{regime} and {o} masses differ by {:.1}% at r0 = {}, omega = {}, eps = {}",
                        100.0 * rel,
                        cfg.r0,
                        cfg.omega,
                        cfg.eps
                    );
                }
                Some(Overlap {
                    regime: o,
                    mass: m,
                    rel_discrepancy: rel,
                })
            }
            None => None,
        };
        Ok(MassEstimate {
            mass,
            regime,
            overlap,
        })
    }

    /// Transition mass corrected by the wall-resolving series:
    /// `M_series + M_transition - M_large_omega`. The last two share the
    /// small-`s0` limit, so below the table the correction is continued
    /// linearly to zero.
    pub fn composite_transition_mass(&self, cfg: &TrapConfig) -> Result<f64, OptimizerError> {
        let s0 = cfg.r0 * cfg.omega0();
        let (lo, _) = self.table.range();
        let delta = if s0 >= lo {
            self.table.u0_at(s0)? - u0_small_s0(s0)
        } else {
            (self.table.u0_at(lo)? - u0_small_s0(lo)) * s0 / lo
        };
        Ok(mass_series(cfg, &self.trunc)?.value + PI * delta)
    }

    fn largest_radius(eps: f64) -> f64 {
        1.0 - (2.0 * eps).max(1e-3)
    }

    /// Mass curve on an explicit grid of radii.
    pub fn mass_curve(&self, r0_grid: &[f64], omega: f64, eps: f64) -> Result<MassCurve, OptimizerError> {
        if r0_grid.windows(2).any(|w| w[1] <= w[0]) || r0_grid.is_empty() {
            return Err(OptimizerError::BadGrid("radii must be strictly increasing".into()));
        }
        let regime_tag = self.window(omega, eps)?;
        let eval = |r0: &f64| -> Result<(f64, Regime), OptimizerError> {
            let cfg = TrapConfig::new(*r0, eps, omega)?;
            let regime = self.regime_for(&cfg)?;
            Ok((self.mass_in(&cfg, regime)?, regime))
        };
        let pts: Vec<(f64, Regime)> = par_map(r0_grid, eval)?;
        let mass_values: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let local_minima = (1..r0_grid.len().saturating_sub(1))
            .filter(|&i| mass_values[i] < mass_values[i - 1] && mass_values[i] < mass_values[i + 1])
            .map(|i| (r0_grid[i], mass_values[i]))
            .collect();
        Ok(MassCurve {
            r0_samples: r0_grid.to_vec(),
            mass_values,
            regime_tag,
            point_regimes: pts.iter().map(|p| p.1).collect(),
            local_minima,
        })
    }

    /// Global minimiser of the mass at fixed `(omega, eps)`.
    pub fn optimal_radius(&self, omega: f64, eps: f64) -> Result<OptimumResult, OptimizerError> {
        let window = self.window(omega, eps)?;
        let hi = Self::largest_radius(eps);
        let minima = match window {
            Regime::Transition => self.transition_minima(omega, eps, hi)?,
            Regime::Fast => {
                let f = |r: f64| fast_regime_mass(&TrapConfig::new(r, eps, omega)?).map_err(Into::into);
                scan_minima(f, 1e-3, hi)?
            }
            _ => {
                let f = |r: f64| -> Result<f64, OptimizerError> {
                    let cfg = TrapConfig::new(r, eps, omega)?;
                    self.mass_in(&cfg, Regime::Series)
                };
                scan_minima(f, 0.0, hi)?
            }
        };
        finish(omega, eps, window, minima)
    }

    fn transition_minima(&self, omega: f64, eps: f64, hi: f64) -> Result<Vec<(f64, f64)>, OptimizerError> {
        let w0 = eps * omega;
        let (s_lo, s_hi) = self.table.range();
        let a = s_lo / w0;
        let b = hi.min(s_hi / w0);
        let composite = |r: f64| self.composite_transition_mass(&TrapConfig::new(r, eps, omega)?);
        if a >= b {
            // the whole interval sits below the table: series throughout
            let f = |r: f64| Ok(mass_series(&TrapConfig::new(r, eps, omega)?, &self.trunc)?.value);
            return scan_minima(f, 0.0, hi);
        }
        // the leading-order mass is eps-independent but blind to the wall
        // branch; the composite sees both. Composite minima that coincide with
        // a leading-order minimum take its location, the rest are wall minima.
        let pure = |r: f64| Ok(mass_transition(r, w0, &self.table)?);
        let interior = scan_minima(pure, a, b)?;
        let mut out = Vec::new();
        for (r, m) in scan_minima(composite, a.max(0.05), hi)? {
            let partner = interior
                .iter()
                .map(|p| p.0)
                .filter(|p| (p - r).abs() < MATCH_RADIUS)
                .min_by(|x, y| (x - r).abs().total_cmp(&(y - r).abs()));
            match partner {
                Some(p) => out.push((p, composite(p)?)),
                None => out.push((r, m)),
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-12);
        Ok(out)
    }

    /// `optimal_radius` over a grid of angular velocities.
    pub fn optimal_radius_curve(&self, omega_grid: &[f64], eps: f64) -> Result<Vec<OptimumResult>, OptimizerError> {
        if omega_grid.windows(2).any(|w| w[1] <= w[0]) || omega_grid.iter().any(|w| *w < 0.0) {
            return Err(OptimizerError::BadGrid("omega grid must be non-negative and increasing".into()));
        }
        par_map(omega_grid, |w| self.optimal_radius(*w, eps))
    }

    /// Optimal radius at fixed linear speed `s = r0 omega`: `omega = s/r0`
    /// is substituted before minimising over `r0`.
    pub fn optimal_radius_at_speed(&self, speed: f64, eps: f64) -> Result<OptimumResult, OptimizerError> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(OptimizerError::BadGrid(format!("speed {speed} must be positive")));
        }
        let hi = Self::largest_radius(eps);
        let f = |r: f64| -> Result<f64, OptimizerError> {
            let cfg = TrapConfig::new(r, eps, speed / r)?;
            let regime = self.regime_for(&cfg)?;
            self.mass_in(&cfg, regime)
        };
        let lo = 1e-3;
        let minima = scan_minima(f, lo, hi)?;
        let tag = self.regime_for(&TrapConfig::new(0.5, eps, 2.0 * speed)?)?;
        let mut res = finish(f64::NAN, eps, tag, minima)?;
        res.omega = speed / res.r0_opt;
        Ok(res)
    }

    pub fn optimal_radius_vs_speed(&self, speed_grid: &[f64], eps: f64) -> Result<Vec<OptimumResult>, OptimizerError> {
        if speed_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(OptimizerError::BadGrid("speed grid must be increasing".into()));
        }
        par_map(speed_grid, |s| self.optimal_radius_at_speed(*s, eps))
    }
}

fn par_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>, OptimizerError>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, OptimizerError> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn finish(omega: f64, eps: f64, regime: Regime, minima: Vec<(f64, f64)>) -> Result<OptimumResult, OptimizerError> {
    let best = minima
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| OptimizerError::BadGrid("mass scan produced no minimum".into()))?;
    Ok(OptimumResult {
        omega,
        eps,
        r0_opt: best.0,
        mass_at_opt: best.1,
        regime_tag: regime,
        competing_minima: minima,
    })
}

/// Dense scan of `f` on `[a, b]`, golden-section refinement of every
/// bracketed minimum, plus endpoints where `f` still descends.
pub fn scan_minima<F>(f: F, a: f64, b: f64) -> Result<Vec<(f64, f64)>, OptimizerError>
where
    F: Fn(f64) -> Result<f64, OptimizerError>,
{
    let n = SCAN_POINTS;
    let r: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let v: Vec<f64> = r.iter().map(|&x| f(x)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    if v[0] < v[1] {
        out.push((r[0], v[0]));
    }
    for i in 1..n {
        if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            let (x, fx) = golden_section(|x| f(x).unwrap_or(f64::INFINITY), r[i - 1], r[i + 1], REFINE_TOL);
            out.push((x, fx));
        }
    }
    if v[n] < v[n - 1] {
        out.push((r[n], v[n]));
    }
    Ok(out)
}

/// `r0_opt` jumps larger than `min_jump` between consecutive results, as
/// `(x_before, x_after)` pairs of the sweep variable.
pub fn branch_exchanges(xs: &[f64], results: &[OptimumResult], min_jump: f64) -> Vec<(f64, f64)> {
    xs.windows(2)
        .zip(results.windows(2))
        .filter(|(_, r)| (r[1].r0_opt - r[0].r0_opt).abs() > min_jump)
        .map(|(x, _)| (x[0], x[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> MassModel {
        MassModel::with_defaults().unwrap()
    }

    #[test]
    fn dispatch_windows() {
        let m = model();
        assert_eq!(m.window(2.0, 1e-3).unwrap(), Regime::Series);
        assert_eq!(m.window(4000.0, 1e-3).unwrap(), Regime::Transition);
        assert_eq!(m.window(1e6, 1e-3).unwrap(), Regime::Fast);
        assert!(m.window(1.0, 0.3).is_err());
        let slow = TrapConfig::new(0.01, 1e-3, 100.0).unwrap();
        assert_eq!(m.regime_for(&slow).unwrap(), Regime::Series);
    }

    #[test]
    fn series_overlap_reported() {
        let m = model();
        let e = m.mass(&TrapConfig::new(0.6, 1e-4, 150.0).unwrap()).unwrap();
        assert_eq!(e.regime, Regime::Series);
        let o = e.overlap.unwrap();
        assert_eq!(o.regime, Regime::LargeOmega);
        assert!(o.rel_discrepancy < 0.05);
    }

    #[test]
    fn transition_mass_depends_on_product_only() {
        let m = model();
        let a = m.mass(&TrapConfig::new(0.7, 1e-3, 4000.0).unwrap()).unwrap();
        let b = m.mass(&TrapConfig::new(0.7, 5e-3, 800.0).unwrap()).unwrap();
        assert_eq!(a.regime, Regime::Transition);
        assert!((a.mass - b.mass).abs() < 1e-10);
    }

    #[test]
    fn scan_finds_both_minima() {
        let f = |x: f64| Ok((x - 0.2).powi(2) * (x - 0.8).powi(2) + 0.001 * x);
        let m = scan_minima(f, 0.0, 1.0).unwrap();
        assert_eq!(m.len(), 2, "{m:?}");
        assert!((m[0].0 - 0.2).abs() < 0.01 && (m[1].0 - 0.8).abs() < 0.01);
    }

    #[test]
    fn static_and_slow_rotation_prefer_centre() {
        let m = model();
        for w in [0.0, 2.0] {
            let o = m.optimal_radius(w, 1e-3).unwrap();
            assert_eq!(o.r0_opt, 0.0, "omega = {w}");
        }
        assert!(m.optimal_radius(3.5, 1e-3).unwrap().r0_opt > 0.0);
    }

    #[test]
    fn fast_regime_optimum() {
        let o = model().optimal_radius(1e9, 1e-3).unwrap();
        assert_eq!(o.regime_tag, Regime::Fast);
        assert!((o.r0_opt - (std::f64::consts::FRAC_1_SQRT_2 - 2.5e-4)).abs() < 5e-6);
    }

    #[test]
    fn exchange_detection() {
        let mk = |r| OptimumResult {
            omega: 0.0,
            eps: 0.0,
            r0_opt: r,
            mass_at_opt: 0.0,
            regime_tag: Regime::Series,
            competing_minima: vec![],
        };
        let res = vec![mk(0.8), mk(0.82), mk(0.7)];
        assert_eq!(branch_exchanges(&[1.0, 2.0, 3.0], &res, 0.05), vec![(2.0, 3.0)]);
    }
}
