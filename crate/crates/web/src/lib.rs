//! wasm-bindgen wrappers used by `www/index.html`.

use std::cell::OnceCell;

use rotating_trap::bifurcation::critical_omega as find_critical;
use rotating_trap::optimizer::{MassModel, OptimumResult};
use wasm_bindgen::prelude::*;

thread_local! {
    // building the u0 table is the slow part; do it once per page
    static MODEL: OnceCell<MassModel> = const { OnceCell::new() };
}

fn with_model<T>(f: impl FnOnce(&MassModel) -> Result<T, String>) -> Result<T, JsError> {
    MODEL.with(|cell| {
        if cell.get().is_none() {
            let m = MassModel::with_defaults().map_err(|e| JsError::new(&e.to_string()))?;
            let _ = cell.set(m);
        }
        f(cell.get().unwrap()).map_err(|e| JsError::new(&e))
    })
}

/// Mass against ring radius, flattened as `[r0_0, m_0, r0_1, m_1, ...]`.
#[wasm_bindgen(js_name = massCurve)]
pub fn mass_curve(omega: f64, eps: f64, points: usize) -> Result<Vec<f64>, JsError> {
    if points < 2 {
        return Err(JsError::new("need at least two points"));
    }
    with_model(|m| {
        let fast = m.window(omega, eps).map_err(|e| e.to_string())? == rotating_trap::optimizer::Regime::Fast;
        let lo = if fast { 1e-3 } else { 0.0 };
        let hi = 1.0 - (2.0 * eps).max(1e-3);
        let grid: Vec<f64> = (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect();
        let c = m.mass_curve(&grid, omega, eps).map_err(|e| e.to_string())?;
        Ok(c.r0_samples.iter().zip(&c.mass_values).flat_map(|(r, v)| [*r, *v]).collect())
    })
}

#[wasm_bindgen]
pub struct Optimum {
    inner: OptimumResult,
}

#[wasm_bindgen]
impl Optimum {
    #[wasm_bindgen(getter)]
    pub fn r0(&self) -> f64 {
        self.inner.r0_opt
    }

    #[wasm_bindgen(getter)]
    pub fn mass(&self) -> f64 {
        self.inner.mass_at_opt
    }

    #[wasm_bindgen(getter)]
    pub fn regime(&self) -> String {
        self.inner.regime_tag.to_string()
    }

    /// Other local minima, flattened like [`mass_curve`].
    #[wasm_bindgen(getter)]
    pub fn minima(&self) -> Vec<f64> {
        self.inner.competing_minima.iter().flat_map(|(r, m)| [*r, *m]).collect()
    }
}

#[wasm_bindgen]
pub fn optimum(omega: f64, eps: f64) -> Result<Optimum, JsError> {
    with_model(|m| m.optimal_radius(omega, eps).map_err(|e| e.to_string())).map(|inner| Optimum { inner })
}

/// Angular velocity at which the centre stops being the optimal radius.
#[wasm_bindgen(js_name = criticalOmega)]
pub fn critical_omega() -> Result<f64, JsError> {
    find_critical((2.0, 4.0), 1e-8)
        .map(|c| c.omega_c)
        .map_err(|e| JsError::new(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_agree_with_core() {
        let w = critical_omega().unwrap();
        assert!((w - 3.026037).abs() < 1e-5);
        let c = mass_curve(2.0, 1e-3, 5).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c[0], 0.0);
        let o = optimum(10.0, 1e-3).unwrap();
        assert!(o.r0() > 0.3 && o.r0() < 0.9);
        assert_eq!(o.regime(), "series");
        assert!(o.minima().len() >= 2);
    }
}
