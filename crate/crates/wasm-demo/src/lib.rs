//! Browser bindings for three interactive operations: the scattering
//! coefficient along the real mass axis, Newton refinement of a Hankel
//! zero, and an eigenfunction profile. Results are flat `Float64Array`s.
//!
//! Each binding wraps a plain Rust function of the same name with a
//! `String` error, so the logic is testable off the browser.

use volcano_core::resonance::refine_zero;
use volcano_core::scattering::{closed_form_phase_shifts, s_hat_real};
use volcano_core::special::HankelKind;
use volcano_core::spectrum::MassColumn;
use volcano_core::Parity;
use wasm_bindgen::prelude::*;

/// Upper bound on samples per request, to keep the page responsive.
pub const MAX_SAMPLES: u32 = 4000;

fn parity(name: &str) -> Result<Parity, String> {
    name.parse().map_err(|e: volcano_core::Error| e.to_string())
}

fn samples(n: u32) -> Result<usize, String> {
    if (2..=MAX_SAMPLES).contains(&n) {
        Ok(n as usize)
    } else {
        Err(format!("samples must lie in [2, {MAX_SAMPLES}], got {n}"))
    }
}

pub mod api {
    use num_complex::Complex64;

    use super::*;

    /// Rows `(m, delta, Re s, Im s, |s|)` for `n` masses evenly spaced on
    /// `(0, m_max]`.
    pub fn scattering_curve(parity_name: &str, m_max: f64, n: u32) -> Result<Vec<f64>, String> {
        let p = parity(parity_name)?;
        let n = samples(n)?;
        if !(m_max > 1e-2 && m_max <= 200.0) {
            return Err(format!("m_max must lie in (0.01, 200], got {m_max}"));
        }
        let masses: Vec<f64> = (1..=n).map(|i| m_max * i as f64 / n as f64).collect();
        let deltas = closed_form_phase_shifts(p, &masses).map_err(|e| e.to_string())?;
        let mut out = Vec::with_capacity(5 * n);
        for (&m, &d) in masses.iter().zip(&deltas) {
            let s = s_hat_real(p, m).map_err(|e| e.to_string())?;
            out.extend([m, d, s.re, s.im, s.norm()]);
        }
        Ok(out)
    }

    /// `(Re z, Im z, |H|, steps)` for the zero of `H^(1)_nu` on `sheet`
    /// reached from the seed.
    pub fn refine_resonance(nu: u32, sheet: i32, re: f64, im: f64) -> Result<Vec<f64>, String> {
        let z = refine_zero(nu, HankelKind::First, sheet as i64, Complex64::new(re, im))
            .map_err(|e| e.to_string())?;
        Ok(vec![
            z.position.re,
            z.position.im,
            z.residual,
            z.steps as f64,
        ])
    }

    /// Rows `(z, u(z, m))` for `n` points evenly spaced on `[0, z_max]`.
    pub fn eigenfunction(
        parity_name: &str,
        m: f64,
        z_max: f64,
        n: u32,
    ) -> Result<Vec<f64>, String> {
        let p = parity(parity_name)?;
        let n = samples(n)?;
        if !(z_max > 0.0 && z_max <= 500.0) {
            return Err(format!("z_max must lie in (0, 500], got {z_max}"));
        }
        let col = MassColumn::new(m).map_err(|e| e.to_string())?;
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            let z = z_max * i as f64 / (n - 1) as f64;
            out.extend([z, col.eval(p, z).map_err(|e| e.to_string())?]);
        }
        Ok(out)
    }
}

#[wasm_bindgen]
pub fn scattering_curve(parity: &str, m_max: f64, samples: u32) -> Result<Vec<f64>, JsError> {
    api::scattering_curve(parity, m_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn refine_resonance(nu: u32, sheet: i32, re: f64, im: f64) -> Result<Vec<f64>, JsError> {
    api::refine_resonance(nu, sheet, re, im).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn eigenfunction(parity: &str, m: f64, z_max: f64, samples: u32) -> Result<Vec<f64>, JsError> {
    api::eigenfunction(parity, m, z_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn version() -> String {
    env!("CARGO_PKG_VERSION").into()
}
