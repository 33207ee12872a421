//! Scattering amplitudes, unitarity, phase shifts and the blow-up at the
//! first resonances.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use volcano_core::resonance::refine_zero;
use volcano_core::scattering::{
    amplitude, asymptotic_window, closed_form_phase_shifts, convention, phase_shift_numeric, s_hat,
    s_hat_real, unitarity_scan,
};
use volcano_core::special::{HankelKind, RiemannPoint};
use volcano_core::Parity;

use super::rng;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

const GRID_MASSES: usize = 500;
const RANDOM_MASSES: usize = 100;
const OMEGA4: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const FIT_MASSES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
/// Distance from the first zeros at which `|s|` is probed.
const PROBE: f64 = 5e-4;

#[derive(Serialize)]
struct AmplitudeRow {
    sigma: f64,
    omega4: f64,
    parity: Parity,
    re_s: f64,
    im_s: f64,
    abs_s: f64,
}

#[derive(Serialize)]
struct PhaseRow {
    m: f64,
    parity: Parity,
    delta: f64,
    re_s: f64,
    im_s: f64,
}

fn nu(p: Parity) -> u32 {
    match p {
        Parity::Even => 1,
        Parity::Odd => 2,
    }
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    if g.m_max < 5.0 {
        return Err(CliError::config(
            Some("grid.m_max"),
            "phase shifts are checked up to m = 5",
        ));
    }
    let mut out = Outcome::default();

    let n = g.m_panels;
    let mut rows = vec![];
    for parity in Parity::BOTH {
        for k in (1..=n)
            .rev()
            .map(|k| -(k as f64))
            .chain((1..=n).map(|k| k as f64))
        {
            let sigma = k * g.m_max / n as f64;
            for w in OMEGA4 {
                let a = amplitude(sigma, w, parity)?;
                rows.push(AmplitudeRow {
                    sigma,
                    omega4: w,
                    parity,
                    re_s: a.value.re,
                    im_s: a.value.im,
                    abs_s: a.value.norm(),
                });
            }
        }
    }
    out.csv(dir, "amplitudes.csv", &rows)?;
    let amplitude_defect = rows
        .iter()
        .map(|r| (r.abs_s - 1.0).abs())
        .fold(0.0, f64::max);

    let grid: Vec<f64> = (0..GRID_MASSES)
        .map(|i| 1e-3 + (g.m_max - 1e-3) * i as f64 / (GRID_MASSES - 1) as f64)
        .collect();
    let mut r = rng(config);
    let random: Vec<f64> = (0..RANDOM_MASSES)
        .map(|_| r.random_range(1e-3..g.m_max))
        .collect();
    let unitarity = unitarity_scan(&grid)?.max(unitarity_scan(&random)?);
    let mut phase_rows = vec![];
    for parity in Parity::BOTH {
        let deltas = closed_form_phase_shifts(parity, &grid)?;
        for (&m, &delta) in grid.iter().zip(&deltas) {
            let s = s_hat_real(parity, m)?;
            phase_rows.push(PhaseRow {
                m,
                parity,
                delta,
                re_s: s.re,
                im_s: s.im,
            });
        }
    }
    out.csv(dir, "phase_shifts.csv", &phase_rows)?;

    let low = (s_hat_real(Parity::Even, 1e-4)? - Complex64::i())
        .norm()
        .max((s_hat_real(Parity::Odd, 1e-4)? + Complex64::i()).norm());

    let mut phase = 0.0f64;
    let mut fits = vec![];
    for parity in Parity::BOTH {
        let closed = closed_form_phase_shifts(parity, &FIT_MASSES)?;
        for (&m, &delta) in FIT_MASSES.iter().zip(&closed) {
            let fit = phase_shift_numeric(parity, m, asymptotic_window(m, 2.5e-4, 4.0)?)?;
            let d = (fit.delta - delta).rem_euclid(PI);
            let mod_pi = d.min(PI - d);
            let pinned = Complex64::from_polar(convention(parity), 2.0 * fit.delta);
            let constant = (s_hat_real(parity, m)? - pinned).norm() / 2.0;
            phase = phase.max(mod_pi).max(constant);
            fits.push(serde_json::json!({
                "parity": parity,
                "m": m,
                "numeric": fit.delta,
                "closed_form": delta,
                "fit_residual": fit.residual,
            }));
        }
    }

    let mut blow_up = f64::INFINITY;
    for (parity, seed) in [
        (Parity::Even, Complex64::new(-0.419, -0.577)),
        (Parity::Odd, Complex64::new(0.429, -1.281)),
    ] {
        let zero = refine_zero(nu(parity), HankelKind::First, 0, seed)?.position;
        for k in 0..8 {
            let near = zero + Complex64::from_polar(PROBE, k as f64 * PI / 4.0);
            blow_up = blow_up.min(s_hat(parity, &RiemannPoint::from_complex(near)?)?.norm());
        }
    }

    out.metric("phase_fits", &fits);
    out.metric(
        "convention",
        [convention(Parity::Even), convention(Parity::Odd)],
    );
    out.metric("masses_checked", GRID_MASSES + RANDOM_MASSES);
    out.check(Check::below(
        "amplitude_unimodularity",
        amplitude_defect,
        1e-10,
    ));
    out.check(Check::below("unitarity", unitarity, 1e-10));
    out.check(Check::below("low_energy_limit", low, 1e-3));
    out.check(Check::below("phase_shift_mod_pi", phase, 1e-3));
    out.check(Check::at_least("blow_up_near_first_zeros", blow_up, 1e3));
    Ok(out)
}
