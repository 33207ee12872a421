//! Resolvent kernel against the shifted operator and a direct solve for
//! `m = 1 + 0.5i` and `m = 0.5 + i`, both parities.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use volcano_core::resolvent::{
    apply_kernel, apply_shifted_operator, kernel_parity, resolvent_direct_solve, ComplexProfile,
    ResolventQuery,
};
use volcano_core::spectrum::{uniform_grid, ROBIN};
use volcano_core::transform::HalfLineFunction;
use volcano_core::Parity;

use super::{half_profile, profile_reach};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

const MASSES: [Complex64; 2] = [Complex64::new(1.0, 0.5), Complex64::new(0.5, 1.0)];

/// Kernel slices are written on `[0, SLICE_MAX]^2` with this spacing.
const SLICE_STEP: f64 = 0.25;
const SLICE_MAX: f64 = 5.0;

#[derive(Serialize)]
struct SliceRow {
    z: f64,
    z_prime: f64,
    re_k: f64,
    im_k: f64,
}

fn kernel(m: Complex64, parity: Parity, z: f64, z_prime: f64) -> Result<Complex64, CliError> {
    Ok(kernel_parity(&ResolventQuery {
        m,
        parity,
        z,
        z_prime,
    })?)
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    let reach = profile_reach(&config.profile);
    if reach > g.z_max {
        return Err(CliError::config(
            Some("grid.z_max"),
            format!("the profile reaches z = {reach}; z_max must cover it"),
        ));
    }
    let grid = uniform_grid(g.z_max, g.dz)?;
    let f = HalfLineFunction::from_fn(&grid, &*half_profile(&config.profile)?)?;
    if f.l2_norm() == 0.0 {
        return Err(CliError::config(
            Some("profile.center"),
            "profile vanishes on the grid",
        ));
    }
    let target = ComplexProfile {
        z_grid: f.z_grid.clone(),
        values: f.values.iter().map(|&v| Complex64::from(v)).collect(),
    };
    let mut out = Outcome::default();
    let (mut green, mut direct) = (0.0f64, 0.0f64);
    let mut per_case = vec![];
    for m in MASSES {
        for parity in Parity::BOTH {
            let u = apply_kernel(parity, m, &f)?;
            let hu = apply_shifted_operator(parity, m, &u)?;
            let gr = hu.relative_l2(&target)?;
            let d = u.relative_l2(&resolvent_direct_solve(parity, m, &f)?)?;
            green = green.max(gr);
            direct = direct.max(d);
            per_case.push(serde_json::json!({
                "m": [m.re, m.im],
                "parity": parity,
                "green": gr,
                "direct": d,
            }));
        }
    }
    out.metric("cases", &per_case);

    let m = Complex64::new(1.0, 1.0);
    let mut odd_at_zero = 0.0f64;
    for zp in [0.0, 0.5, 2.0, 7.0, 15.0] {
        odd_at_zero = odd_at_zero.max(kernel(m, Parity::Odd, 0.0, zp)?.norm());
    }
    let h = 1e-3;
    let v: Vec<Complex64> = (0..5)
        .map(|i| kernel(m, Parity::Even, i as f64 * h, 2.0))
        .collect::<Result<_, _>>()?;
    let d = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
    let robin = (d + ROBIN * v[0]).norm();

    let n = (SLICE_MAX / SLICE_STEP).round() as usize;
    for parity in Parity::BOTH {
        let mut rows = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                let (z, zp) = (i as f64 * SLICE_STEP, j as f64 * SLICE_STEP);
                let k = kernel(MASSES[0], parity, z, zp)?;
                rows.push(SliceRow {
                    z,
                    z_prime: zp,
                    re_k: k.re,
                    im_k: k.im,
                });
            }
        }
        out.csv(dir, &format!("kernel_{}.csv", parity.name()), &rows)?;
    }
    out.metric("slice_mass", [MASSES[0].re, MASSES[0].im]);
    out.check(Check::below("green_property_l2", green, 1e-3));
    out.check(Check::below("kernel_vs_direct_l2", direct, 1e-3));
    out.check(Check::zero("odd_kernel_at_brane", odd_at_zero));
    out.check(Check::below("even_kernel_robin_residual", robin, 1e-5));
    Ok(out)
}
