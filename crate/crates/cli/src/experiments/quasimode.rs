//! Quasimodes at the first zeros of `H^(1)_1` and `H^(1)_2`: equation and
//! brane-condition residuals, their grid scaling, and an off-zero control.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use volcano_core::brane::{
    quasimode_boundary_residual, quasimode_profile, quasimode_residual, Quasimode,
};
use volcano_core::resonance::refine_zero;
use volcano_core::special::{HankelKind, RiemannPoint};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

const XI: [f64; 2] = [0.0, 2.0];
const CONTROL: Complex64 = Complex64::new(1.0, -0.5);
/// Step of the one-sided brane stencils.
const STENCIL: f64 = 1e-3;

#[derive(Serialize)]
struct ProfileRow {
    z: f64,
    re_u1: f64,
    im_u1: f64,
    re_u2: f64,
    im_u2: f64,
}

fn grid(half: f64, dz: f64) -> Vec<f64> {
    let n = (half / dz).round() as i64;
    (-n..=n).map(|i| i as f64 * dz).collect()
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    let mut out = Outcome::default();
    let mut modes = vec![];
    for (nu, seed) in [
        (1, Complex64::new(-0.419, -0.577)),
        (2, Complex64::new(0.429, -1.281)),
    ] {
        let zero = refine_zero(nu, HankelKind::First, 0, seed)?;
        modes.push(Quasimode::new(nu, HankelKind::First, zero.point()?, 1.0)?);
    }

    let (mut fine_worst, mut boundary) = (0.0f64, 0.0f64);
    let mut ratios = vec![];
    for q in &modes {
        for xi in XI {
            let coarse = quasimode_residual(q, xi, &grid(g.z_max, 2.0 * g.dz))?;
            let fine = quasimode_residual(q, xi, &grid(g.z_max, g.dz))?;
            fine_worst = fine_worst.max(fine);
            ratios.push(coarse / fine);
        }
        boundary = boundary.max(quasimode_boundary_residual(q, STENCIL)?);
    }
    let off = RiemannPoint::from_complex(CONTROL)?;
    let mut control = f64::INFINITY;
    for nu in [1, 2] {
        let q = Quasimode::new(nu, HankelKind::First, off, 1.0)?;
        control = control.min(quasimode_boundary_residual(&q, STENCIL)?);
    }

    let rows: Vec<ProfileRow> = grid(g.z_max, g.dz)
        .into_iter()
        .map(|z| {
            let a = quasimode_profile(&modes[0], z)?;
            let b = quasimode_profile(&modes[1], z)?;
            Ok(ProfileRow {
                z,
                re_u1: a.re,
                im_u1: a.im,
                re_u2: b.re,
                im_u2: b.im,
            })
        })
        .collect::<Result<_, CliError>>()?;
    out.csv(dir, "quasimode_profiles.csv", &rows)?;

    let zetas: Vec<[f64; 2]> = modes
        .iter()
        .map(|q| {
            let v = q.zeta.principal_value();
            [v.re, v.im]
        })
        .collect();
    out.metric("zeta", &zetas);
    out.metric("xi", XI);
    out.metric("halving_ratios", &ratios);
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    out.check(Check::below("residual_over_max_u", fine_worst, 1e-4));
    out.check(Check::within("min_halving_ratio", lo, 3.5, 4.5));
    out.check(Check::within("max_halving_ratio", hi, 3.5, 4.5));
    out.check(Check::below("brane_condition_at_zeros", boundary, 1e-6));
    out.check(Check::at_least("control_brane_defect", control, 1e-2));
    Ok(out)
}
