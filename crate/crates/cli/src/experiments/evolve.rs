//! Spectral propagation against the leapfrog scheme, with energy series.

use std::path::Path;

use serde::Serialize;
use volcano_core::evolution::{
    decompose, energy, fdtd_propagate, fdtd_snapshots, spectral_propagate, GridField, TimeSample,
};
use volcano_core::quadrature::{trapezoid, QuadRule};
use volcano_core::spectrum::uniform_grid;
use volcano_core::transform::TransformPlan;

use super::{full_profile, min_order, profile_reach, Profile, ORDER_TWO};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

/// Transverse wave number `|xi|` of the evolved mode.
const XI: f64 = 1.0;

/// `dt / dz` of the leapfrog runs.
const CFL: f64 = 0.5;

#[derive(Serialize)]
struct FinalRow {
    z: f64,
    u_fdtd: f64,
    u_spectral: f64,
}

fn field(half: f64, dz: f64, u: &Profile) -> Result<GridField, CliError> {
    Ok(GridField::from_fns(
        GridField::symmetric_grid(half, dz)?,
        |z| u(z),
        |_| 0.0,
    )?)
}

/// Value of `f` at `z = i h` for a grid whose spacing divides `h`.
fn at(f: &GridField, h: f64, i: i64) -> f64 {
    let step = (h / f.dz()).round() as i64;
    let mid = (f.z_grid.len() / 2) as i64;
    f.u[(mid + i * step) as usize]
}

/// Relative L2 distance of `a` from `b` on `|z| <= radius`.
fn l2_gap(a: &GridField, b: &GridField, radius: f64) -> f64 {
    let h = a.dz().max(b.dz());
    let n = (radius / h).round() as i64;
    let diff: Vec<f64> = (-n..=n)
        .map(|i| (at(a, h, i) - at(b, h, i)).powi(2))
        .collect();
    let norm: Vec<f64> = (-n..=n).map(|i| at(b, h, i).powi(2)).collect();
    (trapezoid(&diff, h) / trapezoid(&norm, h)).sqrt()
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
    let u = full_profile(&config.profile)?;
    let rule = QuadRule::mass_rule(g.m_max, g.m_panels)?;
    let plan = TransformPlan::new(&uniform_grid(g.z_max, g.dz)?, &rule)?;
    let state = decompose(&field(g.z_max, g.dz, &u)?, XI, &plan)?;
    let reference = spectral_propagate(&state, g.t_max, &plan)?;

    // The leapfrog box is wide enough that nothing reaches its ends.
    let half = reach + g.t_max + 1.0;
    let steps = (g.t_max / g.dt_report + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * g.dt_report).collect();
    if *times.last().expect("t = 0 is present") < g.t_max {
        times.push(g.t_max);
    }
    let snaps = fdtd_snapshots(&field(half, g.dz, &u)?, XI, &times, CFL)?;
    let fine = snaps.last().expect("at least one snapshot");
    let coarse = fdtd_propagate(&field(half, 2.0 * g.dz, &u)?, XI, g.t_max, CFL)?;
    let gaps = [
        l2_gap(&coarse, &reference, g.z_max),
        l2_gap(fine, &reference, g.z_max),
    ];

    let mut out = Outcome::default();
    let series: Vec<TimeSample> = snaps
        .iter()
        .map(|f| TimeSample::of(f, XI, g.z_max))
        .collect();
    out.csv(dir, "evolve_series.csv", &series)?;
    let n = (g.z_max / g.dz).round() as i64;
    let rows: Vec<FinalRow> = (-n..=n)
        .map(|i| FinalRow {
            z: i as f64 * g.dz,
            u_fdtd: at(fine, g.dz, i),
            u_spectral: at(&reference, g.dz, i),
        })
        .collect();
    out.csv(dir, "evolve_final.csv", &rows)?;

    let e0 = energy(&snaps[0], XI);
    let fd_drift = snaps
        .iter()
        .map(|f| (energy(f, XI) - e0).abs() / e0)
        .fold(0.0, f64::max);
    let c0 = state.coefficient_energy();
    let coef_drift = times
        .iter()
        .map(|&t| (state.advanced(t).coefficient_energy() - c0).abs() / c0)
        .fold(0.0, f64::max);
    out.metric("xi", XI);
    out.metric("cfl", CFL);
    out.metric("fdtd_half_length", half);
    out.metric("gap_2dz", gaps[0]);
    out.metric("zero_mode", state.zero_mode);
    out.check(Check::below("spectral_vs_fdtd_l2", gaps[1], 1e-2));
    out.check(Check::at_least("fdtd_order", min_order(&gaps), ORDER_TWO));
    out.check(Check::below("coefficient_energy_drift", coef_drift, 1e-10));
    out.check(Check::below("fdtd_energy_drift", fd_drift, 1e-3));
    Ok(out)
}
