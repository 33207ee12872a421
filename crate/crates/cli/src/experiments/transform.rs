//! Plancherel defect, round trip and multiplication property of the
//! distorted transform for the configured profile.

use std::path::Path;

use serde::Serialize;
use volcano_core::quadrature::QuadRule;
use volcano_core::spectrum::uniform_grid;
use volcano_core::transform::{project_out_zero_mode, HalfLineFunction, TransformPlan};
use volcano_core::Parity;

use super::{half_profile, min_order, ORDER_TWO};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

#[derive(Serialize)]
struct CoefRow {
    m: f64,
    weight: f64,
    value: f64,
}

#[derive(Serialize)]
struct RoundTripRow {
    z: f64,
    f: f64,
    inverse: f64,
}

fn sample(config: &ExperimentConfig, dz: f64) -> Result<HalfLineFunction, CliError> {
    let grid = uniform_grid(config.grid.z_max, dz)?;
    let f = HalfLineFunction::from_fn(&grid, &*half_profile(&config.profile)?)?;
    Ok(match config.profile.parity {
        Parity::Even => project_out_zero_mode(&f)?,
        Parity::Odd => f,
    })
}

fn relative_l2(a: &HalfLineFunction, b: &HalfLineFunction) -> Result<f64, CliError> {
    let d: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    Ok(HalfLineFunction::new(a.z_grid.clone(), d)?.l2_norm() / b.l2_norm())
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    let parity = config.profile.parity;
    if g.m_panels < 4 {
        return Err(CliError::config(
            Some("grid.m_panels"),
            "the round-trip ladder uses m_panels/4, m_panels/2 and m_panels nodes",
        ));
    }
    if 4.0 * g.dz > 0.05 {
        return Err(CliError::config(
            Some("grid.dz"),
            "the multiplication ladder uses 4 dz, 2 dz and dz; dz must be <= 0.0125",
        ));
    }
    let mut out = Outcome::default();
    let f = sample(config, g.dz)?;
    if f.l2_norm() == 0.0 {
        return Err(CliError::config(
            Some("profile.center"),
            "profile vanishes on the grid",
        ));
    }
    let rule = QuadRule::mass_rule(g.m_max, g.m_panels)?;
    let plan = TransformPlan::new(&f.z_grid, &rule)?;
    let coef = plan.forward(parity, &f)?;
    let norm = f.l2_norm().powi(2);
    let plancherel = (coef.l2_norm_sq() - norm).abs() / norm;
    let rows: Vec<CoefRow> = (0..rule.len())
        .map(|j| CoefRow {
            m: rule.nodes[j],
            weight: rule.weights[j],
            value: coef.values[j],
        })
        .collect();
    out.csv(dir, "transform_coefficients.csv", &rows)?;
    let back = plan.inverse(&coef)?;
    let rows: Vec<RoundTripRow> = (0..f.z_grid.len())
        .map(|i| RoundTripRow {
            z: f.z_grid[i],
            f: f.values[i],
            inverse: back.values[i],
        })
        .collect();
    out.csv(dir, "transform_roundtrip.csv", &rows)?;

    let mut round_trip = vec![];
    for per_panel in [g.m_panels / 4, g.m_panels / 2, g.m_panels] {
        let p = TransformPlan::new(&f.z_grid, &QuadRule::mass_rule(g.m_max, per_panel)?)?;
        let back = p.inverse(&p.forward(parity, &f)?)?;
        round_trip.push(relative_l2(&back, &f)?);
    }
    let mut multiplication = vec![];
    for k in [4.0, 2.0, 1.0] {
        let fk = sample(config, k * g.dz)?;
        let p = TransformPlan::new(&fk.z_grid, &rule)?;
        multiplication.push(p.multiplication_residual(parity, &fk)?);
    }
    let rt_order = min_order(&round_trip);
    let mult_order = min_order(&multiplication);
    out.metric("parity", parity);
    out.metric("masses", rule.len());
    out.metric("round_trip_ladder", &round_trip);
    out.metric("multiplication_ladder", &multiplication);
    out.metric("coefficient_tail", coef.tail_estimate());
    out.check(Check::below("plancherel_defect", plancherel, 1e-3));
    out.check(Check::below("round_trip_l2", round_trip[2], 1e-2));
    out.check(Check::at_least("round_trip_order", rt_order, ORDER_TWO));
    out.check(Check::below(
        "multiplication_residual",
        multiplication[2],
        1e-2,
    ));
    out.check(Check::at_least(
        "multiplication_order",
        mult_order,
        ORDER_TWO,
    ));
    Ok(out)
}
