//! Eigenfunction table and its asymptotic laws.
//!
//! `modes.csv` is the cached basis format: one row per `(z, m)` pair, `z`
//! varying fastest within each mass, columns `z, m, u_plus, u_minus`.

use std::path::Path;

use rand::Rng;
use serde::Serialize;
use volcano_core::spectrum::{
    asymptotic_residuals, ode_residual, robin_residual, u_minus, uniform_grid, MassColumn,
    ModeBasis,
};
use volcano_core::Parity;

use super::rng;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

#[derive(Serialize)]
struct Row {
    z: f64,
    m: f64,
    u_plus: f64,
    u_minus: f64,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Random spot checks of the ODE residual.
const SPOT_CHECKS: usize = 6;

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    if g.m_max <= 5.0 {
        return Err(CliError::config(
            Some("grid.m_max"),
            "the large-mass law needs masses above 5",
        ));
    }
    if g.z_max < 11.5 {
        return Err(CliError::config(
            Some("grid.z_max"),
            "the large-z law needs samples beyond z = 10",
        ));
    }
    let z = uniform_grid(g.z_max, g.dz)?;
    let mut m = log_grid(1e-3, 1e-1, 25);
    m.extend(log_grid(0.2, g.m_max, g.m_panels));
    let basis = ModeBasis::build(&z, &m)?;

    let mut out = Outcome::default();
    let mut rows = Vec::with_capacity(z.len() * m.len());
    for (im, &mass) in m.iter().enumerate() {
        for (iz, &zz) in z.iter().enumerate() {
            rows.push(Row {
                z: zz,
                m: mass,
                u_plus: basis.get(Parity::Even, iz, im),
                u_minus: basis.get(Parity::Odd, iz, im),
            });
        }
    }
    out.csv(dir, "modes.csv", &rows)?;

    let report = asymptotic_residuals(&basis)?;
    for law in &report.laws {
        out.check(Check::within(
            &format!("slope_{}", law.name),
            law.slope,
            law.expected_slope - law.tolerance,
            law.expected_slope + law.tolerance,
        ));
    }
    out.metric("laws", &report.laws);

    let mut r = rng(config);
    let mut masses = vec![0.05, 0.3, 1.0, 2.5, 5.0];
    masses.extend((0..SPOT_CHECKS).map(|_| r.random_range(0.01..g.m_max.min(20.0))));
    let (mut robin, mut dirichlet, mut ode_ratio, mut realness) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &mass in &masses {
        robin = robin.max(robin_residual(mass, 1e-3)?);
        dirichlet = dirichlet.max(u_minus(0.0, mass)?.abs());
        for p in Parity::BOTH {
            let res = ode_residual(p, mass, 0.01, 20.0)?;
            ode_ratio = ode_ratio.max(res / (1e-5 * (1.0 + mass * mass)));
        }
        let col = MassColumn::new(mass)?;
        for i in 0..=400 {
            for p in Parity::BOTH {
                realness = realness.max(col.raw(p, i as f64 * 0.125)?.im.abs());
            }
        }
    }
    out.metric("spot_masses", &masses);
    out.check(Check::below("robin_residual", robin, 1e-6));
    out.check(Check::below("dirichlet_residual", dirichlet, 1e-6));
    out.check(Check::below(
        "ode_residual_over_1e-5_(1+m^2)",
        ode_ratio,
        1.0,
    ));
    out.check(Check::below("realness_residue", realness, 1e-10));
    out.metric("rows", rows.len());
    Ok(out)
}
