//! Late-time decay of the brane field for data `g(|x|) h(z)` with a
//! Gaussian radial part and the configured transverse profile.
//!
//! `decay.csv` holds `|Phi(t, 0, 0)|` split into components; the slopes
//! are fitted to the suprema in `decay_sup.csv`: over `r <= t + 10` on the
//! brane for the zero-mode part, over the axis `x = 0` for the continuum.

use std::path::Path;

use serde::Serialize;
use volcano_core::brane::{
    decay_exponent_fit, BraneSettings, BraneSynthesis, RadialProfile, SeparableData, SeparableTerm,
    Slot, ZProfile,
};
use volcano_core::Parity;

use super::{full_profile, profile_reach};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

/// Start of the fit window.
const T_START: f64 = 20.0;

/// Spacing of the axis samples for the continuum supremum.
const AXIS_DZ: f64 = 0.05;

#[derive(Serialize)]
struct Row {
    t: f64,
    abs_phi: f64,
    component: &'static str,
}

#[derive(Serialize)]
struct SupRow {
    t: f64,
    graviton_sup: f64,
    kk_sup: f64,
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    let times: Vec<f64> = (0..)
        .map(|k| T_START + k as f64 * g.dt_report)
        .take_while(|t| *t <= g.t_max * (1.0 + 1e-12))
        .collect();
    if times.len() < 10 {
        return Err(CliError::config(
            Some("grid.t_max"),
            format!(
                "the fit needs ten report times in [{T_START}, t_max]; got {}",
                times.len()
            ),
        ));
    }
    let reach = profile_reach(&config.profile);
    if reach > g.z_max {
        return Err(CliError::config(
            Some("grid.z_max"),
            format!("the profile reaches z = {reach}; z_max must cover it"),
        ));
    }
    let h = full_profile(&config.profile)?;
    let data = SeparableData {
        terms: vec![SeparableTerm {
            radial: RadialProfile::from_fn(8.0, 0.01, |r| (-r * r).exp())?,
            z: ZProfile::from_fn(g.z_max, g.dz, |z| h(z))?,
            slot: Slot::Position,
        }],
    };
    let settings = BraneSettings {
        m_max: g.m_max,
        nodes_per_panel: g.m_panels,
        horizon: 2.0 * g.t_max + 30.0,
        ..Default::default()
    };
    let syn = BraneSynthesis::new(&data, &settings)?;
    let table = syn.axis_table(g.t_max + 30.0, AXIS_DZ)?;

    let mut rows = vec![];
    let mut sups = vec![];
    let mut warnings = vec![];
    for &t in &times {
        let v = syn.brane_field(t)?;
        if let Some(w) = v.warning {
            warnings.push(format!("t = {t}: {w}"));
        }
        for (component, value) in [("graviton", v.graviton), ("kk", v.kk), ("total", v.total)] {
            rows.push(Row {
                t,
                abs_phi: value.abs(),
                component,
            });
        }
        sups.push(SupRow {
            t,
            graviton_sup: syn.graviton_brane_sup(t, t + 10.0, 0.05)?,
            kk_sup: syn.kk_axis_sup(t, &table)?,
        });
    }
    let mut out = Outcome::default();
    out.csv(dir, "decay.csv", &rows)?;
    out.csv(dir, "decay_sup.csv", &sups)?;

    let window = (T_START, g.t_max);
    let kk_series: Vec<(f64, f64)> = sups.iter().map(|s| (s.t, s.kk_sup)).collect();
    let kk = decay_exponent_fit(&kk_series, window)?;
    let graviton_scale = sups.iter().map(|s| s.graviton_sup).fold(0.0, f64::max);
    let kk_only = config.profile.parity == Parity::Odd
        || config.profile.zero_mode_free
        || graviton_scale <= 1e-12 * sups.iter().map(|s| s.kk_sup).fold(0.0, f64::max);
    out.metric("kk_only", kk_only);
    out.metric("kk_slope", kk.slope);
    out.check(Check::within("kk_slope", kk.slope, -1.65, -1.35));
    if kk_only {
        out.metric("slope", kk.slope);
    } else {
        let series: Vec<(f64, f64)> = sups.iter().map(|s| (s.t, s.graviton_sup)).collect();
        let gr = decay_exponent_fit(&series, window)?;
        out.metric("graviton_slope", gr.slope);
        out.metric("slope", gr.slope);
        out.check(Check::within("graviton_slope", gr.slope, -1.1, -0.9));
    }
    out.metric("fit_window", window);
    out.metric("masses", syn.rule.len());
    out.metric("warnings", &warnings);
    Ok(out)
}
