//! Zero atlas of `H^(1)_1` and `H^(1)_2` on sheets 0 and -1, matched
//! against the tabulated seeds, and the resonance rays of the first zeros.
//!
//! `atlas.json` is an array of `{nu, kind, sheet, re, im, residual}` with
//! `re + i im` the principal projection of the zero; `lattice_nu{1,2}.csv`
//! have columns `alpha, re, im`.

use std::path::Path;

use serde::Serialize;
use volcano_core::resonance::{
    resonance_lattice, seed_sweep, zero_table, AtlasEntry, Resonance, RESIDUAL_ACCEPT,
};
use volcano_core::special::HankelKind;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Check, Outcome};

/// Table agreement required of a refined zero.
const MATCH_TOL: f64 = 5e-3;

/// Fewest matched table entries for a pass.
const MIN_MATCHED: usize = 10;

#[derive(Serialize)]
struct LatticeRow {
    alpha: f64,
    re: f64,
    im: f64,
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let g = &config.grid;
    if g.m_panels > 12 {
        return Err(CliError::config(
            Some("grid.m_panels"),
            "at most 12 string zeros are swept per family",
        ));
    }
    let mut zeros: Vec<Resonance> = vec![];
    for nu in [1, 2] {
        for sheet in [0, -1] {
            zeros.extend(seed_sweep(nu, HankelKind::First, sheet, g.m_panels)?);
        }
    }
    let atlas: Vec<AtlasEntry> = zeros.iter().map(AtlasEntry::from).collect();
    let mut out = Outcome::default();
    out.json(dir, "atlas.json", &atlas)?;

    let mut matched = 0;
    let mut misses = vec![];
    for e in zero_table() {
        let nearest = zeros
            .iter()
            .filter(|z| z.nu == e.nu && z.sheet == e.sheet)
            .map(|z| ((z.position - e.value).norm(), z.position))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match nearest {
            Some((d, _)) if d <= MATCH_TOL => matched += 1,
            Some((d, z)) => misses.push(serde_json::json!({
                "nu": e.nu, "sheet": e.sheet, "row": e.row,
                "table": [e.value.re, e.value.im],
                "nearest": [z.re, z.im],
                "distance": d,
            })),
            None => misses.push(serde_json::json!({
                "nu": e.nu, "sheet": e.sheet, "row": e.row, "nearest": null,
            })),
        }
    }

    let steps = (g.m_max / g.dt_report + 1e-9).floor().max(0.0) as usize;
    let alphas: Vec<f64> = (0..=steps)
        .map(|k| 1.0 + k as f64 * g.dt_report)
        .filter(|a| *a <= g.m_max.max(1.0))
        .collect();
    for nu in [1, 2] {
        let first = zeros
            .iter()
            .filter(|z| z.nu == nu && z.sheet == 0)
            .min_by(|a, b| a.position.norm().total_cmp(&b.position.norm()))
            .expect("every sweep holds its eye-region zeros");
        let points = resonance_lattice(first, &alphas)?;
        let rows: Vec<LatticeRow> = alphas
            .iter()
            .zip(&points)
            .map(|(&alpha, p)| LatticeRow {
                alpha,
                re: p.re,
                im: p.im,
            })
            .collect();
        out.csv(dir, &format!("lattice_nu{nu}.csv"), &rows)?;
    }

    let worst = zeros.iter().map(|z| z.residual).fold(0.0, f64::max);
    out.metric("zeros", zeros.len());
    out.metric("table_entries", zero_table().len());
    out.metric("table_misses", &misses);
    out.check(Check::at_least(
        "table_matched",
        matched as f64,
        MIN_MATCHED as f64,
    ));
    out.check(Check::below("max_residual", worst, RESIDUAL_ACCEPT));
    Ok(out)
}
