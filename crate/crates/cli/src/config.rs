//! Experiment configuration.
//!
//! A configuration is assembled in three layers, later ones winning:
//!
//! 1. the built-in defaults of the chosen experiment,
//! 2. the TOML file given with `--config`,
//! 3. command-line flags (`--set key=value`, `--seed`, `--out`).
//!
//! The merged table is then deserialized strictly: unknown keys and
//! mistyped values are rejected.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use volcano_core::transform::MAX_OPERATOR_DZ;
use volcano_core::Parity;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Modes,
    TransformCheck,
    Evolve,
    Decay,
    ResolventCheck,
    Scattering,
    Resonances,
    Quasimode,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Modes => "modes",
            Experiment::TransformCheck => "transform-check",
            Experiment::Evolve => "evolve",
            Experiment::Decay => "decay",
            Experiment::ResolventCheck => "resolvent-check",
            Experiment::Scattering => "scattering",
            Experiment::Resonances => "resonances",
            Experiment::Quasimode => "quasimode",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// `exp(-((z - center)/width)^2)`, cut off beyond eight widths.
    Gaussian,
    /// `exp(1 - 1/(1 - s^2))`, `s = (z - center)/width`, zero for `|s| >= 1`.
    Bump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half-line extent of the `z` grid.
    pub z_max: f64,
    pub dz: f64,
    /// Mass cutoff of the continuum quadrature or sample grid.
    pub m_max: f64,
    /// Nodes per Gauss-Legendre mass panel; sample count above `m = 0.1`
    /// for `modes`; amplitude samples per sign of `sigma` for `scattering`.
    pub m_panels: usize,
    pub t_max: f64,
    pub dt_report: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    pub center: f64,
    pub width: f64,
    pub parity: Parity,
    /// Cancel the zero-mode content with a copy of the profile placed
    /// `PARTNER_SHIFT` further out (even parity only).
    pub zero_mode_free: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: GridConfig,
    pub profile: ProfileConfig,
    pub out: PathBuf,
    pub seed: u64,
}

/// Distance between a profile and its zero-mode cancelling partner.
pub const PARTNER_SHIFT: f64 = 5.0;

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let grid = |z_max, dz, m_max, m_panels, t_max, dt_report| GridConfig {
            z_max,
            dz,
            m_max,
            m_panels,
            t_max,
            dt_report,
        };
        let profile = |kind, center, width, parity, zero_mode_free| ProfileConfig {
            kind,
            center,
            width,
            parity,
            zero_mode_free,
        };
        use Experiment::*;
        use ProfileKind::*;
        let (g, p) = match experiment {
            Modes => (
                grid(50.0, 0.05, 20.0, 40, 1.0, 1.0),
                profile(Gaussian, 5.0, 1.0, Parity::Even, false),
            ),
            TransformCheck => (
                grid(15.0, 0.01, 20.0, 24, 1.0, 1.0),
                profile(Gaussian, 5.0, 1.0, Parity::Odd, false),
            ),
            Evolve => (
                grid(20.0, 5e-3, 12.0, 80, 10.0, 1.0),
                profile(Gaussian, 5.0, 1.0, Parity::Even, false),
            ),
            Decay => (
                grid(25.0, 0.01, 6.0, 40, 200.0, 12.0),
                profile(Gaussian, 6.0, 1.5, Parity::Even, true),
            ),
            ResolventCheck => (
                grid(30.0, 0.01, 1.0, 1, 1.0, 1.0),
                profile(Bump, 2.0, 1.5, Parity::Even, false),
            ),
            Scattering => (
                grid(1.0, 0.05, 50.0, 100, 1.0, 1.0),
                profile(Gaussian, 5.0, 1.0, Parity::Even, false),
            ),
            Resonances => (
                grid(1.0, 0.05, 15.0, 5, 1.0, 1.0),
                profile(Gaussian, 5.0, 1.0, Parity::Even, false),
            ),
            Quasimode => (
                grid(5.0, 1e-3, 1.0, 1, 1.0, 1.0),
                profile(Gaussian, 5.0, 1.0, Parity::Even, false),
            ),
        };
        Self {
            experiment,
            grid: g,
            profile: p,
            out: PathBuf::from("runs").join(experiment.name()),
            seed: 0,
        }
    }

    /// Merges the layers and validates the result.
    pub fn assemble(
        experiment: Experiment,
        file: Option<&str>,
        overrides: &[(String, String)],
    ) -> Result<Self, CliError> {
        let defaults = Table::try_from(Self::defaults(experiment))
            .map_err(|e| CliError::config(None, e.to_string()))?;
        let mut merged = defaults;
        if let Some(text) = file {
            let table: Table = text
                .parse()
                .map_err(|e: toml::de::Error| CliError::config(None, e.to_string()))?;
            if let Some(named) = table.get("experiment") {
                if named.as_str() != Some(experiment.name()) {
                    return Err(CliError::config(
                        Some("experiment"),
                        format!(
                            "config names experiment {named} but the subcommand is {}",
                            experiment.name()
                        ),
                    ));
                }
            }
            merge(&mut merged, table);
        }
        for (key, raw) in overrides {
            set_path(&mut merged, key, parse_scalar(raw))?;
        }
        let config: Self = merged
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(None, e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        for (name, v) in [
            ("grid.z_max", g.z_max),
            ("grid.dz", g.dz),
            ("grid.m_max", g.m_max),
            ("grid.t_max", g.t_max),
            ("grid.dt_report", g.dt_report),
            ("profile.width", self.profile.width),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(
                    Some(name),
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if g.m_panels == 0 {
            return Err(CliError::config(Some("grid.m_panels"), "must be positive"));
        }
        if g.dz > MAX_OPERATOR_DZ {
            return Err(CliError::config(
                Some("grid.dz"),
                format!("dz = {} exceeds the operator limit {MAX_OPERATOR_DZ}", g.dz),
            ));
        }
        if g.dz > g.z_max / 4.0 {
            return Err(CliError::config(
                Some("grid.dz"),
                "grid needs at least four intervals",
            ));
        }
        if !self.profile.center.is_finite() {
            return Err(CliError::config(Some("profile.center"), "must be finite"));
        }
        if self.profile.zero_mode_free && self.profile.parity == Parity::Odd {
            return Err(CliError::config(
                Some("profile.zero_mode_free"),
                "odd profiles carry no zero mode; set it for even parity only",
            ));
        }
        Ok(())
    }
}

fn merge(into: &mut Table, from: Table) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(Value::Table(a)), Value::Table(b)) => merge(a, b),
            (Some(old), v) => *old = coerce(old, v),
            (None, v) => {
                into.insert(k, v);
            }
        }
    }
}

/// Accepts an integer where the default is a float.
fn coerce(old: &Value, new: Value) -> Value {
    match (old, new) {
        (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
        (_, v) => v,
    }
}

/// Reads a flag value as a TOML scalar, falling back to a string.
fn parse_scalar(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(Some(key), "malformed key"));
    }
    if parts == ["experiment"] {
        return Err(CliError::config(
            Some(key),
            "the experiment is chosen by the subcommand",
        ));
    }
    let mut cursor = table;
    for p in &parts[..parts.len() - 1] {
        cursor = match cursor.get_mut(*p) {
            Some(Value::Table(t)) => t,
            _ => return Err(CliError::config(Some(key), "unknown key")),
        };
    }
    let last = parts[parts.len() - 1];
    match cursor.get_mut(last) {
        Some(old) => *old = coerce(old, value),
        None => return Err(CliError::config(Some(key), "unknown key")),
    }
    Ok(())
}

/// Splits a `key=value` flag.
pub fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
