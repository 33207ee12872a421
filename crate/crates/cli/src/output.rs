//! Artifact writers.
//!
//! CSV files have a header row, point decimals and `\n` line ends; floats
//! are written in shortest round-trip form. `manifest.json` holds the
//! config echo, the library version, summary metrics and the self-graded
//! checks.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// One self-graded threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// The threshold as text, e.g. `< 1e-3` or `in [-1.65, -1.35]`.
    pub threshold: String,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: format!("< {bound:e}"),
            pass: value < bound,
        }
    }

    pub fn zero(name: &str, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: "== 0".into(),
            pass: value == 0.0,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: format!(">= {bound}"),
            pass: value >= bound,
        }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }
}

/// What an experiment hands back to the runner.
#[derive(Debug, Default)]
pub struct Outcome {
    pub metrics: Map<String, Value>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(
            key.into(),
            serde_json::to_value(value).expect("metric serializes"),
        );
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Writes `rows` to `dir/name` and records the artifact.
    pub fn csv<R: Serialize>(
        &mut self,
        dir: &Path,
        name: &str,
        rows: &[R],
    ) -> Result<(), CliError> {
        write_csv(&dir.join(name), rows)?;
        self.artifacts.push(name.into());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(
        &mut self,
        dir: &Path,
        name: &str,
        value: &T,
    ) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(dir.join(name), text)?;
        self.artifacts.push(name.into());
        Ok(())
    }
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    workers: usize,
    metrics: &'a Map<String, Value>,
    checks: &'a [Check],
    pass: bool,
    artifacts: &'a [String],
}

pub fn write_manifest(
    dir: &Path,
    config: &ExperimentConfig,
    workers: usize,
    outcome: &Outcome,
) -> Result<(), CliError> {
    let m = Manifest {
        experiment: config.experiment.name(),
        version: env!("CARGO_PKG_VERSION"),
        config,
        workers,
        metrics: &outcome.metrics,
        checks: &outcome.checks,
        pass: outcome.pass(),
        artifacts: &outcome.artifacts,
    };
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        z: f64,
        value: f64,
    }

    #[test]
    fn csv_layout() {
        let dir = std::env::temp_dir().join(format!("volcano-csv-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv");
        write_csv(
            &path,
            &[
                Row {
                    z: 0.05,
                    value: -1.5e-12,
                },
                Row { z: 1.0, value: 2.0 },
            ],
        )
        .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "z,value\n0.05,-1.5e-12\n1.0,2.0\n");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn check_thresholds() {
        assert!(Check::below("a", 1e-4, 1e-3).pass);
        assert!(!Check::below("a", 1e-3, 1e-3).pass);
        assert!(Check::within("s", -1.5, -1.65, -1.35).pass);
        assert!(!Check::at_least("n", 9.0, 10.0).pass);
    }
}
