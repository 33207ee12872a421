//! One module per experiment. Each reads the merged config, writes its
//! artifacts into the output directory and returns metrics and checks.

mod decay;
mod evolve;
mod modes;
mod quasimode;
mod resolvent;
mod resonances;
mod scattering;
mod transform;

use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use volcano_core::quadrature::trapezoid;
use volcano_core::spectrum::f0;
use volcano_core::Parity;

use crate::config::{Experiment, ExperimentConfig, ProfileConfig, ProfileKind, PARTNER_SHIFT};
use crate::error::CliError;
use crate::output::Outcome;

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    match config.experiment {
        Experiment::Modes => modes::run(config, dir),
        Experiment::TransformCheck => transform::run(config, dir),
        Experiment::Evolve => evolve::run(config, dir),
        Experiment::Decay => decay::run(config, dir),
        Experiment::ResolventCheck => resolvent::run(config, dir),
        Experiment::Scattering => scattering::run(config, dir),
        Experiment::Resonances => resonances::run(config, dir),
        Experiment::Quasimode => quasimode::run(config, dir),
    }
}

pub(crate) fn rng(config: &ExperimentConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.seed)
}

/// `log2(coarse / fine)` over consecutive pairs, smallest value.
pub(crate) fn min_order(errors: &[f64]) -> f64 {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min)
}

/// Smallest observed `log2` error ratio read as second order.
pub(crate) const ORDER_TWO: f64 = 1.9;

fn shape(kind: ProfileKind, center: f64, width: f64) -> impl Fn(f64) -> f64 + Send + Sync {
    move |z| {
        let s = (z - center) / width;
        match kind {
            ProfileKind::Gaussian if s.abs() <= 8.0 => (-s * s).exp(),
            ProfileKind::Bump if s.abs() < 1.0 => (1.0 - 1.0 / (1.0 - s * s)).exp(),
            _ => 0.0,
        }
    }
}

/// Largest `z` where the shape can be nonzero.
fn reach(kind: ProfileKind, center: f64, width: f64) -> f64 {
    center
        + width
            * match kind {
                ProfileKind::Gaussian => 8.0,
                ProfileKind::Bump => 1.0,
            }
}

/// Half-line profile `h(z)`, `z >= 0`.
pub(crate) type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The configured profile on `z >= 0`. With `zero_mode_free` a copy
/// shifted by `PARTNER_SHIFT` is subtracted so that `int_0^inf h f0 = 0`.
pub(crate) fn half_profile(p: &ProfileConfig) -> Result<Profile, CliError> {
    let a = shape(p.kind, p.center, p.width);
    if !p.zero_mode_free {
        return Ok(Arc::new(a));
    }
    let b = shape(p.kind, p.center + PARTNER_SHIFT, p.width);
    let h = 1e-3;
    let top = reach(p.kind, p.center + PARTNER_SHIFT, p.width).max(0.0);
    let n = (top / h).ceil() as usize;
    let overlap = |f: &dyn Fn(f64) -> f64| {
        let v: Vec<f64> = (0..=n)
            .map(|i| f(i as f64 * h) * f0(i as f64 * h))
            .collect();
        trapezoid(&v, h)
    };
    let (oa, ob) = (overlap(&a), overlap(&b));
    if ob.abs() < 1e-12 {
        return Err(CliError::config(
            Some("profile.center"),
            "profile does not reach z >= 0; nothing to make zero-mode free",
        ));
    }
    let k = oa / ob;
    Ok(Arc::new(move |z| a(z) - k * b(z)))
}

/// The parity extension of [`half_profile`] to the whole line.
pub(crate) fn full_profile(p: &ProfileConfig) -> Result<Profile, CliError> {
    let h = half_profile(p)?;
    Ok(match p.parity {
        Parity::Even => Arc::new(move |z: f64| h(z.abs())),
        Parity::Odd => Arc::new(move |z: f64| z.signum() * h(z.abs())),
    })
}

/// Largest `|z|` where the configured profile can be nonzero.
pub(crate) fn profile_reach(p: &ProfileConfig) -> f64 {
    let shift = if p.zero_mode_free { PARTNER_SHIFT } else { 0.0 };
    reach(p.kind, p.center + shift, p.width).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partner_cancels_zero_mode() {
        let p = ProfileConfig {
            kind: ProfileKind::Gaussian,
            center: 6.0,
            width: 1.5,
            parity: Parity::Even,
            zero_mode_free: true,
        };
        let h = half_profile(&p).unwrap();
        let dz = 1e-3;
        let v: Vec<f64> = (0..=30_000)
            .map(|i| h(i as f64 * dz) * f0(i as f64 * dz))
            .collect();
        assert!(trapezoid(&v, dz).abs() < 1e-12);
    }

    #[test]
    fn odd_extension() {
        let p = ProfileConfig {
            kind: ProfileKind::Bump,
            center: 2.0,
            width: 1.0,
            parity: Parity::Odd,
            zero_mode_free: false,
        };
        let f = full_profile(&p).unwrap();
        assert_eq!(f(-2.0), -f(2.0));
        assert_eq!(f(2.0), 1.0);
        assert_eq!(f(3.5), 0.0);
    }
}
