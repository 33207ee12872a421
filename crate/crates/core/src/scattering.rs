use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::{hankel, newton_distance, HankelKind, RiemannPoint};
use crate::spectrum::MassColumn;
use crate::{Error, Parity, Result};

/// Smallest Newton distance to a denominator zero accepted by [`s_hat`].
pub const RESONANCE_DISTANCE: f64 = 1e-6;

/// Measured ratio `s_hat(parity, m) / e^{2 i delta(m)}` with `delta` the
/// sine phase of the eigenfunction asymptotics. Pinned as regression
/// constants; the odd sector carries the opposite sign.
pub const CONVENTION_EVEN: f64 = 1.0;
pub const CONVENTION_ODD: f64 = -1.0;

/// Samples per period in [`phase_shift_numeric`].
const SAMPLES_PER_PERIOD: usize = 64;

/// Largest fit residual, relative to the amplitude, accepted as asymptotic.
const REGIME_TOL: f64 = 0.05;

/// Start of the phase tracking in [`closed_form_phase_shifts`].
pub const TRACK_START: f64 = 1e-3;

pub fn convention(parity: Parity) -> f64 {
    match parity {
        Parity::Even => CONVENTION_EVEN,
        Parity::Odd => CONVENTION_ODD,
    }
}

fn order(parity: Parity) -> u32 {
    match parity {
        Parity::Even => 1,
        Parity::Odd => 2,
    }
}

/// `s_+(m) = -i e^{2im} H^(2)_1(m)/H^(1)_1(m)`,
/// `s_-(m) = i e^{2im} H^(2)_2(m)/H^(1)_2(m)`, on any validated sheet.
pub fn s_hat(parity: Parity, m: &RiemannPoint) -> Result<Complex64> {
    let nu = order(parity);
    let distance = newton_distance(HankelKind::First, nu, m)?;
    if distance < RESONANCE_DISTANCE {
        let modulus = hankel(HankelKind::First, nu, m)?.norm();
        return Err(Error::AtResonance { modulus });
    }
    let ratio = hankel(HankelKind::Second, nu, m)? / hankel(HankelKind::First, nu, m)?;
    let front = match parity {
        Parity::Even => -Complex64::i(),
        Parity::Odd => Complex64::i(),
    };
    let e = (2.0 * Complex64::i() * m.principal_value()).exp();
    Ok(front * e * ratio)
}

pub fn s_hat_real(parity: Parity, m: f64) -> Result<Complex64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mass must be positive, got {m}"
        )));
    }
    s_hat(parity, &RiemannPoint::real(m)?)
}

/// One sample of a full scattering amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePoint {
    pub sigma: f64,
    pub omega4: f64,
    pub parity: Parity,
    pub value: Complex64,
}

/// `S_+-(sigma, omega)`, which depends on the direction only through
/// `|omega_4|`. For `sigma > 0`:
/// `+-(e^{2i x}/i) H^(2)_nu(x)/H^(1)_nu(x)`, `x = sigma |omega_4|`; for
/// `sigma < 0`: `-+(e^{2i sigma |omega_4|}/i) H^(1)_nu(x)/H^(2)_nu(x)`,
/// `x = -sigma |omega_4|`. At `omega_4 = 0` the Hankel ratio is replaced by
/// its limit `-1`.
pub fn amplitude(sigma: f64, omega4: f64, parity: Parity) -> Result<AmplitudePoint> {
    if !(sigma != 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be finite and nonzero, got {sigma}"
        )));
    }
    if !(omega4.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "omega4 must lie in [-1, 1], got {omega4}"
        )));
    }
    let w = omega4.abs();
    let x = sigma.abs() * w;
    let nu = order(parity);
    let sign = match (parity, sigma > 0.0) {
        (Parity::Even, true) | (Parity::Odd, false) => 1.0,
        (Parity::Even, false) | (Parity::Odd, true) => -1.0,
    };
    let ratio = if w == 0.0 {
        Complex64::from(-1.0)
    } else {
        let point = RiemannPoint::real(x)?;
        let (h1, h2) = (
            hankel(HankelKind::First, nu, &point)?,
            hankel(HankelKind::Second, nu, &point)?,
        );
        if sigma > 0.0 {
            h2 / h1
        } else {
            h1 / h2
        }
    };
    let e = Complex64::from_polar(1.0, 2.0 * sigma * w);
    let value = sign * e / Complex64::i() * ratio;
    Ok(AmplitudePoint {
        sigma,
        omega4,
        parity,
        value,
    })
}

/// Result of fitting `a sin(mz) + b cos(mz) = A sin(mz + delta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    /// `delta` reduced to `[0, pi)`.
    pub delta: f64,
    pub amplitude: f64,
    /// Root-mean-square misfit.
    pub residual: f64,
}

/// Least-squares sine fit to `u_+-(z, m)` on `z_window`. Requires
/// `z1 >= 10/m` and at least three periods.
pub fn phase_shift_numeric(parity: Parity, m: f64, z_window: (f64, f64)) -> Result<PhaseFit> {
    let column = MassColumn::new(m)?;
    let (z1, z2) = z_window;
    let period = 2.0 * PI / m;
    if !(z1 >= 10.0 / m && z2.is_finite()) {
        return Err(Error::Precondition(format!(
            "window must start at z >= 10/m = {}",
            10.0 / m
        )));
    }
    if z2 - z1 < 3.0 * period {
        return Err(Error::Precondition(format!(
            "window must span three periods ({})",
            3.0 * period
        )));
    }
    let n = ((z2 - z1) / period * SAMPLES_PER_PERIOD as f64).ceil() as usize + 1;
    let zs: Vec<f64> = (0..n)
        .map(|i| z1 + (z2 - z1) * i as f64 / (n - 1) as f64)
        .collect();
    let values: Vec<f64> = zs
        .par_iter()
        .map(|&z| column.eval(parity, z))
        .collect::<Result<_>>()?;
    let design = DMatrix::from_fn(n, 2, |i, j| {
        let (s, c) = (m * zs[i]).sin_cos();
        if j == 0 {
            s
        } else {
            c
        }
    });
    let rhs = DVector::from_vec(values);
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let (a, b) = (coef[0], coef[1]);
    let misfit = &design * &coef - &rhs;
    let residual = (misfit.norm_squared() / n as f64).sqrt();
    let amplitude = a.hypot(b);
    if residual > REGIME_TOL * amplitude {
        return Err(Error::Regime {
            residual,
            amplitude,
        });
    }
    Ok(PhaseFit {
        delta: b.atan2(a).rem_euclid(PI),
        amplitude,
        residual,
    })
}

/// A window starting where the leading phase correction `15 / (8 m (1 + z))`
/// of `H_2(m(1+z))`, which carries the `z` dependence of both parities, is
/// below `phase_tol`, spanning `periods` periods.
pub fn asymptotic_window(m: f64, phase_tol: f64, periods: f64) -> Result<(f64, f64)> {
    if !(m > 0.0 && phase_tol > 0.0 && periods >= 3.0) {
        return Err(Error::InvalidArgument(
            "need m > 0, phase_tol > 0, periods >= 3".into(),
        ));
    }
    let start = (15.0 / (8.0 * m * phase_tol) - 1.0).max(10.0 / m);
    Ok((start, start + periods * 2.0 * PI / m))
}

/// `delta(m) = m - 5 pi/4 - arg H^(1)_nu(m)` with the argument tracked
/// continuously from `m = TRACK_START` along the increasing grid.
pub fn closed_form_phase_shifts(parity: Parity, masses: &[f64]) -> Result<Vec<f64>> {
    if masses.iter().any(|&m| !(m >= TRACK_START && m.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "masses must be >= {TRACK_START}"
        )));
    }
    if masses.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("masses must be increasing".into()));
    }
    let nu = order(parity);
    let args: Vec<f64> = std::iter::once(TRACK_START)
        .chain(masses.iter().copied())
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&m| Ok(hankel(HankelKind::First, nu, &RiemannPoint::real(m)?)?.arg()))
        .collect::<Result<_>>()?;
    let mut tracked = args[0];
    let mut out = Vec::with_capacity(masses.len());
    for (w, &m) in args.windows(2).zip(masses) {
        tracked += (w[1] - w[0] + PI).rem_euclid(2.0 * PI) - PI;
        out.push(m - 1.25 * PI - tracked);
    }
    Ok(out)
}

/// Largest `||s_hat| - 1|` over the grid and both parities.
pub fn unitarity_scan(m_grid: &[f64]) -> Result<f64> {
    if m_grid.is_empty() {
        return Err(Error::InvalidArgument("empty mass grid".into()));
    }
    m_grid
        .par_iter()
        .map(|&m| {
            let mut worst: f64 = 0.0;
            for p in Parity::BOTH {
                worst = worst.max((s_hat_real(p, m)?.norm() - 1.0).abs());
            }
            Ok(worst)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_rejects_bad_arguments() {
        assert!(amplitude(0.0, 0.5, Parity::Even).is_err());
        assert!(amplitude(1.0, 1.5, Parity::Odd).is_err());
        assert!(s_hat_real(Parity::Even, -1.0).is_err());
    }

    #[test]
    fn phase_window_preconditions() {
        assert!(matches!(
            phase_shift_numeric(Parity::Odd, 2.0, (2.0, 40.0)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            phase_shift_numeric(Parity::Odd, 2.0, (20.0, 25.0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tracking_requires_increasing_masses() {
        assert!(closed_form_phase_shifts(Parity::Even, &[1.0, 0.5]).is_err());
        assert!(closed_form_phase_shifts(Parity::Even, &[1e-4]).is_err());
    }
}
