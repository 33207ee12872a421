use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GridField;
use crate::quadrature::trapezoid;
use crate::spectrum::f0;
use crate::transform::{SpectralCoefficients, TransformPlan};
use crate::{Error, Parity, Result};

/// Relative size of `int f0 u_1` above which a `xi = 0` zero mode is
/// reported as secular.
const SECULAR_TOL: f64 = 1e-12;

/// Zero-mode content `q(t) f0(|z|)` with `q(0) = c0`, `q'(0) = c1`.
///
/// For `xi > 0`, `q(t) = A e^{i xi t} + B e^{-i xi t}`. For `xi = 0` the
/// motion is `q(t) = A + B t` with `A = c0`, `B = c1` real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroMode {
    pub c0: f64,
    pub c1: f64,
    pub a: Complex64,
    pub b: Complex64,
}

impl ZeroMode {
    pub fn new(c0: f64, c1: f64, xi: f64) -> Self {
        let (a, b) = if xi > 0.0 {
            let s = Complex64::new(0.0, c1 / xi);
            ((c0 - s) * 0.5, (c0 + s) * 0.5)
        } else {
            (Complex64::from(c0), Complex64::from(c1))
        };
        Self { c0, c1, a, b }
    }

    fn at(&self, xi: f64, t: f64) -> (f64, f64) {
        if xi > 0.0 {
            let (s, c) = (xi * t).sin_cos();
            (
                self.c0 * c + self.c1 * s / xi,
                -self.c0 * xi * s + self.c1 * c,
            )
        } else {
            (self.c0 + self.c1 * t, self.c1)
        }
    }
}

/// Position (`a`) and velocity (`b`) coefficients of one parity sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub a: SpectralCoefficients,
    pub b: SpectralCoefficients,
}

impl Decomposition {
    fn omega(&self, j: usize, xi: f64) -> f64 {
        self.a.rule.nodes[j].hypot(xi)
    }

    fn advanced(&self, xi: f64, t: f64) -> Self {
        let mut out = self.clone();
        for j in 0..self.a.values.len() {
            let w = self.omega(j, xi);
            let (s, c) = (w * t).sin_cos();
            let (a, b) = (self.a.values[j], self.b.values[j]);
            out.a.values[j] = a * c + b * s / w;
            out.b.values[j] = -a * w * s + b * c;
        }
        out
    }

    /// `sum_j w_j (omega_j^2 a_j^2 + b_j^2)`, the half-line energy.
    fn energy(&self, xi: f64) -> f64 {
        (0..self.a.values.len())
            .map(|j| {
                let w = self.omega(j, xi);
                self.a.rule.weights[j]
                    * (w * w * self.a.values[j].powi(2) + self.b.values[j].powi(2))
            })
            .sum()
    }
}

/// Cauchy data expressed in the zero mode and the two continua.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralState {
    pub xi: f64,
    pub time: f64,
    pub zero_mode: ZeroMode,
    pub kk_even: Decomposition,
    pub kk_odd: Decomposition,
    /// `xi = 0` with a nonzero zero-mode velocity: `q` grows linearly.
    pub secular: bool,
}

impl SpectralState {
    /// The state after a further time `t`, rotating each mode in place.
    pub fn advanced(&self, t: f64) -> Self {
        let (c0, c1) = self.zero_mode.at(self.xi, t);
        Self {
            xi: self.xi,
            time: self.time + t,
            zero_mode: ZeroMode::new(c0, c1, self.xi),
            kk_even: self.kk_even.advanced(self.xi, t),
            kk_odd: self.kk_odd.advanced(self.xi, t),
            secular: self.secular,
        }
    }

    /// Energy evaluated in coefficient space,
    /// `c1^2 + xi^2 c0^2 + 2 sum_parity sum_j w_j (omega_j^2 a_j^2 + b_j^2)`.
    pub fn coefficient_energy(&self) -> f64 {
        let zm = self.zero_mode;
        zm.c1 * zm.c1
            + self.xi * self.xi * zm.c0 * zm.c0
            + 2.0 * (self.kk_even.energy(self.xi) + self.kk_odd.energy(self.xi))
    }

    fn sector(&self, parity: Parity) -> &Decomposition {
        match parity {
            Parity::Even => &self.kk_even,
            Parity::Odd => &self.kk_odd,
        }
    }
}

/// Splits `(u, u_t)` into zero-mode amplitudes and the `F_+-` transforms of
/// the even and odd parts. The data are taken to vanish beyond the grid, so
/// the zero-mode coefficient uses the exact norm `int_R f0^2 = 1`. The plan
/// grid must cover the nonnegative half of the data grid with the same
/// spacing.
pub fn decompose(data: &GridField, xi: f64, plan: &TransformPlan) -> Result<SpectralState> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::InvalidArgument("xi must be finite and >= 0".into()));
    }
    let sector = |values: &[f64], parity: Parity| -> Result<(SpectralCoefficients, f64)> {
        let f = data.half_line(values, parity == Parity::Even)?;
        let c = match parity {
            Parity::Even => 2.0 * f.zero_mode_overlap(),
            Parity::Odd => 0.0,
        };
        Ok((plan.forward_any(parity, &f)?, c))
    };
    let (a_even, c0) = sector(&data.u, Parity::Even)?;
    let (b_even, c1) = sector(&data.u_t, Parity::Even)?;
    let (a_odd, _) = sector(&data.u, Parity::Odd)?;
    let (b_odd, _) = sector(&data.u_t, Parity::Odd)?;
    let speed = trapezoid(
        &data.u_t.iter().map(|v| v * v).collect::<Vec<_>>(),
        data.dz(),
    )
    .sqrt();
    Ok(SpectralState {
        xi,
        time: data.time,
        zero_mode: ZeroMode::new(c0, c1, xi),
        kk_even: Decomposition {
            a: a_even,
            b: b_even,
        },
        kk_odd: Decomposition { a: a_odd, b: b_odd },
        secular: xi == 0.0 && c1.abs() > SECULAR_TOL * speed.max(1.0),
    })
}

/// Synthesizes the field a time `t` after `state` on the symmetric grid
/// spanned by the plan's half-line grid.
pub fn spectral_propagate(
    state: &SpectralState,
    t: f64,
    plan: &TransformPlan,
) -> Result<GridField> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite".into()));
    }
    for d in [&state.kk_even, &state.kk_odd] {
        if d.a.values.len() != plan.rule.len() {
            return Err(Error::InvalidArgument(
                "state and plan use different mass rules".into(),
            ));
        }
    }
    let s = state.advanced(t);
    let half = plan.z_grid();
    let sectors: Vec<[Vec<f64>; 2]> = Parity::BOTH
        .par_iter()
        .map(|&p| {
            let d = s.sector(p);
            Ok([plan.inverse(&d.a)?.values, plan.inverse(&d.b)?.values])
        })
        .collect::<Result<_>>()?;
    let (c0, c1) = (s.zero_mode.c0, s.zero_mode.c1);
    let even_u: Vec<f64> = half
        .iter()
        .zip(&sectors[0][0])
        .map(|(&z, v)| v + c0 * f0(z))
        .collect();
    let even_ut: Vec<f64> = half
        .iter()
        .zip(&sectors[0][1])
        .map(|(&z, v)| v + c1 * f0(z))
        .collect();
    let mut odd_u = sectors[1][0].clone();
    let mut odd_ut = sectors[1][1].clone();
    odd_u[0] = 0.0;
    odd_ut[0] = 0.0;
    let dz = half[1] - half[0];
    let n = half.len() as i64 - 1;
    let z_grid = (-n..=n).map(|i| i as f64 * dz).collect();
    GridField::new(
        z_grid,
        GridField::combine(&even_u, &odd_u),
        GridField::combine(&even_ut, &odd_ut),
        s.time,
    )
}
