//! Time evolution of `u_tt + h u + xi^2 u = 0` on the whole `z` line.
//!
//! Two independent solvers: spectral synthesis over the eigenfunctions
//! (`spectral`) and a leapfrog finite-difference scheme on the even/odd
//! half-line split (`fdtd`).

mod fdtd;
mod spectral;

pub use fdtd::{fdtd_propagate, fdtd_snapshots, CFL_LIMIT};
pub use spectral::{decompose, spectral_propagate, Decomposition, SpectralState, ZeroMode};

use serde::{Deserialize, Serialize};

use crate::quadrature::{gregory, trapezoid};
use crate::spectrum::{potential, ROBIN};
use crate::transform::HalfLineFunction;
use crate::{Error, Result};

/// Field and time derivative on a uniform grid symmetric about `z = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub z_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub u_t: Vec<f64>,
    pub time: f64,
}

impl GridField {
    /// Grid `-L, ..., L` with spacing `dz` (`2 round(L/dz) + 1` points).
    pub fn symmetric_grid(half_length: f64, dz: f64) -> Result<Vec<f64>> {
        if !(dz > 0.0 && half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::InvalidArgument(
                "grid needs positive L and dz".into(),
            ));
        }
        let n = (half_length / dz).round() as i64;
        Ok((-n..=n).map(|i| i as f64 * dz).collect())
    }

    pub fn from_fns(
        z_grid: Vec<f64>,
        u: impl Fn(f64) -> f64,
        u_t: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let uu = z_grid.iter().map(|&z| u(z)).collect();
        let ut = z_grid.iter().map(|&z| u_t(z)).collect();
        Self::new(z_grid, uu, ut, 0.0)
    }

    pub fn new(z_grid: Vec<f64>, u: Vec<f64>, u_t: Vec<f64>, time: f64) -> Result<Self> {
        let n = z_grid.len();
        if n < 5 || n % 2 == 0 || u.len() != n || u_t.len() != n {
            return Err(Error::InvalidArgument(
                "symmetric grid needs an odd number (>= 5) of points and matching arrays".into(),
            ));
        }
        let mid = n / 2;
        let dz = z_grid[1] - z_grid[0];
        let ok = z_grid[mid] == 0.0
            && dz > 0.0
            && (0..n).all(|i| ((z_grid[i] + z_grid[n - 1 - i]).abs()) <= 1e-9 * dz)
            && z_grid
                .windows(2)
                .all(|w| ((w[1] - w[0]) - dz).abs() <= 1e-9 * dz);
        if !ok {
            return Err(Error::InvalidArgument(
                "grid must be uniform and symmetric about 0".into(),
            ));
        }
        if u.iter().chain(&u_t).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite field value".into()));
        }
        Ok(Self {
            z_grid,
            u,
            u_t,
            time,
        })
    }

    pub fn dz(&self) -> f64 {
        self.z_grid[1] - self.z_grid[0]
    }

    pub fn half_length(&self) -> f64 {
        *self.z_grid.last().expect("nonempty grid")
    }

    fn mid(&self) -> usize {
        self.z_grid.len() / 2
    }

    /// Nonnegative half of the grid.
    pub fn half_grid(&self) -> Vec<f64> {
        self.z_grid[self.mid()..].to_vec()
    }

    /// `(v(z) + v(-z))/2` or `(v(z) - v(-z))/2` on `z >= 0`.
    pub fn split(&self, values: &[f64], even: bool) -> Vec<f64> {
        let mid = self.mid();
        (0..=mid)
            .map(|k| {
                let (a, b) = (values[mid + k], values[mid - k]);
                if even {
                    0.5 * (a + b)
                } else {
                    0.5 * (a - b)
                }
            })
            .collect()
    }

    /// Rebuilds whole-line values `even(|z|) + sign(z) odd(|z|)`.
    pub fn combine(even: &[f64], odd: &[f64]) -> Vec<f64> {
        let n = even.len();
        let mut out = Vec::with_capacity(2 * n - 1);
        for k in (1..n).rev() {
            out.push(even[k] - odd[k]);
        }
        out.push(even[0]);
        for k in 1..n {
            out.push(even[k] + odd[k]);
        }
        out
    }

    /// Largest nonzero |z| of `u` or `u_t`, or 0 for the zero field.
    pub fn support_radius(&self) -> f64 {
        self.z_grid
            .iter()
            .zip(self.u.iter().zip(&self.u_t))
            .filter(|(_, (a, b))| **a != 0.0 || **b != 0.0)
            .fold(0.0, |r, (z, _)| r.max(z.abs()))
    }

    pub fn max_abs(&self, radius: f64) -> f64 {
        self.z_grid
            .iter()
            .zip(&self.u)
            .filter(|(z, _)| z.abs() <= radius)
            .fold(0.0, |a, (_, v)| a.max(v.abs()))
    }

    pub fn l2_norm(&self, radius: f64) -> f64 {
        let sq: Vec<f64> = self
            .z_grid
            .iter()
            .zip(&self.u)
            .map(|(z, v)| if z.abs() <= radius { v * v } else { 0.0 })
            .collect();
        trapezoid(&sq, self.dz()).sqrt()
    }

    /// `max_z |u(z) - u(-z)|` or `|u(z) + u(-z)|`, whichever is asked.
    pub fn asymmetry(&self, against_even: bool) -> f64 {
        let n = self.u.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.u[i], self.u[n - 1 - i]);
                if against_even {
                    (a - b).abs()
                } else {
                    (a + b).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn half_line(&self, values: &[f64], even: bool) -> Result<HalfLineFunction> {
        HalfLineFunction::new(self.half_grid(), self.split(values, even))
    }
}

/// Fourth-order first derivative on a uniform grid, one-sided at the ends.
pub(crate) fn derivative4(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    assert!(n >= 5, "derivative stencil needs five points");
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    }
    let fwd = |i: usize| {
        (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4])
            / (12.0 * h)
    };
    let fwd1 = |i: usize| {
        (-3.0 * v[i - 1] - 10.0 * v[i] + 18.0 * v[i + 1] - 6.0 * v[i + 2] + v[i + 3]) / (12.0 * h)
    };
    d[0] = fwd(0);
    d[1] = fwd1(1);
    let bwd = |i: usize| {
        (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4])
            / (12.0 * h)
    };
    let bwd1 = |i: usize| {
        (3.0 * v[i + 1] + 10.0 * v[i] - 18.0 * v[i - 1] + 6.0 * v[i - 2] - v[i - 3]) / (12.0 * h)
    };
    d[n - 1] = bwd(n - 1);
    d[n - 2] = bwd1(n - 2);
    d
}

/// Energy with the twisted derivative,
/// `int |u_t|^2 + |u' + (3/2) sign(z) (1+|z|)^{-1} u|^2 + xi^2 |u|^2 dz`,
/// evaluated as twice the sum of the two half-line parity energies.
pub fn energy(field: &GridField, xi: f64) -> f64 {
    let grid = field.half_grid();
    let h = field.dz();
    let mut total = 0.0;
    for even in [true, false] {
        let u = field.split(&field.u, even);
        let ut = field.split(&field.u_t, even);
        let du = derivative4(&u, h);
        let density: Vec<f64> = (0..grid.len())
            .map(|i| {
                let twisted = du[i] + ROBIN / (1.0 + grid[i]) * u[i];
                ut[i] * ut[i] + twisted * twisted + xi * xi * u[i] * u[i]
            })
            .collect();
        total += 2.0 * gregory(&density, h);
    }
    total
}

/// The same energy in the untwisted form
/// `int |u_t|^2 + |u'|^2 + V |u|^2 + xi^2 |u|^2 dz - 3 |u(0)|^2`.
pub fn energy_with_boundary_term(field: &GridField, xi: f64) -> f64 {
    let grid = field.half_grid();
    let h = field.dz();
    let mut total = 0.0;
    for even in [true, false] {
        let u = field.split(&field.u, even);
        let ut = field.split(&field.u_t, even);
        let du = derivative4(&u, h);
        let density: Vec<f64> = (0..grid.len())
            .map(|i| ut[i] * ut[i] + du[i] * du[i] + (potential(grid[i]) + xi * xi) * u[i] * u[i])
            .collect();
        total += 2.0 * gregory(&density, h);
    }
    let u0 = field.u[field.mid()];
    total - 3.0 * u0 * u0
}

/// One row of an exported time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub t: f64,
    pub energy: f64,
    pub max_abs: f64,
    pub l2: f64,
}

impl TimeSample {
    pub fn of(field: &GridField, xi: f64, radius: f64) -> Self {
        Self {
            t: field.time,
            energy: energy(field, xi),
            max_abs: field.max_abs(radius),
            l2: field.l2_norm(radius),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::f0;

    #[test]
    fn split_and_combine_round_trip() {
        let grid = GridField::symmetric_grid(2.0, 0.5).unwrap();
        let f = GridField::from_fns(grid, |z| z * z * z + z + 1.0, |_| 0.0).unwrap();
        let e = f.split(&f.u, true);
        let o = f.split(&f.u, false);
        assert_eq!(GridField::combine(&e, &o), f.u);
    }

    #[test]
    fn zero_mode_is_energy_null() {
        let grid = GridField::symmetric_grid(30.0, 0.01).unwrap();
        let f = GridField::from_fns(grid, f0, |_| 0.0).unwrap();
        assert!(energy(&f, 0.0) < 1e-12);
    }

    #[test]
    fn kinetic_energy_is_l2_norm() {
        let grid = GridField::symmetric_grid(10.0, 0.01).unwrap();
        let g = |z: f64| (-(z - 1.0) * (z - 1.0)).exp();
        let f = GridField::from_fns(grid, |_| 0.0, g).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((energy(&f, 0.0) - exact).abs() < 1e-10);
    }

    #[test]
    fn twisted_and_boundary_forms_agree() {
        let grid = GridField::symmetric_grid(12.0, 0.005).unwrap();
        let bump = |z: f64| {
            let s = (z - 0.7) / 3.0;
            if s.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - s * s)).exp()
            } else {
                0.0
            }
        };
        let f = GridField::from_fns(grid, bump, |z| 0.3 * bump(-z)).unwrap();
        let a = energy(&f, 0.7);
        let b = energy_with_boundary_term(&f, 0.7);
        assert!((a - b).abs() < 1e-6 * a, "{a} {b}");
    }

    #[test]
    fn rejects_asymmetric_grids() {
        let z = vec![-1.0, -0.5, 0.0, 0.5, 1.5];
        assert!(GridField::new(z, vec![0.0; 5], vec![0.0; 5], 0.0).is_err());
    }
}
