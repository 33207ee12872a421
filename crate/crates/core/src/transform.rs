//! Distorted Fourier transforms `F_+-` built on the eigenfunctions `u_+-`,
//! their inverses, the zero-mode projector and a discrete `h_+-`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quadrature::{trapezoid, QuadRule};
use crate::spectrum::{f0, Boundary, ModeBasis, OperatorSample, ROBIN};
use crate::{Error, Parity, Result};

/// Largest grid spacing accepted by [`apply_h_discrete`].
pub const MAX_OPERATOR_DZ: f64 = 0.05;

/// Tolerance on `int f f0` for even-parity input.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Samples of a function on a uniform half-line grid starting at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineFunction {
    pub z_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Values vanish beyond this abscissa.
    pub support_bound: f64,
}

impl HalfLineFunction {
    pub fn new(z_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if z_grid.len() != values.len() || z_grid.len() < 2 {
            return Err(Error::InvalidArgument(
                "grid and values must have equal length >= 2".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sample".into()));
        }
        let dz = z_grid[1] - z_grid[0];
        let uniform = z_grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dz).abs() <= 1e-9 * dz);
        if z_grid[0] != 0.0 || !(dz > 0.0) || !uniform {
            return Err(Error::InvalidArgument(
                "half-line grids must be uniform and start at 0".into(),
            ));
        }
        let support_bound = values
            .iter()
            .rposition(|v| *v != 0.0)
            .map_or(0.0, |i| z_grid[(i + 1).min(z_grid.len() - 1)]);
        Ok(Self {
            z_grid,
            values,
            support_bound,
        })
    }

    pub fn from_fn(z_grid: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(z_grid.to_vec(), z_grid.iter().map(|&z| f(z)).collect())
    }

    pub fn zeros(z_grid: &[f64]) -> Result<Self> {
        Self::new(z_grid.to_vec(), vec![0.0; z_grid.len()])
    }

    pub fn dz(&self) -> f64 {
        self.z_grid[1] - self.z_grid[0]
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        trapezoid(&sq, self.dz()).sqrt()
    }

    /// Trapezoid inner product with another function on the same grid.
    pub fn dot(&self, other: &[f64]) -> f64 {
        let p: Vec<f64> = self.values.iter().zip(other).map(|(a, b)| a * b).collect();
        trapezoid(&p, self.dz())
    }

    /// `int_0^inf f f0 dz` on the grid.
    pub fn zero_mode_overlap(&self) -> f64 {
        let zm: Vec<f64> = self.z_grid.iter().map(|&z| f0(z)).collect();
        self.dot(&zm)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Coefficient function on the nodes of a mass quadrature rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub parity: Parity,
    pub rule: QuadRule,
    pub values: Vec<f64>,
}

impl SpectralCoefficients {
    pub fn zeros(parity: Parity, rule: &QuadRule) -> Self {
        Self {
            parity,
            values: vec![0.0; rule.len()],
            rule: rule.clone(),
        }
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.rule.integrate_sampled(&self.values, |v| v * v)
    }

    /// Largest coefficient magnitude on the top eighth of the mass range,
    /// an estimate of what the cutoff discards.
    pub fn tail_estimate(&self) -> f64 {
        let top = self.rule.nodes.last().copied().unwrap_or(0.0);
        self.rule
            .nodes
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m >= 0.875 * top)
            .fold(0.0, |a, (_, v)| a.max(v.abs()))
    }
}

impl QuadRule {
    /// `sum_j w_j g(v_j)` for sampled values `v`.
    pub fn integrate_sampled(&self, values: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * g(*v))
            .sum()
    }
}

/// Removes the zero-mode component: `g = f - (<f, f0> / <f0, f0>) f0`.
///
/// Both inner products are trapezoid sums on the grid of `f`, so the
/// result is orthogonal to `f0` in the same discrete sense that
/// [`forward`] checks.
pub fn project_out_zero_mode(f: &HalfLineFunction) -> Result<HalfLineFunction> {
    let zm: Vec<f64> = f.z_grid.iter().map(|&z| f0(z)).collect();
    let sq: Vec<f64> = zm.iter().map(|v| v * v).collect();
    let c = f.dot(&zm) / trapezoid(&sq, f.dz());
    HalfLineFunction::new(
        f.z_grid.clone(),
        f.values.iter().zip(&zm).map(|(v, q)| v - c * q).collect(),
    )
}

/// Precomputed eigenfunction samples for one half-line grid and one mass
/// rule.
#[derive(Clone, Debug)]
pub struct TransformPlan {
    pub rule: QuadRule,
    pub basis: ModeBasis,
    dz: f64,
}

impl TransformPlan {
    pub fn new(z_grid: &[f64], rule: &QuadRule) -> Result<Self> {
        let probe = HalfLineFunction::zeros(z_grid)?;
        Ok(Self {
            basis: ModeBasis::build(z_grid, &rule.nodes)?,
            rule: rule.clone(),
            dz: probe.dz(),
        })
    }

    pub fn z_grid(&self) -> &[f64] {
        &self.basis.z_grid
    }

    fn check_grid(&self, f: &HalfLineFunction) -> Result<()> {
        if f.z_grid.len() > self.basis.z_grid.len() || (f.dz() - self.dz).abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "function grid does not match the transform plan".into(),
            ));
        }
        Ok(())
    }

    /// `F_+-(f)(m_j) = int f(z) u_+-(z, m_j) dz` by the trapezoid rule.
    pub fn forward(&self, parity: Parity, f: &HalfLineFunction) -> Result<SpectralCoefficients> {
        if parity == Parity::Even {
            let overlap = f.zero_mode_overlap();
            if overlap.abs() > ORTHOGONALITY_TOL * f.l2_norm().max(1.0) {
                return Err(Error::DomainViolation { overlap });
            }
        }
        self.forward_any(parity, f)
    }

    /// The same integral without the orthogonality gate. Since
    /// `int f0 u_+ dz = 0`, for data vanishing beyond the grid this is the
    /// transform of `f - c f0` with the exact zero-mode coefficient `c`, even
    /// though that difference has an infinite tail.
    pub fn forward_any(
        &self,
        parity: Parity,
        f: &HalfLineFunction,
    ) -> Result<SpectralCoefficients> {
        self.check_grid(f)?;
        let nm = self.rule.len();
        let table = self.basis.table(parity);
        let last = f.values.iter().rposition(|v| *v != 0.0);
        let mut values = vec![0.0; nm];
        if let Some(last) = last {
            let n = f.values.len();
            values.par_iter_mut().enumerate().for_each(|(j, out)| {
                let mut acc = 0.0;
                for i in 0..=last {
                    let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                    acc += w * f.values[i] * table[i * nm + j];
                }
                *out = acc * self.dz;
            });
        }
        Ok(SpectralCoefficients {
            parity,
            rule: self.rule.clone(),
            values,
        })
    }

    /// `(F^{-1} c)(z_i) = sum_j w_j c_j u_+-(z_i, m_j)` on the plan grid.
    pub fn inverse(&self, c: &SpectralCoefficients) -> Result<HalfLineFunction> {
        if c.values.len() != self.rule.len() {
            return Err(Error::InvalidArgument("coefficient length mismatch".into()));
        }
        let nm = self.rule.len();
        let table = self.basis.table(c.parity);
        let weighted: Vec<f64> = c
            .values
            .iter()
            .zip(&self.rule.weights)
            .map(|(v, w)| v * w)
            .collect();
        let values: Vec<f64> = (0..self.basis.z_grid.len())
            .into_par_iter()
            .map(|i| {
                let row = &table[i * nm..(i + 1) * nm];
                row.iter().zip(&weighted).map(|(u, c)| u * c).sum()
            })
            .collect();
        HalfLineFunction::new(self.basis.z_grid.clone(), values)
    }

    /// `||F(h f) - m^2 F(f)|| / ||m^2 F(f)||` in `L^2(m)`.
    pub fn multiplication_residual(&self, parity: Parity, f: &HalfLineFunction) -> Result<f64> {
        let sample = OperatorSample::new(f.z_grid.clone(), Boundary::for_parity(parity));
        let mut hf = apply_h_discrete(&sample, f)?;
        if parity == Parity::Even {
            // h f is orthogonal to f0 exactly; the discrete operator is only
            // self-adjoint up to its truncation error.
            hf = project_out_zero_mode(&hf)?;
        }
        let lhs = self.forward(parity, &hf)?;
        let rhs = self.forward(parity, f)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.rule.len() {
            let m2 = self.rule.nodes[j].powi(2);
            let w = self.rule.weights[j];
            num += w * (lhs.values[j] - m2 * rhs.values[j]).powi(2);
            den += w * (m2 * rhs.values[j]).powi(2);
        }
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok((num / den).sqrt())
    }
}

/// Forward transform with a one-off plan on the grid of `f`.
pub fn forward(
    parity: Parity,
    f: &HalfLineFunction,
    rule: &QuadRule,
) -> Result<SpectralCoefficients> {
    TransformPlan::new(&f.z_grid, rule)?.forward(parity, f)
}

/// Inverse transform onto `z_grid`.
pub fn inverse(c: &SpectralCoefficients, z_grid: &[f64]) -> Result<HalfLineFunction> {
    TransformPlan::new(z_grid, &c.rule)?.inverse(c)
}

/// Multiplication-property residual on the default mass rule.
pub fn multiplication_residual(parity: Parity, f: &HalfLineFunction) -> Result<f64> {
    TransformPlan::new(&f.z_grid, &QuadRule::default_mass_rule())?
        .multiplication_residual(parity, f)
}

/// Weights `g` with `p(s) = sum_k g_k d_k` for the degree-5 polynomial
/// matching six linear conditions `rows . c = d` (monomial basis in `s`).
fn extrapolation_weights(rows: &[[f64; 6]; 6], s: f64) -> Result<[f64; 6]> {
    let a = DMatrix::from_fn(6, 6, |i, j| rows[i][j]);
    let e = DVector::from_fn(6, |j, _| s.powi(j as i32));
    let w = a
        .transpose()
        .lu()
        .solve(&e)
        .ok_or_else(|| Error::IllConditioned("ghost-point extrapolation".into()))?;
    let mut out = [0.0; 6];
    out.copy_from_slice(w.as_slice());
    Ok(out)
}

fn value_row(s: f64) -> [f64; 6] {
    let mut r = [0.0; 6];
    for (j, v) in r.iter_mut().enumerate() {
        *v = s.powi(j as i32);
    }
    r
}

/// `-f'' + V f` by fourth-order central differences. Ghost values left of
/// `z = 0` come from a degree-5 polynomial that interpolates the first
/// samples and satisfies the boundary condition; ghost values beyond the
/// last sample come from plain degree-5 extrapolation.
pub fn apply_h_discrete(sample: &OperatorSample, f: &HalfLineFunction) -> Result<HalfLineFunction> {
    if sample.z_grid.len() != f.z_grid.len() {
        return Err(Error::InvalidArgument(
            "operator sample and function grids differ".into(),
        ));
    }
    let n = f.values.len();
    if n < 8 {
        return Err(Error::Precondition(
            "apply_h_discrete needs at least 8 samples".into(),
        ));
    }
    let h = f.dz();
    if h > MAX_OPERATOR_DZ {
        return Err(Error::GridTooCoarse {
            dz: h,
            limit: MAX_OPERATOR_DZ,
        });
    }
    let u = &f.values;

    // Conditions in the scaled variable s = z / h; the data vector is
    // (bc, f_*) with bc = 0.
    let (rows, data): ([[f64; 6]; 6], [f64; 6]) = match sample.boundary {
        Boundary::Robin => {
            let mut rows = [[0.0; 6]; 6];
            rows[0] = [ROBIN * h, 1.0, 0.0, 0.0, 0.0, 0.0];
            for k in 0..5 {
                rows[k + 1] = value_row(k as f64);
            }
            (rows, [0.0, u[0], u[1], u[2], u[3], u[4]])
        }
        Boundary::Dirichlet => {
            let mut rows = [[0.0; 6]; 6];
            rows[0] = value_row(0.0);
            for k in 1..6 {
                rows[k] = value_row(k as f64);
            }
            (rows, [0.0, u[1], u[2], u[3], u[4], u[5]])
        }
    };
    let ghost = |s: f64| -> Result<f64> {
        let w = extrapolation_weights(&rows, s)?;
        Ok(w.iter().zip(&data).map(|(a, b)| a * b).sum())
    };
    let left = [ghost(-2.0)?, ghost(-1.0)?];

    let tail_rows: [[f64; 6]; 6] = std::array::from_fn(|k| value_row(k as f64));
    let tail_data: [f64; 6] = std::array::from_fn(|k| u[n - 6 + k]);
    let tail = |s: f64| -> Result<f64> {
        let w = extrapolation_weights(&tail_rows, s)?;
        Ok(w.iter().zip(&tail_data).map(|(a, b)| a * b).sum())
    };
    let right = [tail(6.0)?, tail(7.0)?];

    let at = |i: isize| -> f64 {
        if i < 0 {
            left[(i + 2) as usize]
        } else if i as usize >= n {
            right[i as usize - n]
        } else {
            u[i as usize]
        }
    };
    let inv = 1.0 / (12.0 * h * h);
    let values = (0..n as isize)
        .map(|i| {
            let d2 =
                (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) * inv;
            -d2 + sample.potential[i as usize] * at(i)
        })
        .collect();
    HalfLineFunction::new(f.z_grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{u_minus, uniform_grid};

    #[test]
    fn zero_mode_is_annihilated() {
        let grid = uniform_grid(20.0, 0.01).unwrap();
        let f = HalfLineFunction::from_fn(&grid, f0).unwrap();
        let hf = apply_h_discrete(&OperatorSample::new(grid, Boundary::Robin), &f).unwrap();
        assert!(hf.max_abs() < 1e-5, "{}", hf.max_abs());
    }

    #[test]
    fn odd_eigenfunction_eigenrelation() {
        let grid = uniform_grid(15.0, 0.01).unwrap();
        let f = HalfLineFunction::from_fn(&grid, |z| u_minus(z, 2.0).unwrap()).unwrap();
        let hf =
            apply_h_discrete(&OperatorSample::new(grid.clone(), Boundary::Dirichlet), &f).unwrap();
        let diff: Vec<f64> = hf
            .values
            .iter()
            .zip(&f.values)
            .map(|(a, b)| a - 4.0 * b)
            .collect();
        let err = HalfLineFunction::new(grid, diff).unwrap().l2_norm() / (4.0 * f.l2_norm());
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn refuses_coarse_grids() {
        let grid = uniform_grid(10.0, 0.1).unwrap();
        let f = HalfLineFunction::zeros(&grid).unwrap();
        assert!(matches!(
            apply_h_discrete(&OperatorSample::new(grid, Boundary::Robin), &f),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn projecting_the_zero_mode_leaves_nothing() {
        let grid = uniform_grid(30.0, 0.01).unwrap();
        let f = HalfLineFunction::from_fn(&grid, f0).unwrap();
        let g = project_out_zero_mode(&f).unwrap();
        assert!(g.max_abs() < 1e-10);
    }

    #[test]
    fn grid_validation() {
        assert!(HalfLineFunction::new(vec![0.0, 0.1, 0.3], vec![0.0; 3]).is_err());
        assert!(HalfLineFunction::new(vec![0.1, 0.2], vec![0.0; 2]).is_err());
        assert!(HalfLineFunction::new(vec![0.0, 0.1], vec![f64::NAN, 0.0]).is_err());
    }
}
