//! Green kernels of `(h_+- - m^2)^{-1}` on the half line, the truncated
//! 4-D resolvent kernel, and a tridiagonal direct solve used as an
//! independent check.
//!
//! With `s = 1 + z`, `s< = 1 + min(z, z')`, `s> = 1 + max(z, z')`,
//!
//! `K_nu(m; z, z') = (pi/4i) sqrt(s< s>)
//!     [H^(2)_nu(m) H^(1)_2(m s<) - H^(1)_nu(m) H^(2)_2(m s<)] H^(1)_2(m s>)`,
//!
//! the odd kernel is `K_- = K_2 / H^(1)_2(m)` and the even kernel is
//! `K_+ = K_1 / H^(1)_1(m)`. The bracket with order-1 factors in `m` is the
//! solution obeying `u'(0) + (3/2) u(0) = 0`, since
//! `d/dz [sqrt(s) H_2(m s)] + (3/2) sqrt(s) H_2(m s) = m H_1(m)` at `z = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quadrature::adaptive_integrate;
use crate::special::{hankel, hankel_scaled, newton_distance, HankelKind, RiemannPoint};
use crate::spectrum::{potential, ROBIN};
use crate::transform::HalfLineFunction;
use crate::{Error, Parity, Result};

/// Denominators `|H^(1)_nu(m)|` below this are treated as resonances.
pub const RESONANCE_THRESHOLD: f64 = 1e-8;

/// Smallest `Im m` accepted by [`resolvent_direct_solve`].
pub const DIRECT_MIN_IM: f64 = 0.1;

/// Closest approach of a continuation path to a Hankel zero.
pub const PATH_CLEARANCE: f64 = 1e-3;

/// One evaluation of a parity kernel in the `L^2` regime `Im m > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventQuery {
    pub m: Complex64,
    pub parity: Parity,
    pub z: f64,
    pub z_prime: f64,
}

/// Complex samples on a half-line grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexProfile {
    pub z_grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ComplexProfile {
    pub fn l2_norm(&self) -> f64 {
        let dz = self.z_grid[1] - self.z_grid[0];
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        crate::quadrature::trapezoid(&sq, dz).sqrt()
    }

    /// `||self - other|| / ||other||` on the common grid.
    pub fn relative_l2(&self, other: &Self) -> Result<f64> {
        if self.z_grid != other.z_grid {
            return Err(Error::InvalidArgument(
                "profiles live on different grids".into(),
            ));
        }
        let diff = Self {
            z_grid: self.z_grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        };
        Ok(diff.l2_norm() / other.l2_norm())
    }

    pub fn re(&self) -> Result<HalfLineFunction> {
        HalfLineFunction::new(
            self.z_grid.clone(),
            self.values.iter().map(|v| v.re).collect(),
        )
    }

    pub fn im(&self) -> Result<HalfLineFunction> {
        HalfLineFunction::new(
            self.z_grid.clone(),
            self.values.iter().map(|v| v.im).collect(),
        )
    }
}

fn check_positions(z: f64, z_prime: f64) -> Result<()> {
    if !(z >= 0.0 && z_prime >= 0.0 && z.is_finite() && z_prime.is_finite()) {
        return Err(Error::InvalidArgument(
            "kernel positions must be finite and >= 0".into(),
        ));
    }
    Ok(())
}

fn upper_half(m: Complex64) -> Result<RiemannPoint> {
    if !(m.im > 0.0 && m.re.is_finite() && m.im.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need Im m > 0, got m = {m}"
        )));
    }
    RiemannPoint::from_complex(m)
}

/// `K_nu(m; z, z')` on the surface. Each product is formed from
/// exponent-factored Hankel values so that the growing and decaying
/// exponentials cancel before exponentiation.
pub fn kernel_bracket(nu: u32, m: &RiemannPoint, z: f64, z_prime: f64) -> Result<Complex64> {
    check_positions(z, z_prime)?;
    if !(nu == 1 || nu == 2) {
        return Err(Error::InvalidArgument(format!(
            "bracket order must be 1 or 2, got {nu}"
        )));
    }
    let (lo, hi) = (1.0 + z.min(z_prime), 1.0 + z.max(z_prime));
    let first = HankelKind::First;
    let second = HankelKind::Second;
    let a_lo = hankel_scaled(first, 2, &m.scale(lo)?)?;
    let b_lo = hankel_scaled(second, 2, &m.scale(lo)?)?;
    let hi_h = hankel_scaled(first, 2, &m.scale(hi)?)?;
    let h1m = hankel(first, nu, m)?;
    let h2m = hankel(second, nu, m)?;
    let term_a = h2m * a_lo.mantissa * hi_h.mantissa * (a_lo.exponent + hi_h.exponent).exp();
    let term_b = h1m * b_lo.mantissa * hi_h.mantissa * (b_lo.exponent + hi_h.exponent).exp();
    let v = (term_a - term_b) * (lo * hi).sqrt() * Complex64::new(0.0, -PI / 4.0);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Range(format!(
            "kernel not representable at z = {z}, z' = {z_prime}"
        )));
    }
    Ok(v)
}

/// The shared kernel `K_2(m; z, z')`, `Im m > 0`.
pub fn kernel_core(m: Complex64, z: f64, z_prime: f64) -> Result<Complex64> {
    kernel_bracket(2, &upper_half(m)?, z, z_prime)
}

fn parity_order(parity: Parity) -> u32 {
    match parity {
        Parity::Even => 1,
        Parity::Odd => 2,
    }
}

/// `K_+-(m; z, z')` at any surface point away from the zeros of the
/// denominator `H^(1)_nu(m)`.
pub fn kernel_parity_on(
    parity: Parity,
    m: &RiemannPoint,
    z: f64,
    z_prime: f64,
) -> Result<Complex64> {
    let nu = parity_order(parity);
    let denominator = hankel(HankelKind::First, nu, m)?;
    if denominator.norm() < RESONANCE_THRESHOLD {
        return Err(Error::AtResonance {
            modulus: denominator.norm(),
        });
    }
    Ok(kernel_bracket(nu, m, z, z_prime)? / denominator)
}

/// The parity kernel in the resolvent regime `Im m > 0`.
pub fn kernel_parity(q: &ResolventQuery) -> Result<Complex64> {
    kernel_parity_on(q.parity, &upper_half(q.m)?, q.z, q.z_prime)
}

/// `u(z) = int_0^L K(m; z, z') f(z') dz'` by the trapezoid rule on the grid
/// of `f`.
pub fn apply_kernel(parity: Parity, m: Complex64, f: &HalfLineFunction) -> Result<ComplexProfile> {
    let point = upper_half(m)?;
    let z = &f.z_grid;
    let dz = f.dz();
    let n = z.len();
    let support: Vec<usize> = (0..n).filter(|&j| f.values[j] != 0.0).collect();
    let values = z
        .par_iter()
        .map(|&zi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &j in &support {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                acc += kernel_parity_on(parity, &point, zi, z[j])? * (w * f.values[j]);
            }
            Ok(acc * dz)
        })
        .collect::<Result<_>>()?;
    Ok(ComplexProfile {
        z_grid: z.clone(),
        values,
    })
}

/// `(h - m^2) u` by the fourth-order operator stencil, applied to the real
/// and imaginary parts.
pub fn apply_shifted_operator(
    parity: Parity,
    m: Complex64,
    u: &ComplexProfile,
) -> Result<ComplexProfile> {
    use crate::spectrum::{Boundary, OperatorSample};
    use crate::transform::apply_h_discrete;
    let sample = OperatorSample::new(u.z_grid.clone(), Boundary::for_parity(parity));
    let hr = apply_h_discrete(&sample, &u.re()?)?;
    let hi = apply_h_discrete(&sample, &u.im()?)?;
    let m2 = m * m;
    let values = (0..u.values.len())
        .map(|i| Complex64::new(hr.values[i], hi.values[i]) - m2 * u.values[i])
        .collect();
    Ok(ComplexProfile {
        z_grid: u.z_grid.clone(),
        values,
    })
}

/// Second-order finite-difference solve of `(h_+- - m^2) u = f` on the grid
/// of `f`, with `u(L) = 0` at the last node. The Robin condition enters
/// through the ghost value `u_{-1} = u_1 + 3 dz u_0`; the odd sector pins
/// `u_0 = 0`.
pub fn resolvent_direct_solve(
    parity: Parity,
    m: Complex64,
    f: &HalfLineFunction,
) -> Result<ComplexProfile> {
    if !(m.im >= DIRECT_MIN_IM) {
        return Err(Error::Precondition(format!(
            "direct solve needs Im m >= {DIRECT_MIN_IM}"
        )));
    }
    let z = &f.z_grid;
    let length = *z.last().expect("nonempty grid");
    if length < 10.0 / m.im {
        return Err(Error::Precondition(format!(
            "grid length {length} is below 10 / Im m = {}",
            10.0 / m.im
        )));
    }
    let n = z.len();
    let dz = f.dz();
    let inv = 1.0 / (dz * dz);
    let m2 = m * m;
    let start = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    // Unknowns u_start .. u_{n-2}.
    let size = n - 1 - start;
    let mut lower = vec![Complex64::new(0.0, 0.0); size];
    let mut diag = vec![Complex64::new(0.0, 0.0); size];
    let mut upper = vec![Complex64::new(0.0, 0.0); size];
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];
    for k in 0..size {
        let i = k + start;
        diag[k] = Complex64::from(2.0 * inv + potential(z[i])) - m2;
        lower[k] = Complex64::from(-inv);
        upper[k] = Complex64::from(-inv);
        rhs[k] = Complex64::from(f.values[i]);
    }
    if parity == Parity::Even {
        // -(u_{-1} - 2 u_0 + u_1)/dz^2 with u_{-1} = u_1 + 2 ROBIN dz u_0.
        diag[0] -= 2.0 * ROBIN * dz * inv;
        upper[0] = Complex64::from(-2.0 * inv);
    }
    let solution = thomas(&lower, &diag, &upper, &rhs)?;
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    values[start..n - 1].copy_from_slice(&solution);
    Ok(ComplexProfile {
        z_grid: z.clone(),
        values,
    })
}

/// Complex tridiagonal solve without pivoting.
fn thomas(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let scale = diag.iter().fold(0.0, |a: f64, d| a.max(d.norm()));
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i] * c[i - 1];
        }
        if pivot.norm() < 1e-14 * scale {
            return Err(Error::IllConditioned(format!("vanishing pivot at row {i}")));
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i]
            - if i > 0 {
                lower[i] * d[i - 1]
            } else {
                Complex64::new(0.0, 0.0)
            })
            / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] = x[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

/// `sqrt(w)` with `0 <= arg sqrt(w) < pi` for `0 <= arg w < 2 pi`.
pub fn upper_sqrt(w: Complex64) -> Complex64 {
    let (r, mut theta) = w.to_polar();
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    Complex64::from_polar(r.sqrt(), 0.5 * theta)
}

/// Truncated 4-D resolvent kernel
/// `int_0^R sin(r d)/(4 pi^2 d) [K_+(mu; z, z') + sign K_-(mu; z, z')] r dr`,
/// `mu = sqrt(lambda^2 - r^2)`, `d = |x - x'|`, `sign = +1` when the two
/// points lie on the same side of the brane. `z`, `z_prime` are `|z|`,
/// `|z'|`. Integrated by adaptive Gauss-Kronrod with the panel split at
/// `r = |Re lambda|`, where `mu` is smallest.
pub fn truncated_kernel_4d(
    lambda: Complex64,
    radius: f64,
    x_dist: f64,
    z: f64,
    z_prime: f64,
    same_side: bool,
) -> Result<Complex64> {
    let arg = lambda.arg();
    if !(arg > 0.0 && arg < PI) {
        return Err(Error::InvalidArgument("need 0 < arg lambda < pi".into()));
    }
    if !(radius >= 0.0 && radius.is_finite() && x_dist >= 0.0 && x_dist.is_finite()) {
        return Err(Error::InvalidArgument(
            "R and |x - x'| must be finite and >= 0".into(),
        ));
    }
    check_positions(z, z_prime)?;
    if radius == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sign = if same_side { 1.0 } else { -1.0 };
    let lambda2 = lambda * lambda;
    let mut err = None;
    let integrand = |r: f64| -> Complex64 {
        let radial = if x_dist == 0.0 {
            r
        } else {
            (r * x_dist).sin() / x_dist
        };
        let value = (|| -> Result<Complex64> {
            let mu = RiemannPoint::from_complex(upper_sqrt(lambda2 - r * r))?;
            let even = kernel_parity_on(Parity::Even, &mu, z, z_prime)?;
            let odd = kernel_parity_on(Parity::Odd, &mu, z, z_prime)?;
            Ok((even + odd * sign) * (radial * r / (4.0 * PI * PI)))
        })();
        value.unwrap_or_else(|e| {
            err.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        })
    };
    let split = lambda.re.abs();
    let breakpoints: Vec<f64> = if split > 0.0 && split < radius {
        vec![0.0, split, radius]
    } else {
        vec![0.0, radius]
    };
    let result = adaptive_integrate(integrand, &breakpoints, 1e-8, 1e-14, 2000)?;
    if let Some(e) = err {
        return Err(e);
    }
    if !result.converged {
        return Err(Error::Range(format!(
            "r-integral did not reach tolerance (error {:e})",
            result.error
        )));
    }
    Ok(result.value)
}

/// Parity kernel at fixed `(z, z')` along a path on the surface, used to
/// exhibit the continuation into `Im m < 0` and onto other sheets. Points
/// within [`PATH_CLEARANCE`] (Newton distance) of a zero of the denominator
/// are rejected.
pub fn continuation_probe(
    parity: Parity,
    path: &[RiemannPoint],
    z: f64,
    z_prime: f64,
) -> Result<Vec<Complex64>> {
    let nu = parity_order(parity);
    path.iter()
        .map(|m| {
            let distance = newton_distance(HankelKind::First, nu, m)?;
            if distance < PATH_CLEARANCE {
                return Err(Error::NearZero { distance });
            }
            kernel_parity_on(parity, m, z, z_prime)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Complex64 {
        Complex64::new(1.0, 0.5)
    }

    #[test]
    fn bracket_vanishes_on_the_diagonal_at_the_brane() {
        assert!(kernel_core(m(), 0.0, 0.0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn kernel_is_symmetric() {
        for p in Parity::BOTH {
            let q = |z, zp| {
                kernel_parity(&ResolventQuery {
                    m: m(),
                    parity: p,
                    z,
                    z_prime: zp,
                })
                .unwrap()
            };
            assert_eq!(q(1.0, 2.0), q(2.0, 1.0));
        }
    }

    #[test]
    fn rejects_real_mass() {
        assert!(kernel_core(Complex64::new(1.0, 0.0), 1.0, 2.0).is_err());
        assert!(kernel_core(m(), -1.0, 2.0).is_err());
    }

    #[test]
    fn upper_sqrt_branch() {
        let s = upper_sqrt(Complex64::new(1.0, -1e-12));
        assert!(s.re < 0.0 && s.im >= 0.0);
        assert!((upper_sqrt(Complex64::new(4.0, 0.0)) - 2.0).norm() < 1e-15);
        let w = Complex64::new(-3.0, 0.5);
        assert!((upper_sqrt(w).powi(2) - w).norm() < 1e-14);
    }

    #[test]
    fn thomas_solves_a_small_system() {
        let one = Complex64::new(1.0, 0.0);
        let lower = vec![one; 3];
        let diag = vec![one * 4.0; 3];
        let upper = vec![one; 3];
        let x = vec![one, Complex64::new(0.0, 2.0), -one];
        let rhs: Vec<Complex64> = (0..3)
            .map(|i| {
                diag[i] * x[i]
                    + if i > 0 {
                        lower[i] * x[i - 1]
                    } else {
                        0.0 * one
                    }
                    + if i < 2 {
                        upper[i] * x[i + 1]
                    } else {
                        0.0 * one
                    }
            })
            .collect();
        let y = thomas(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
