use std::f64::consts::PI;

use num_complex::Complex64;

use super::asymptotic;
use super::series::{bessel_j_series, bessel_y_series};
use super::{check_order, HankelKind, RiemannPoint, MAX_SHEET, SERIES_LIMIT, SWITCHOVER_RADIUS};
use crate::{Error, Result};

/// Which evaluation route to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    /// Series below the switchover radius, asymptotics above.
    Auto,
    Series,
    Asymptotic,
}

/// `value = mantissa * exp(exponent)`, used where `e^{|Im z|}` would
/// overflow or lose the recessive factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledHankel {
    pub mantissa: Complex64,
    pub exponent: Complex64,
}

impl ScaledHankel {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.exponent.exp()
    }
}

fn check_sheet(z: &RiemannPoint) -> Result<()> {
    let sheet = z.sheet_index();
    if sheet.abs() > MAX_SHEET {
        return Err(Error::UnsupportedSheet { sheet });
    }
    Ok(())
}

fn finite(v: Complex64, what: &str, z: &RiemannPoint) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() && v.norm() < 1e300 {
        Ok(v)
    } else {
        Err(Error::Range(format!(
            "{what} not representable at |z| = {:e}, arg z = {}",
            z.modulus(),
            z.argument()
        )))
    }
}

fn series_pair(n: u32, z: &RiemannPoint) -> Result<(Complex64, Complex64)> {
    let zp = z.principal_value();
    let (j, ok_j) = bessel_j_series(n, zp);
    let (y, ok_y) = bessel_y_series(n, z);
    if !(ok_j && ok_y) {
        return Err(Error::SeriesNonConvergence {
            modulus: z.modulus(),
        });
    }
    let iy = Complex64::i() * y;
    Ok((j + iy, j - iy))
}

/// Reduces the argument to `theta' + k pi` with `|theta'| <= pi/2`.
fn reduce(z: &RiemannPoint) -> (i64, Complex64) {
    let k = (z.argument() / PI).round();
    let reduced = Complex64::from_polar(z.modulus(), z.argument() - k * PI);
    (k as i64, reduced)
}

/// Integer-order continuation `H(z e^{k pi i})` from `H1(z)`, `H2(z)`.
fn rotate(n: u32, k: i64, h1: Complex64, h2: Complex64) -> (Complex64, Complex64) {
    let sign = if (k * i64::from(n)).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let kf = k as f64;
    let r1 = (h1 * (1.0 - kf) - h2 * kf) * sign;
    let r2 = (h2 * (1.0 + kf) + h1 * kf) * sign;
    (r1, r2)
}

fn asymptotic_pair(n: u32, z: &RiemannPoint) -> (Complex64, Complex64) {
    let (k, reduced) = reduce(z);
    let (h1, h2) = asymptotic::pair(n, reduced);
    rotate(n, k, h1, h2)
}

fn pair_with_path(n: u32, z: &RiemannPoint, path: EvalPath) -> Result<(Complex64, Complex64)> {
    check_order(n)?;
    check_sheet(z)?;
    let (h1, h2) = match path {
        EvalPath::Series => series_pair(n, z)?,
        EvalPath::Asymptotic => asymptotic_pair(n, z),
        EvalPath::Auto if z.modulus() <= SWITCHOVER_RADIUS => series_pair(n, z)?,
        EvalPath::Auto => asymptotic_pair(n, z),
    };
    Ok((finite(h1, "H^(1)", z)?, finite(h2, "H^(2)", z)?))
}

/// `(H^(1)_n(z), H^(2)_n(z))`.
pub fn hankel_pair(order: u32, z: &RiemannPoint) -> Result<(Complex64, Complex64)> {
    pair_with_path(order, z, EvalPath::Auto)
}

pub fn hankel(kind: HankelKind, order: u32, z: &RiemannPoint) -> Result<Complex64> {
    hankel_with_path(kind, order, z, EvalPath::Auto)
}

/// Hankel function through a forced evaluation route (for overlap checks).
pub fn hankel_with_path(
    kind: HankelKind,
    order: u32,
    z: &RiemannPoint,
    path: EvalPath,
) -> Result<Complex64> {
    let (h1, h2) = pair_with_path(order, z, path)?;
    Ok(match kind {
        HankelKind::First => h1,
        HankelKind::Second => h2,
    })
}

/// `J_n(z)` by its power series.
pub fn bessel_j(order: u32, z: Complex64) -> Result<Complex64> {
    check_order(order)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    if z.norm() > SERIES_LIMIT {
        return Err(Error::SeriesNonConvergence { modulus: z.norm() });
    }
    let (j, ok) = bessel_j_series(order, z);
    if !ok {
        return Err(Error::SeriesNonConvergence { modulus: z.norm() });
    }
    Ok(j)
}

/// `Y_n(z)` with `log z` taken from the surface argument.
pub fn bessel_y(order: u32, z: &RiemannPoint) -> Result<Complex64> {
    check_order(order)?;
    check_sheet(z)?;
    let y = if z.modulus() <= SWITCHOVER_RADIUS {
        let (y, ok) = bessel_y_series(order, z);
        if !ok {
            return Err(Error::SeriesNonConvergence {
                modulus: z.modulus(),
            });
        }
        y
    } else {
        let (h1, h2) = asymptotic_pair(order, z);
        (h1 - h2) / (2.0 * Complex64::i())
    };
    finite(y, "Y", z)
}

/// `H^(kind)_n` on any validated sheet, composed only from principal-sheet
/// values through the continuation relation
/// `H1(z e^{-i m pi}) = (-1)^{m n} ((m+1) H1(z) + m conj(H1(conj z)))`.
///
/// Kind 2 follows from `H2(z) = conj(H1(conj z))` on the surface.
pub fn hankel_on_sheet(kind: HankelKind, order: u32, z: &RiemannPoint) -> Result<Complex64> {
    check_order(order)?;
    check_sheet(z)?;
    match kind {
        HankelKind::First => {
            let sheet = z.sheet_index();
            let principal = RiemannPoint::new(z.modulus(), z.principal_argument())?;
            let h = hankel(HankelKind::First, order, &principal)?;
            if sheet == 0 {
                return Ok(h);
            }
            let mirrored = hankel(HankelKind::First, order, &principal.conj())?.conj();
            let m = -2 * sheet;
            // m is even, so (-1)^{m n} = 1.
            let v = h * (m + 1) as f64 + mirrored * m as f64;
            finite(v, "H^(1)", z)
        }
        HankelKind::Second => Ok(hankel_on_sheet(HankelKind::First, order, &z.conj())?.conj()),
    }
}

/// `d/dz H^(kind)_n(z)` from the order recurrence.
pub fn hankel_derivative(kind: HankelKind, order: u32, z: &RiemannPoint) -> Result<Complex64> {
    check_order(order)?;
    if order == 0 {
        return Ok(-hankel(kind, 1, z)?);
    }
    let lower = hankel(kind, order - 1, z)?;
    let h = hankel(kind, order, z)?;
    finite(lower - h * f64::from(order) / z.principal_value(), "H'", z)
}

/// `|H| / |H'|`, the Newton step length to the nearest zero.
pub fn newton_distance(kind: HankelKind, order: u32, z: &RiemannPoint) -> Result<f64> {
    let h = hankel(kind, order, z)?;
    let dh = hankel_derivative(kind, order, z)?;
    Ok(h.norm() / dh.norm())
}

/// Exponent-factored Hankel value. In the right half-plane beyond the
/// switchover radius the exponent is `+iz` (kind 1) or `-iz` (kind 2);
/// elsewhere the exponent is zero.
pub fn hankel_scaled(kind: HankelKind, order: u32, z: &RiemannPoint) -> Result<ScaledHankel> {
    check_order(order)?;
    check_sheet(z)?;
    let zp = z.principal_value();
    let right_half = z.argument().abs() <= PI / 2.0;
    if z.modulus() > SWITCHOVER_RADIUS && right_half {
        let (s1, s2) = asymptotic::scaled_pair(order, zp);
        let iz = Complex64::i() * zp;
        return Ok(match kind {
            HankelKind::First => ScaledHankel {
                mantissa: s1,
                exponent: iz,
            },
            HankelKind::Second => ScaledHankel {
                mantissa: s2,
                exponent: -iz,
            },
        });
    }
    Ok(ScaledHankel {
        mantissa: hankel(kind, order, z)?,
        exponent: Complex64::new(0.0, 0.0),
    })
}

/// Largest scaled Wronskian defect
/// `|H1 H2' - H2 H1' + 4i/(pi z)| * |z|` over order 1 and 2 on `grid`.
pub fn wronskian_residual(grid: &[RiemannPoint]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Precondition("empty grid".into()));
    }
    let mut worst: f64 = 0.0;
    for z in grid {
        for order in 1..=2 {
            let (h1, h2) = hankel_pair(order, z)?;
            let d1 = hankel_derivative(HankelKind::First, order, z)?;
            let d2 = hankel_derivative(HankelKind::Second, order, z)?;
            let zp = z.principal_value();
            let target = Complex64::new(0.0, -4.0 / PI) / zp;
            let defect = (h1 * d2 - h2 * d1 - target).norm() * z.modulus();
            worst = worst.max(defect);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(re: f64, im: f64) -> RiemannPoint {
        RiemannPoint::from_complex(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn rotation_matches_series_off_the_principal_half_plane() {
        // |z| = 11 is inside the series disc; the asymptotic path with
        // rotation must agree there to the truncation error.
        for n in 0..=3 {
            for &arg in &[2.5, -2.8, 3.1, -4.0, 5.5] {
                let z = RiemannPoint::new(13.5, arg).unwrap();
                let a = pair_with_path(n, &z, EvalPath::Asymptotic).unwrap();
                let s = pair_with_path(n, &z, EvalPath::Series).unwrap();
                let scale = a.0.norm().max(a.1.norm());
                assert!((a.0 - s.0).norm() / scale < 1e-8, "n={n} arg={arg}");
                assert!((a.1 - s.1).norm() / scale < 1e-8, "n={n} arg={arg}");
            }
        }
    }

    #[test]
    fn sheet_relation_matches_direct_log_evaluation() {
        for &(r, a) in &[(0.7, -2.0 * PI + 0.9), (2.5, -3.5), (5.0, 2.0 * PI - 1.0)] {
            let z = RiemannPoint::new(r, a).unwrap();
            let direct = hankel(HankelKind::First, 1, &z).unwrap();
            let relation = hankel_on_sheet(HankelKind::First, 1, &z).unwrap();
            assert!((direct - relation).norm() < 1e-11 * direct.norm().max(1.0));
            let direct2 = hankel(HankelKind::Second, 2, &z).unwrap();
            let relation2 = hankel_on_sheet(HankelKind::Second, 2, &z).unwrap();
            assert!((direct2 - relation2).norm() < 1e-11 * direct2.norm().max(1.0));
        }
    }

    #[test]
    fn scaled_value_reconstructs() {
        let z = rp(20.0, 3.0);
        for kind in [HankelKind::First, HankelKind::Second] {
            let s = hankel_scaled(kind, 2, &z).unwrap();
            let v = hankel(kind, 2, &z).unwrap();
            assert!((s.value() - v).norm() < 1e-12 * v.norm());
        }
    }

    #[test]
    fn rejects_far_sheets_and_orders() {
        let z = RiemannPoint::new(1.0, 9.0 * PI).unwrap();
        assert_eq!(
            hankel(HankelKind::First, 1, &z),
            Err(Error::UnsupportedSheet { sheet: 4 })
        );
        assert!(hankel(HankelKind::First, 4, &rp(1.0, 0.0)).is_err());
    }

    #[test]
    fn j_series_refuses_large_argument() {
        assert!(matches!(
            bessel_j(1, Complex64::new(30.0, 0.0)),
            Err(Error::SeriesNonConvergence { .. })
        ));
        assert!(bessel_j(1, Complex64::new(f64::NAN, 0.0)).is_err());
    }
}
