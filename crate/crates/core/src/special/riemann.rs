use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of the logarithmic Riemann surface over `C*`.
///
/// Sheet `s` holds the arguments in `(-pi + 2 pi s, pi + 2 pi s]`, so the
/// principal sheet is `s = 0` and `(-3 pi, -pi]` is sheet `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannPoint {
    modulus: f64,
    argument: f64,
}

impl RiemannPoint {
    pub fn new(modulus: f64, argument: f64) -> Result<Self> {
        if !(modulus.is_finite() && modulus > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "modulus must be positive and finite, got {modulus}"
            )));
        }
        if !argument.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "argument must be finite, got {argument}"
            )));
        }
        Ok(Self { modulus, argument })
    }

    /// Principal-sheet lift of a nonzero complex number.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::on_sheet(z, 0)
    }

    /// Lift of `z` onto `sheet`, i.e. argument `arg z + 2 pi sheet`.
    pub fn on_sheet(z: Complex64, sheet: i64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite point {z}")));
        }
        let (r, theta) = z.to_polar();
        // to_polar maps the negative real axis to +pi when im == +0.0 and to
        // -pi when im == -0.0; the principal sheet owns +pi.
        let theta = if theta == -PI { PI } else { theta };
        Self::new(r, theta + 2.0 * PI * sheet as f64)
    }

    /// Positive real point on the principal sheet.
    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn sheet_index(&self) -> i64 {
        ((self.argument - PI) / (2.0 * PI)).ceil() as i64
    }

    /// Argument wrapped into `(-pi, pi]`.
    pub fn principal_argument(&self) -> f64 {
        self.argument - 2.0 * PI * self.sheet_index() as f64
    }

    pub fn principal_value(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.principal_argument())
    }

    /// `log z` with the full (unwrapped) argument.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.modulus.ln(), self.argument)
    }

    /// Multiplication by a positive real factor (stays on the same sheet).
    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.modulus * factor, self.argument)
    }

    /// Surface product: moduli multiply, arguments add.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(self.modulus * other.modulus, self.argument + other.argument)
    }

    /// Surface conjugate: argument negated, so sheet `s` maps to `-s`.
    pub fn conj(&self) -> Self {
        Self {
            modulus: self.modulus,
            argument: -self.argument,
        }
    }

    /// Rotation `z e^{i angle}` tracked on the surface.
    pub fn rotate(&self, angle: f64) -> Result<Self> {
        Self::new(self.modulus, self.argument + angle)
    }

    /// Moves continuously to the nearby complex point `target`, adding the
    /// short-way argument increment. Used to track iterates across cuts.
    pub fn track_to(&self, target: Complex64) -> Result<Self> {
        if target == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidArgument(
                "cannot track onto the origin".into(),
            ));
        }
        let step = (target / self.principal_value()).arg();
        Self::new(target.norm(), self.argument + step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sheet_labels() {
        let p = RiemannPoint::new(1.0, PI).unwrap();
        assert_eq!(p.sheet_index(), 0);
        let p = RiemannPoint::new(1.0, -PI).unwrap();
        assert_eq!(p.sheet_index(), -1);
        let p = RiemannPoint::new(1.0, -3.0 * PI + 1e-9).unwrap();
        assert_eq!(p.sheet_index(), -1);
        let p = RiemannPoint::new(1.0, 0.0).unwrap();
        assert_eq!(p.sheet_index(), 0);
        let p = RiemannPoint::new(1.0, 3.5 * PI).unwrap();
        assert_eq!(p.sheet_index(), 2);
    }

    #[test]
    fn principal_value_wraps() {
        let p = RiemannPoint::new(2.0, 0.5 - 2.0 * PI).unwrap();
        assert!((p.principal_argument() - 0.5).abs() < 1e-14);
        assert!((p.principal_value() - Complex64::from_polar(2.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn origin_is_excluded() {
        assert!(RiemannPoint::new(0.0, 0.0).is_err());
        assert!(RiemannPoint::from_complex(Complex64::new(0.0, 0.0)).is_err());
        assert!(RiemannPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn on_sheet_round_trip() {
        let z = Complex64::new(0.333, 0.413);
        let p = RiemannPoint::on_sheet(z, -1).unwrap();
        assert_eq!(p.sheet_index(), -1);
        assert!((p.principal_value() - z).norm() < 1e-14);
    }

    #[test]
    fn tracking_crosses_the_cut() {
        let p = RiemannPoint::from_complex(Complex64::new(-1.0, 1e-3)).unwrap();
        let q = p.track_to(Complex64::new(-1.0, -1e-3)).unwrap();
        assert_eq!(q.sheet_index(), 1);
    }
}
