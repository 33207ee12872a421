//! Bessel, Neumann and Hankel functions of small integer order on the
//! logarithmic Riemann surface.
//!
//! Points are carried as [`RiemannPoint`] (modulus plus an unbounded
//! argument), so `log z` and everything built on it is single-valued. Two
//! evaluation paths exist:
//!
//! * power series (`|z| <= 12`), with the Neumann function written out
//!   explicitly through `log z` and harmonic numbers;
//! * the Hankel asymptotic expansion (`|z| > 12`), summed to optimal
//!   truncation in the right half-plane and carried to any other sheet by
//!   the integer-order rotation formulas.

mod asymptotic;
mod hankel;
mod riemann;
mod series;

pub use hankel::{
    bessel_j, bessel_y, hankel, hankel_derivative, hankel_on_sheet, hankel_pair, hankel_scaled,
    hankel_with_path, newton_distance, wronskian_residual, EvalPath, ScaledHankel,
};
pub use riemann::RiemannPoint;

use serde::{Deserialize, Serialize};

/// Complex values returned by every routine in this module.
pub type ComplexValue = num_complex::Complex64;

/// Modulus at which evaluation switches from series to asymptotics.
pub const SWITCHOVER_RADIUS: f64 = 12.0;

/// Largest modulus accepted by the stand-alone series for `J`.
pub const SERIES_LIMIT: f64 = 16.0;

/// Sheets beyond this index are rejected.
pub const MAX_SHEET: i64 = 3;

/// Highest supported integer order.
pub const MAX_ORDER: u32 = 3;

/// `H^(1)` or `H^(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HankelKind {
    First,
    Second,
}

impl HankelKind {
    pub fn from_index(index: u32) -> crate::Result<Self> {
        match index {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            other => Err(crate::Error::InvalidArgument(format!(
                "Hankel kind must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Self::First => 1,
            Self::Second => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::First => Self::Second,
            Self::Second => Self::First,
        }
    }
}

pub(crate) fn check_order(order: u32) -> crate::Result<()> {
    if order > MAX_ORDER {
        return Err(crate::Error::InvalidArgument(format!(
            "order {order} outside the supported range 0..={MAX_ORDER}"
        )));
    }
    Ok(())
}
