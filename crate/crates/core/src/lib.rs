//! Spectral toolkit for the brane-world master wave equation with the
//! volcano potential `(15/4)(1+|z|)^{-2} - 3 delta_0(z)`.

pub mod brane;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod quadrature;
pub mod resolvent;
pub mod resonance;
pub mod scattering;
pub mod special;
pub mod spectrum;
pub mod transform;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Parity sector in the transverse coordinate `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "+" => Ok(Parity::Even),
            "odd" | "-" => Ok(Parity::Odd),
            other => Err(Error::InvalidArgument(format!("unknown parity '{other}'"))),
        }
    }
}
