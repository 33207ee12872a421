use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Every routine is total over finite inputs: instead of returning NaN or
/// infinity, a failure is reported through one of these variants.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power series not usable at |z| = {modulus} (use the asymptotic path)")]
    SeriesNonConvergence { modulus: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("sheet {sheet} is outside the validated range -3..=3")]
    UnsupportedSheet { sheet: i64 },

    #[error("imaginary residue {residue:e} exceeds tolerance (z = {z}, m = {m})")]
    Realness { residue: f64, z: f64, m: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("even-parity input is not orthogonal to the zero mode (overlap {overlap:e})")]
    DomainViolation { overlap: f64 },

    #[error("grid spacing {dz} exceeds the accuracy limit {limit}")]
    GridTooCoarse { dz: f64, limit: f64 },

    #[error("evaluation point is at a resonance (|H| = {modulus:e})")]
    AtResonance { modulus: f64 },

    #[error("CFL ratio {ratio} exceeds {limit}")]
    Cfl { ratio: f64, limit: f64 },

    #[error("domain half-length {length} is shorter than the required {required}")]
    DomainTooShort { length: f64, required: f64 },

    #[error("Newton iteration did not converge (residual {residual:e} after {steps} steps)")]
    Divergence { residual: f64, steps: usize },

    #[error("iterate drifted from sheet {expected} to sheet {found}")]
    SheetDrift { expected: i64, found: i64 },

    #[error("a zero lies within {distance:e} of the contour")]
    BoundaryZero { distance: f64 },

    #[error("zero count mismatch: contour gives {counted}, list has {listed}")]
    CountMismatch { counted: i64, listed: usize },

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("sinusoid fit residual {residual:e} exceeds 5% of the amplitude {amplitude:e}")]
    Regime { residual: f64, amplitude: f64 },

    #[error("path point within {distance:e} of a Hankel zero")]
    NearZero { distance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
