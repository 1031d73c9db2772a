//! Driven, disordered Dicke model: Liouvillian spectra, dissipative dynamics,
//! dark-state counting from permutation symmetry, and a secular rate equation.
//!
//! Units: every rate, energy and time is expressed in units of the collective
//! decay rate, which is fixed to 1 unless a model says otherwise.

pub mod linalg;
pub mod operators;
pub mod liouvillian;
pub mod dynamics;
pub mod symmetry;
pub mod rateq;
pub mod config;
pub mod commands;

pub use faer::{c64, Mat};

pub use operators::{Boundary, DickeBasis, HalfInt, ModelParams, Operator, SpinOpKind};
pub use liouvillian::{LiouvillianSpectrum, Superoperator};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("atom index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("dense superoperator for N={n} exceeds the supported N<={max}")]
    DimensionOverflow { n: usize, max: usize },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("spectrum not diagonalizable to tolerance: {0}")]
    Defective(String),
    #[error("steady state not unique: {multiplicity} eigenvalues within {tol:e} of zero")]
    DegenerateSteadyState { multiplicity: usize, tol: f64 },
    #[error("step size underflow at t={t} (h={h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("non-integer multiplicity {value} for irrep {irrep} (N={n}, 2j={two_j})")]
    NonIntegerMultiplicity { value: f64, irrep: String, n: usize, two_j: i64 },
    #[error("unresolved degeneracy: dimension {dim} at energy {energy}")]
    UnresolvedDegeneracy { energy: f64, dim: usize },
    #[error("ambiguous null-space gap: singular values {below:e} and {above:e} straddle threshold {threshold:e}")]
    AmbiguousGap { below: f64, above: f64, threshold: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::Config(_) | Error::InvalidLabel(_) => 2,
            Error::UnsupportedGroup(_) | Error::DimensionOverflow { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
