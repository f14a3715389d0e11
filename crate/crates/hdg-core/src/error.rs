//! Crate-wide error type.

use crate::expr::{EvalError, ParseError};

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Inverse of the zero quaternion.
    #[error("the zero quaternion has no inverse")]
    ZeroInverse,

    /// A basis was requested from the zero quaternion.
    #[error("the zero quaternion does not induce a basis")]
    ZeroBasis,

    /// The vector part vanishes, so the quaternion has no imaginary unit.
    #[error("degenerate direction: the vector part is zero")]
    DegenerateDirection,

    /// An angle argument was outside its admissible range.
    #[error("angle {name} = {value} outside [{min}, {max}]")]
    AngleRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A polar-coordinate factor vanishes at the evaluation point.
    #[error("coordinate singularity: {factor} vanishes at the evaluation point")]
    CoordinateSingularity { factor: &'static str },

    /// A constraint failed the regularity threshold.
    #[error("non-regular constraint: |q_{param}| = {norm:e} is below the regularity threshold")]
    NotRegular { param: &'static str, norm: f64 },

    /// Normal or binormal requested where curvature or torsion vanishes.
    #[error("undefined frame: {quantity} vanishes at the evaluation point")]
    UndefinedFrame { quantity: &'static str },

    /// A frame field was expected to be unit-norm.
    #[error("frame is not unit: |u| = {norm}")]
    NonUnitFrame { norm: f64 },

    /// A rotation quaternion was expected to be unit-norm.
    #[error("rotation quaternion is not unit: |u| = {norm}")]
    NonUnitRotation { norm: f64 },

    /// Differentiation encountered a non-finite value.
    #[error("non-finite value while differentiating near the evaluation point")]
    NonFinite,

    /// The differentiation step must be positive.
    #[error("differentiation step must be positive, got {0}")]
    InvalidStep(f64),

    /// Exact differentiation requested on a field without an expression backend.
    #[error("exact differentiation requires an expression-backed field")]
    ExactUnavailable,

    /// Expression parse failure.
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// Expression evaluation failure.
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
