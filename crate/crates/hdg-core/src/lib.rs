//! Quaternionic differential geometry toolkit.
//!
//! The crate provides quaternion algebra in Cartesian, polar, and symplectic
//! notations; a quaternionic gradient calculus with Cauchy-Riemann-type
//! regularity rows in both coordinate systems; Frenet-style curvature and
//! torsion data for quaternion-valued constraints of one to three
//! parameters; dual 1-forms, connections, and structural-equation residuals;
//! and a small noncommutative expression language that powers exact
//! forward-mode differentiation.

pub mod calculus;
pub mod constraints;
pub mod error;
pub mod expr;
pub mod field;
pub mod forms;
pub mod polar;
pub mod quat;
pub mod symplectic;

pub use constraints::{Constraint, FrenetData, RegularityReport};
pub use error::{Error, Result};
pub use field::{CoordSystem, DiffConfig, DiffScheme, Point4, QuaternionField};
pub use forms::UnitFrame;
pub use polar::{PolarFrame, PolarQuaternion};
pub use quat::{
    component_matrix, induced_basis, inner, is_orthogonal, is_parallel, omega_of, Matrix4,
    Quaternion,
};
pub use symplectic::{SymplecticPolar, SymplecticQuaternion};
