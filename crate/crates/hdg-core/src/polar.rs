//! Polar notation `q = rho (cos(theta) + I sin(theta))`.
//!
//! The unit `I = cos(phi) i + sin(phi) e^{i xi} j` carries the direction of
//! the vector part; its angular derivatives generate the rest of the frame
//! `{1, I, J, K}`, which satisfies the same multiplication table as
//! `{1, i, j, k}`. Since the sine coefficient is kept nonnegative
//! (`theta` in `[0, pi]`), sign flips from angle addition are absorbed by
//! flipping the imaginary unit rather than by extending the angle range.

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Which angles of a polar decomposition are undefined (and were set to 0).
///
/// `theta` is undefined only for the zero quaternion; `phi` and `xi` are
/// undefined when `sin(theta) = 0`; `xi` alone when `sin(phi) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PolarDegeneracy {
    pub theta: bool,
    pub phi: bool,
    pub xi: bool,
}

impl PolarDegeneracy {
    pub fn any(&self) -> bool {
        self.theta || self.phi || self.xi
    }
}

/// Polar form of a quaternion: `rho`, `theta` in `[0, pi]`, `phi` in
/// `[0, pi]`, `xi` in `[0, 2*pi)`, plus degeneracy flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarQuaternion {
    pub rho: f64,
    pub theta: f64,
    pub phi: f64,
    pub xi: f64,
    pub degenerate: PolarDegeneracy,
}

fn wrap_angle_2pi(a: f64) -> f64 {
    let mut v = a.rem_euclid(TAU);
    if v >= TAU {
        v = 0.0;
    }
    v
}

/// Decompose `q` into polar form. Undefined angles are set to 0 and flagged.
pub fn to_polar(q: Quaternion) -> PolarQuaternion {
    let rho = q.norm();
    let vec_norm = q.vector_norm();
    let jk_norm = (q.x2 * q.x2 + q.x3 * q.x3).sqrt();

    let mut deg = PolarDegeneracy::default();
    let theta = if rho == 0.0 {
        deg.theta = true;
        deg.phi = true;
        deg.xi = true;
        0.0
    } else {
        f64::atan2(vec_norm, q.x0)
    };
    let phi = if vec_norm == 0.0 {
        deg.phi = true;
        deg.xi = true;
        0.0
    } else {
        f64::atan2(jk_norm, q.x1)
    };
    let xi = if jk_norm == 0.0 {
        deg.xi = true;
        0.0
    } else {
        wrap_angle_2pi(f64::atan2(q.x3, q.x2))
    };

    PolarQuaternion {
        rho,
        theta,
        phi,
        xi,
        degenerate: deg,
    }
}

/// Reassemble `rho (cos(theta) + I(phi, xi) sin(theta))`.
pub fn from_polar(p: &PolarQuaternion) -> Quaternion {
    let i_unit = polar_frame(p.phi, p.xi).i;
    let (s, c) = p.theta.sin_cos();
    (Quaternion::from_real(c) + i_unit * s) * p.rho
}

/// The frame `{I, J, K}` generated by the angles `(phi, xi)`:
/// `I = cos(phi) i + sin(phi) e^{i xi} j`, `J = dI/dphi`, `K = e^{i xi} i j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarFrame {
    pub i: Quaternion,
    pub j: Quaternion,
    pub k: Quaternion,
}

impl PolarFrame {
    /// Units in basis order `(1, I, J, K)`.
    pub fn units(&self) -> [Quaternion; 4] {
        [Quaternion::ONE, self.i, self.j, self.k]
    }

    /// Frame components of a Cartesian quaternion: projections onto
    /// `(1, I, J, K)`.
    pub fn components_of(&self, q: Quaternion) -> [f64; 4] {
        let u = self.units();
        [
            crate::quat::inner(q, u[0]),
            crate::quat::inner(q, u[1]),
            crate::quat::inner(q, u[2]),
            crate::quat::inner(q, u[3]),
        ]
    }

    /// Reassemble a Cartesian quaternion from frame components.
    pub fn from_components(&self, c: [f64; 4]) -> Quaternion {
        Quaternion::from_real(c[0]) + self.i * c[1] + self.j * c[2] + self.k * c[3]
    }
}

pub fn polar_frame(phi: f64, xi: f64) -> PolarFrame {
    let (sp, cp) = phi.sin_cos();
    let (sx, cx) = xi.sin_cos();
    PolarFrame {
        i: Quaternion::pure(cp, sp * cx, sp * sx),
        j: Quaternion::pure(-sp, cp * cx, cp * sx),
        // closed form e^{i xi} i j, valid also where sin(phi) = 0
        k: Quaternion::pure(0.0, -sx, cx),
    }
}

/// Angular derivatives of the polar frame units.
///
/// They satisfy `I_phi = J`, `J_phi = -I`, `K_phi = 0`, `I_xi = sin(phi) K`,
/// `J_xi = cos(phi) K`, `K_xi = (cos(phi) I - sin(phi) J) K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarFrameDerivatives {
    pub i_phi: Quaternion,
    pub i_xi: Quaternion,
    pub j_phi: Quaternion,
    pub j_xi: Quaternion,
    pub k_phi: Quaternion,
    pub k_xi: Quaternion,
}

pub fn polar_frame_derivatives(phi: f64, xi: f64) -> PolarFrameDerivatives {
    let f = polar_frame(phi, xi);
    let (sp, cp) = phi.sin_cos();
    PolarFrameDerivatives {
        i_phi: f.j,
        j_phi: -f.i,
        k_phi: Quaternion::ZERO,
        i_xi: f.k * sp,
        j_xi: f.k * cp,
        k_xi: (f.i * cp - f.j * sp) * f.k,
    }
}

/// Branch of the polar angle-addition rule `theta1 + theta2 = n pi + theta0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarAngleBranch {
    /// `n` even: the sum re-enters `[0, pi]` unchanged.
    Even,
    /// `n` odd with `theta0 <= pi/2`.
    OddLower,
    /// `n` odd with `theta0 > pi/2`.
    OddUpper,
}

/// Result of normalizing an angle sum back into the representable range.
///
/// Reconstruction: `cos(angle) + s * I sin(angle)` with `s = -1` when
/// `unit_flipped`, which equals the direct evaluation
/// `cos(theta1 + theta2) + I sin(theta1 + theta2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarAngleSum {
    /// Multiples of pi removed from the raw sum.
    pub n: u32,
    pub branch: PolarAngleBranch,
    /// Remainder `theta0` in `[0, pi]`.
    pub theta0: f64,
    /// The representable angle: `theta0` for even `n`, `pi - theta0` for odd.
    pub angle: f64,
    /// Whether the sign was absorbed by flipping the imaginary unit.
    pub unit_flipped: bool,
}

impl PolarAngleSum {
    /// Evaluate `cos(angle) + (+-I) sin(angle)` for a concrete unit `I`.
    pub fn reconstruct(&self, i_unit: Quaternion) -> Quaternion {
        let (s, c) = self.angle.sin_cos();
        let sign = if self.unit_flipped { -1.0 } else { 1.0 };
        Quaternion::from_real(c) + i_unit * (sign * s)
    }
}

/// Normalize an arbitrary nonnegative angle into the polar branch record.
pub fn canonicalize_polar_angle(sum: f64) -> PolarAngleSum {
    let n = (sum / PI).floor().max(0.0) as u32;
    let theta0 = (sum - n as f64 * PI).clamp(0.0, PI);
    if n % 2 == 0 {
        PolarAngleSum {
            n,
            branch: PolarAngleBranch::Even,
            theta0,
            angle: theta0,
            unit_flipped: false,
        }
    } else {
        let branch = if theta0 <= FRAC_PI_2 {
            PolarAngleBranch::OddLower
        } else {
            PolarAngleBranch::OddUpper
        };
        PolarAngleSum {
            n,
            branch,
            theta0,
            angle: PI - theta0,
            unit_flipped: true,
        }
    }
}

/// Add two polar angles from `[0, pi]`, absorbing any sign into the unit.
pub fn add_polar_angles(theta1: f64, theta2: f64) -> Result<PolarAngleSum> {
    for (name, v) in [("theta1", theta1), ("theta2", theta2)] {
        if !(0.0..=PI).contains(&v) {
            return Err(Error::AngleRange {
                name,
                value: v,
                min: 0.0,
                max: PI,
            });
        }
    }
    Ok(canonicalize_polar_angle(theta1 + theta2))
}
