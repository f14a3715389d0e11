//! Quaternion arithmetic over `f64` components.
//!
//! A quaternion is `x0 + x1 i + x2 j + x3 k` with anticommuting units
//! `i^2 = j^2 = k^2 = ijk = -1`. The scalar product `inner` makes the
//! quaternions a Euclidean four-space with orthonormal basis `{1, i, j, k}`,
//! and any nonzero quaternion `q` induces the orthogonal basis
//! `{q, iq, jq, kq}`.

use crate::error::{Error, Result};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A quaternion `x0 + x1 i + x2 j + x3 k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    /// A real quaternion `r + 0i + 0j + 0k`.
    pub const fn from_real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    /// A pure imaginary quaternion `x1 i + x2 j + x3 k`.
    pub const fn pure(x1: f64, x2: f64, x3: f64) -> Self {
        Self::new(0.0, x1, x2, x3)
    }

    /// The basis element `e_mu` in the order `(1, i, j, k)`.
    ///
    /// Panics if `mu > 3`.
    pub fn basis(mu: usize) -> Self {
        match mu {
            0 => Self::ONE,
            1 => Self::I,
            2 => Self::J,
            3 => Self::K,
            _ => panic!("basis index {mu} out of range"),
        }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn from_components(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    /// Component `x_mu`. Panics if `mu > 3`.
    pub fn component(&self, mu: usize) -> f64 {
        self.components()[mu]
    }

    /// The scalar (temporal) component `x0`.
    pub fn scalar(&self) -> f64 {
        self.x0
    }

    /// The vector (spatial) part `x1 i + x2 j + x3 k`.
    pub fn vector(&self) -> Self {
        Self::pure(self.x1, self.x2, self.x3)
    }

    /// Norm of the vector part.
    pub fn vector_norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    /// Quaternionic conjugate `x0 - x1 i - x2 j - x3 k`.
    pub fn conj(&self) -> Self {
        Self::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    /// Squared norm `x0^2 + x1^2 + x2^2 + x3^2`.
    pub fn norm_sq(&self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// `q / |q|`; error on the zero quaternion.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.scale(1.0 / n))
    }

    /// The imaginary unit carried by this quaternion: `vector / |vector|`.
    ///
    /// Errors when the vector part is zero.
    pub fn omega(&self) -> Result<Self> {
        let v = self.vector_norm();
        if v == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        Ok(Self::pure(self.x1 / v, self.x2 / v, self.x3 / v))
    }

    pub fn is_finite(&self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Largest absolute component difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x0 - other.x0)
            .abs()
            .max((self.x1 - other.x1).abs())
            .max((self.x2 - other.x2).abs())
            .max((self.x3 - other.x3).abs())
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.x0 + r.x0, self.x1 + r.x1, self.x2 + r.x2, self.x3 + r.x3)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.x0 - r.x0, self.x1 - r.x1, self.x2 - r.x2, self.x3 - r.x3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

/// Hamilton product. Noncommutative; `ij = k`, `jk = i`, `ki = j`.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.x0 * r.x0 - self.x1 * r.x1 - self.x2 * r.x2 - self.x3 * r.x3,
            self.x0 * r.x1 + self.x1 * r.x0 + self.x2 * r.x3 - self.x3 * r.x2,
            self.x0 * r.x2 - self.x1 * r.x3 + self.x2 * r.x0 + self.x3 * r.x1,
            self.x0 * r.x3 + self.x1 * r.x2 - self.x2 * r.x1 + self.x3 * r.x0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

/// Scalar product `<p, q> = Re[p conj(q)] = sum_mu p_mu q_mu`.
pub fn inner(p: Quaternion, q: Quaternion) -> f64 {
    p.x0 * q.x0 + p.x1 * q.x1 + p.x2 * q.x2 + p.x3 * q.x3
}

/// Orthogonality test with tolerance scaled by `|p||q|`.
pub fn is_orthogonal(p: Quaternion, q: Quaternion, tol: f64) -> bool {
    inner(p, q).abs() <= tol * p.norm() * q.norm()
}

/// Parallelism test: `p` and `q` are parallel when `p conj(q)` is real,
/// i.e. `<p, q> = p conj(q)`. Tolerance scaled by `|p||q|`.
///
/// A zero argument counts as parallel (and orthogonal) to everything.
pub fn is_parallel(p: Quaternion, q: Quaternion, tol: f64) -> bool {
    let prod = p * q.conj();
    prod.vector().norm() <= tol * p.norm() * q.norm()
}

/// The basis `{q, iq, jq, kq}` induced by a nonzero quaternion.
///
/// Pairwise inner products satisfy `<e_mu q, e_nu q> = delta |q|^2`.
pub fn induced_basis(q: Quaternion) -> Result<[Quaternion; 4]> {
    if q.norm_sq() == 0.0 {
        return Err(Error::ZeroBasis);
    }
    Ok([q, Quaternion::I * q, Quaternion::J * q, Quaternion::K * q])
}

/// The unit vector part of `q`; errors when `q` is real.
pub fn omega_of(q: Quaternion) -> Result<Quaternion> {
    q.omega()
}

/// Row-major 4x4 real matrix with basis order `(1, i, j, k)` on both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub const ZERO: Self = Self([[0.0; 4]; 4]);

    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (mu, row) in m.iter_mut().enumerate() {
            row[mu] = 1.0;
        }
        Self(m)
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                t[nu][mu] = self.0[mu][nu];
            }
        }
        Self(t)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for lam in 0..4 {
                    acc += self.0[mu][lam] * rhs.0[lam][nu];
                }
                out[mu][nu] = acc;
            }
        }
        Self(out)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu][nu] = self.0[mu][nu] + rhs.0[mu][nu];
            }
        }
        Self(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu][nu] = self.0[mu][nu] - rhs.0[mu][nu];
            }
        }
        Self(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Self(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.sub(rhs).max_abs()
    }
}

/// Component matrix of `p`: entry `(mu, nu)` is the `e_nu` component of
/// `p e_mu`.
///
/// Row 0 is `(p0, p1, p2, p3)` and the lower rows carry the antisymmetric
/// sign pattern of left multiplication. The map reverses products:
/// `M(p) M(q) = M(q p)`, and `M(p) M(p)^T = |p|^2 Id`.
pub fn component_matrix(p: Quaternion) -> Matrix4 {
    let mut m = [[0.0; 4]; 4];
    for (mu, row) in m.iter_mut().enumerate() {
        *row = (p * Quaternion::basis(mu)).components();
    }
    Matrix4(m)
}
