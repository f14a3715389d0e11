//! Symplectic notation `q = z0 + z1 j` with complex `z0 = x0 + x1 i`,
//! `z1 = x2 + x3 i`.
//!
//! Complex scalars act on the left; `j z = conj(z) j` moves them across `j`.
//! The complex-valued inner product is the `z0` part of `p conj(q)`.

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Complex-pair view of a quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticQuaternion {
    pub z0: Complex64,
    pub z1: Complex64,
}

impl SymplecticQuaternion {
    /// The alternate decomposition `q = z0 + conj(zeta) k` with
    /// `zeta = x3 + x2 i`.
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.z1.im, self.z1.re)
    }

    pub fn from_z0_zeta(z0: Complex64, zeta: Complex64) -> Self {
        Self {
            z0,
            z1: Complex64::new(zeta.im, zeta.re),
        }
    }
}

/// Embed a complex number as the quaternion `re + im * i`.
pub fn complex_as_quaternion(z: Complex64) -> Quaternion {
    Quaternion::new(z.re, z.im, 0.0, 0.0)
}

pub fn to_symplectic(q: Quaternion) -> SymplecticQuaternion {
    SymplecticQuaternion {
        z0: Complex64::new(q.x0, q.x1),
        z1: Complex64::new(q.x2, q.x3),
    }
}

pub fn from_symplectic(s: &SymplecticQuaternion) -> Quaternion {
    Quaternion::new(s.z0.re, s.z0.im, s.z1.re, s.z1.im)
}

/// Extract `(z0, z1)` by the product formulas
/// `z0 = (q - i q i) / 2` and `z1 = (conj(q) + i conj(q) i) j / 2`.
///
/// Agrees exactly with the component view of [`to_symplectic`].
pub fn extract_components(q: Quaternion) -> (Complex64, Complex64) {
    let i = Quaternion::I;
    let z0 = (q - i * q * i).scale(0.5);
    let z1 = ((q.conj() + i * q.conj() * i) * Quaternion::J).scale(0.5);
    (
        Complex64::new(z0.x0, z0.x1),
        Complex64::new(z1.x0, z1.x1),
    )
}

/// Complex-valued inner product: the `z0` part of `p conj(q)`.
///
/// Conjugate-symmetric, with `<q, q> = |q|^2`, complex scalars pulling out
/// on the left of the first slot and conjugated out of the second.
pub fn symplectic_inner(p: Quaternion, q: Quaternion) -> Complex64 {
    let w = p * q.conj();
    Complex64::new(w.x0, w.x1)
}

/// Which symplectic-polar angles are undefined (and were set to 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymplecticDegeneracy {
    pub vartheta: bool,
    pub phi: bool,
    pub psi: bool,
}

impl SymplecticDegeneracy {
    pub fn any(&self) -> bool {
        self.vartheta || self.phi || self.psi
    }
}

/// Symplectic polar form
/// `q = rho (cos(vartheta) e^{i phi} + sin(vartheta) e^{i psi} j)` with
/// `vartheta` in `[0, pi/2]` and `phi`, `psi` in `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticPolar {
    pub rho: f64,
    pub vartheta: f64,
    pub phi: f64,
    pub psi: f64,
    pub degenerate: SymplecticDegeneracy,
}

fn wrap_angle_2pi(a: f64) -> f64 {
    let mut v = a.rem_euclid(TAU);
    if v >= TAU {
        v = 0.0;
    }
    v
}

pub fn to_symplectic_polar(q: Quaternion) -> SymplecticPolar {
    let s = to_symplectic(q);
    let rho = q.norm();
    let r0 = s.z0.norm();
    let r1 = s.z1.norm();

    let mut deg = SymplecticDegeneracy::default();
    let vartheta = if rho == 0.0 {
        deg.vartheta = true;
        0.0
    } else {
        f64::atan2(r1, r0)
    };
    let phi = if r0 == 0.0 {
        deg.phi = true;
        0.0
    } else {
        wrap_angle_2pi(s.z0.arg())
    };
    let psi = if r1 == 0.0 {
        deg.psi = true;
        0.0
    } else {
        wrap_angle_2pi(s.z1.arg())
    };

    SymplecticPolar {
        rho,
        vartheta,
        phi,
        psi,
        degenerate: deg,
    }
}

pub fn from_symplectic_polar(p: &SymplecticPolar) -> Quaternion {
    let z0 = Complex64::from_polar(p.rho * p.vartheta.cos(), p.phi);
    let z1 = Complex64::from_polar(p.rho * p.vartheta.sin(), p.psi);
    from_symplectic(&SymplecticQuaternion { z0, z1 })
}

/// Branch record for the symplectic angle sum
/// `vartheta1 + vartheta2 = n pi/2 + vartheta0`.
///
/// The canonical rewrite keeps both moduli nonnegative by moving the angle
/// to `vartheta` (even `n`) or `pi/2 - vartheta0` (odd `n`) and shifting the
/// phases of `z0` and `z1` by `-pi` where a sign was absorbed, so that the
/// reconstruction equals the direct evaluation
/// `cos(v1+v2) e^{i phi} + sin(v1+v2) e^{i psi} j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticAngleSum {
    pub n_mod4: u32,
    /// Remainder `vartheta0` in `[0, pi/2]`.
    pub vartheta0: f64,
    /// The representable angle: `vartheta0` or `pi/2 - vartheta0`.
    pub vartheta: f64,
    /// Shift applied to the `z0` phase (0 or `-pi`).
    pub phase_shift_z0: f64,
    /// Shift applied to the `z1` phase (0 or `-pi`).
    pub phase_shift_z1: f64,
}

impl SymplecticAngleSum {
    /// Evaluate the canonical form for concrete `rho`, `phi`, `psi`.
    pub fn reconstruct(&self, rho: f64, phi: f64, psi: f64) -> Quaternion {
        let z0 = Complex64::from_polar(rho * self.vartheta.cos(), phi + self.phase_shift_z0);
        let z1 = Complex64::from_polar(rho * self.vartheta.sin(), psi + self.phase_shift_z1);
        from_symplectic(&SymplecticQuaternion { z0, z1 })
    }
}

/// Normalize an arbitrary nonnegative angle into the four-branch record.
pub fn canonicalize_symplectic_angle(sum: f64) -> SymplecticAngleSum {
    let n = (sum / FRAC_PI_2).floor().max(0.0) as u32;
    let vartheta0 = (sum - n as f64 * FRAC_PI_2).clamp(0.0, FRAC_PI_2);
    let (vartheta, shift_z0, shift_z1) = match n % 4 {
        0 => (vartheta0, 0.0, 0.0),
        1 => (FRAC_PI_2 - vartheta0, -PI, 0.0),
        2 => (vartheta0, -PI, -PI),
        _ => (FRAC_PI_2 - vartheta0, 0.0, -PI),
    };
    SymplecticAngleSum {
        n_mod4: n % 4,
        vartheta0,
        vartheta,
        phase_shift_z0: shift_z0,
        phase_shift_z1: shift_z1,
    }
}

/// Add two symplectic polar angles from `[0, pi/2]`.
pub fn add_symplectic_angles(vartheta1: f64, vartheta2: f64) -> Result<SymplecticAngleSum> {
    for (name, v) in [("vartheta1", vartheta1), ("vartheta2", vartheta2)] {
        if !(0.0..=FRAC_PI_2).contains(&v) {
            return Err(Error::AngleRange {
                name,
                value: v,
                min: 0.0,
                max: FRAC_PI_2,
            });
        }
    }
    Ok(canonicalize_symplectic_angle(vartheta1 + vartheta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn component_extraction_examples() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let (z0, z1) = extract_components(q);
        assert_eq!(z0, Complex64::new(1.0, 2.0));
        assert_eq!(z1, Complex64::new(3.0, 4.0));
        let s = to_symplectic(q);
        assert_eq!((s.z0, s.z1), (z0, z1));
        assert_eq!(from_symplectic(&s), q);

        let (z0, z1) = extract_components(Quaternion::J);
        assert_eq!(z0, Complex64::new(0.0, 0.0));
        assert_eq!(z1, Complex64::new(1.0, 0.0));

        let (z0, z1) = extract_components(Quaternion::ONE);
        assert_eq!(z0, Complex64::new(1.0, 0.0));
        assert_eq!(z1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zeta_reassembles_with_k() {
        let q = Quaternion::new(0.5, -1.0, 2.0, -3.0);
        let s = to_symplectic(q);
        let zeta = s.zeta();
        let back = complex_as_quaternion(s.z0)
            + complex_as_quaternion(zeta.conj()) * Quaternion::K;
        assert_eq!(back, q);
        assert_eq!(from_symplectic(&SymplecticQuaternion::from_z0_zeta(s.z0, zeta)), q);
    }

    #[test]
    fn inner_product_examples() {
        let q = Quaternion::new(0.3, 1.0, -2.0, 0.7);
        let s = symplectic_inner(q, q);
        assert!((s.re - q.norm_sq()).abs() <= 1e-12);
        assert!(s.im.abs() <= 1e-12);

        // <1, i> = (1 * (-i) - i * (-i) * i) / 2 = -i
        let s = symplectic_inner(Quaternion::ONE, Quaternion::I);
        assert_eq!(s, Complex64::new(0.0, -1.0));

        // left scalar pulls out, right scalar conjugates out
        let a0 = Complex64::new(2.0, 3.0);
        let p = Quaternion::new(0.4, -0.8, 1.5, 0.2);
        let lhs = symplectic_inner(complex_as_quaternion(a0) * p, q);
        let rhs = a0 * symplectic_inner(p, q);
        assert!((lhs - rhs).norm() <= 1e-12);
        let lhs = symplectic_inner(p, complex_as_quaternion(a0) * q);
        let rhs = symplectic_inner(p, q) * a0.conj();
        assert!((lhs - rhs).norm() <= 1e-12);
        // conjugate symmetry
        let lhs = symplectic_inner(p, q).conj();
        let rhs = symplectic_inner(q, p);
        assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn symplectic_polar_roundtrip() {
        let q = Quaternion::new(-0.4, 1.2, 0.9, -2.2);
        let p = to_symplectic_polar(q);
        assert!(!p.degenerate.any());
        assert!((0.0..=FRAC_PI_2).contains(&p.vartheta));
        assert!((0.0..TAU).contains(&p.phi));
        assert!((0.0..TAU).contains(&p.psi));
        let rt = from_symplectic_polar(&p);
        assert!(rt.max_abs_diff(&q) <= 1e-12 * q.norm());

        let p = to_symplectic_polar(Quaternion::from_real(2.0));
        assert!(p.degenerate.psi && !p.degenerate.phi);
    }

    #[test]
    fn angle_addition_branches() {
        let s = add_symplectic_angles(0.0, 0.0).unwrap();
        assert_eq!(s.n_mod4, 0);
        assert_eq!(s.vartheta0, 0.0);
        assert_eq!((s.phase_shift_z0, s.phase_shift_z1), (0.0, 0.0));

        // pi/4 + pi/4 crosses pi/2: odd branch with vartheta0 = 0
        let s = add_symplectic_angles(FRAC_PI_4, FRAC_PI_4).unwrap();
        assert_eq!(s.n_mod4, 1);
        assert!(s.vartheta0.abs() <= 1e-15);
        assert!((s.vartheta - FRAC_PI_2).abs() <= 1e-15);

        // sum of pi: both phases shift by -pi
        let s = add_symplectic_angles(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_eq!(s.n_mod4, 2);
        assert_eq!((s.phase_shift_z0, s.phase_shift_z1), (-PI, -PI));

        // the n = 3 branch, reachable for longer angle chains
        let s = canonicalize_symplectic_angle(3.0 * FRAC_PI_2 + 0.3);
        assert_eq!(s.n_mod4, 3);
        assert_eq!((s.phase_shift_z0, s.phase_shift_z1), (0.0, -PI));

        assert!(add_symplectic_angles(-0.1, 0.0).is_err());
        assert!(add_symplectic_angles(FRAC_PI_2 + 0.1, 0.0).is_err());
    }

    #[test]
    fn angle_addition_matches_direct_evaluation() {
        let direct = |sum: f64, rho: f64, phi: f64, psi: f64| {
            from_symplectic(&SymplecticQuaternion {
                z0: Complex64::from_polar(rho * sum.cos(), phi),
                z1: Complex64::from_polar(rho * sum.sin(), psi),
            })
        };
        let (rho, phi, psi) = (1.3, 0.8, 5.1);
        for step1 in 0..20 {
            for step2 in 0..20 {
                let v1 = step1 as f64 * FRAC_PI_2 / 19.0;
                let v2 = step2 as f64 * FRAC_PI_2 / 19.0;
                let s = add_symplectic_angles(v1, v2).unwrap();
                let got = s.reconstruct(rho, phi, psi);
                let want = direct(v1 + v2, rho, phi, psi);
                assert!(got.max_abs_diff(&want) <= 1e-12, "v1={v1} v2={v2}");
            }
        }
        // n = 3 branch against the same oracle
        for step in 0..10 {
            let sum = 3.0 * FRAC_PI_2 + step as f64 * FRAC_PI_2 / 10.0;
            let s = canonicalize_symplectic_angle(sum);
            let got = s.reconstruct(rho, phi, psi);
            let want = direct(sum, rho, phi, psi);
            assert!(got.max_abs_diff(&want) <= 1e-12, "sum={sum}");
        }
    }
}
