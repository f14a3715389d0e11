//! Quaternionic gradient calculus.
//!
//! The gradient is `grad f = sum_mu conj(e_mu) d_mu f` with the unit on the
//! left of the partial. Its four components are the Cauchy-Riemann-type
//! regularity rows: they vanish together, and fields in the kernel have
//! componentwise harmonic (4D) real parts.
//!
//! In polar coordinates the operator picks up the moving frame: angular
//! partials act on the frame units as well as the components, and the
//! regularity rows are the components of `rho (cos(theta) + I sin(theta))
//! grad g`, which vanish exactly when `grad g` does.

use crate::error::{Error, Result};
use crate::field::{dmixed, replace, CoordSystem, DiffConfig, Point4, QuaternionField};
use crate::quat::{inner, Quaternion};

/// Gradient `sum_mu conj(e_mu) d_mu f` at `p` (Cartesian fields).
pub fn gradient(f: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<Quaternion> {
    require_cartesian(f)?;
    let mut out = Quaternion::ZERO;
    for mu in 0..4 {
        out = out + Quaternion::basis(mu).conj() * f.partial(p, mu, cfg)?;
    }
    Ok(out)
}

/// The four regularity rows at `p`, assembled from component partials:
///
/// ```text
/// r0 = f0_0 + f1_1 + f2_2 + f3_3
/// r1 = f1_0 - f0_1 - f3_2 + f2_3
/// r2 = f2_0 + f3_1 - f0_2 - f1_3
/// r3 = f3_0 - f2_1 + f1_2 - f0_3
/// ```
///
/// All four vanish exactly when `gradient` does.
pub fn cr_residual(f: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<[f64; 4]> {
    require_cartesian(f)?;
    // d[mu][nu] = d_nu f^(mu)
    let mut d = [[0.0; 4]; 4];
    for (mu, row) in d.iter_mut().enumerate() {
        for (nu, v) in row.iter_mut().enumerate() {
            *v = f.component_partial(p, mu, nu, cfg)?;
        }
    }
    Ok([
        d[0][0] + d[1][1] + d[2][2] + d[3][3],
        d[1][0] - d[0][1] - d[3][2] + d[2][3],
        d[2][0] + d[3][1] - d[0][2] - d[1][3],
        d[3][0] - d[2][1] + d[1][2] - d[0][3],
    ])
}

/// Componentwise 4D Laplacian at `p`.
pub fn laplacian(f: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<Quaternion> {
    require_cartesian(f)?;
    let mut out = Quaternion::ZERO;
    for nu in 0..4 {
        out = out + f.partial2(p, nu, cfg)?;
    }
    Ok(out)
}

/// The second-order operator `conj(grad) grad` applied by differentiating
/// the gradient field itself. Agrees with [`laplacian`] on smooth fields;
/// kept as an independent route against ordering mistakes.
pub fn grad_conj_grad(f: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<Quaternion> {
    require_cartesian(f)?;
    let mut out = Quaternion::ZERO;
    for mu in 0..4 {
        let dmu_grad = crate::field::d1(
            &|x| gradient(f, replace(p, mu, x), cfg),
            p[mu],
            cfg.h1(p[mu]).sqrt() * 0.02,
            false,
        )?;
        out = out + Quaternion::basis(mu) * dmu_grad;
    }
    Ok(out)
}

fn require_cartesian(f: &QuaternionField) -> Result<()> {
    if f.coords() != CoordSystem::Cartesian {
        return Err(Error::CoordinateSingularity {
            factor: "field is polar-tagged; use the polar operators",
        });
    }
    Ok(())
}

fn require_polar(g: &QuaternionField) -> Result<()> {
    if g.coords() != CoordSystem::Polar {
        return Err(Error::CoordinateSingularity {
            factor: "field is Cartesian-tagged; use the Cartesian operators",
        });
    }
    Ok(())
}

const SIN_FLOOR: f64 = 1e-12;

fn check_polar_point(p: Point4) -> Result<()> {
    if !(p[0] > 0.0) {
        return Err(Error::CoordinateSingularity { factor: "rho" });
    }
    if p[1].sin().abs() < SIN_FLOOR {
        return Err(Error::CoordinateSingularity { factor: "sin(theta)" });
    }
    if p[2].sin().abs() < SIN_FLOOR {
        return Err(Error::CoordinateSingularity { factor: "sin(phi)" });
    }
    Ok(())
}

/// Gradient of a polar-tagged field at `p = (rho, theta, phi, xi)`:
///
/// ```text
/// grad = (cos(theta) - I sin(theta)) (d_rho - (I/rho) d_theta)
///        - (J / (rho sin(theta))) d_phi
///        - (K / (rho sin(theta) sin(phi))) d_xi
/// ```
///
/// The angular partials differentiate the field value as a whole, so the
/// motion of the frame units is included. The result is returned in frame
/// components over `{1, I, J, K}` at `p`.
pub fn gradient_polar(g: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<Quaternion> {
    require_polar(g)?;
    check_polar_point(p)?;
    let [rho, theta, phi, _] = p;
    let frame = g.frame_at(p);
    let (st, ct) = theta.sin_cos();
    let sp = phi.sin();

    let d_rho = g.partial(p, 0, cfg)?;
    let d_theta = g.partial(p, 1, cfg)?;
    let d_phi = g.partial(p, 2, cfg)?;
    let d_xi = g.partial(p, 3, cfg)?;

    let radial = (Quaternion::from_real(ct) - frame.i * st)
        * (d_rho - frame.i * d_theta * (1.0 / rho));
    let azimuthal = frame.j * d_phi * (1.0 / (rho * st));
    let axial = frame.k * d_xi * (1.0 / (rho * st * sp));
    let grad = radial - azimuthal - axial;

    Ok(Quaternion::from_components(frame.components_of(grad)))
}

/// The four polar regularity rows at `p`, built term by term from frame
/// component partials:
///
/// ```text
/// r0 = rho g0_r + g1_t + cot(theta) (2 g1 + cot(phi) g2 + g2_p + g3_x / sin(phi))
///      - g2_x / sin(phi) + g3_p + cot(phi) g3
/// r1 = rho g1_r - g0_t + 2 g1 + cot(phi) g2 + g2_p + g3_x / sin(phi)
///      + cot(theta) (g2_x / sin(phi) - g3_p - cot(phi) g3)
/// r2 = rho g2_r + g3_t - cot(theta) (g0_p + g1_x / sin(phi) - g3)
///      + g0_x / sin(phi) - g1_p + g2
/// r3 = rho g3_r - g2_t - g0_p - g1_x / sin(phi) + g3
///      - cot(theta) (g0_x / sin(phi) - g1_p + g2)
/// ```
///
/// These equal the frame components of `rho (cos(theta) + I sin(theta))
/// grad g`, so they vanish exactly when [`gradient_polar`] does.
pub fn cr_residual_polar(g: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<[f64; 4]> {
    require_polar(g)?;
    check_polar_point(p)?;
    let [rho, theta, phi, _] = p;
    let cot_t = theta.cos() / theta.sin();
    let cot_p = phi.cos() / phi.sin();
    let isp = 1.0 / phi.sin();

    let mut c = [0.0; 4]; // components g^mu
    let mut d = [[0.0; 4]; 4]; // d[mu][nu] = d_nu g^mu over (rho, theta, phi, xi)
    for mu in 0..4 {
        c[mu] = g.component(mu, p)?;
        for nu in 0..4 {
            d[mu][nu] = g.component_partial(p, mu, nu, cfg)?;
        }
    }
    let (g1, g2, g3) = (c[1], c[2], c[3]);

    let r0 = rho * d[0][0]
        + d[1][1]
        + cot_t * (2.0 * g1 + cot_p * g2 + d[2][2] + d[3][3] * isp)
        - d[2][3] * isp
        + d[3][2]
        + cot_p * g3;
    let r1 = rho * d[1][0] - d[0][1]
        + 2.0 * g1
        + cot_p * g2
        + d[2][2]
        + d[3][3] * isp
        + cot_t * (d[2][3] * isp - d[3][2] - cot_p * g3);
    let r2 = rho * d[2][0] + d[3][1] - cot_t * (d[0][2] + d[1][3] * isp - g3) + d[0][3] * isp
        - d[1][2]
        + g2;
    let r3 = rho * d[3][0]
        - d[2][1]
        - d[0][2]
        - d[1][3] * isp
        + g3
        - cot_t * (d[0][3] * isp - d[1][2] + g2);
    Ok([r0, r1, r2, r3])
}

/// Componentwise polar Laplacian at `p`, over frame components:
///
/// ```text
/// lap u = (rho^3 u_r)_r / rho^3
///       + (sin^2(theta) u_t)_t / (rho^2 sin^2(theta))
///       + (sin(phi) u_p)_p / (rho^2 sin^2(theta) sin(phi))
///       + u_xx / (rho^2 sin^2(theta) sin^2(phi))
/// ```
pub fn laplacian_polar(g: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<[f64; 4]> {
    require_polar(g)?;
    check_polar_point(p)?;
    let [rho, theta, phi, _] = p;
    let st = theta.sin();
    let sp = phi.sin();
    let cot_t = theta.cos() / st;
    let cot_p = phi.cos() / sp;

    let mut out = [0.0; 4];
    for (mu, slot) in out.iter_mut().enumerate() {
        let u_r = g.component_partial(p, mu, 0, cfg)?;
        let u_rr = g.component_partial2(p, mu, 0, cfg)?;
        let u_t = g.component_partial(p, mu, 1, cfg)?;
        let u_tt = g.component_partial2(p, mu, 1, cfg)?;
        let u_p = g.component_partial(p, mu, 2, cfg)?;
        let u_pp = g.component_partial2(p, mu, 2, cfg)?;
        let u_xx = g.component_partial2(p, mu, 3, cfg)?;
        *slot = u_rr + 3.0 / rho * u_r
            + (u_tt + 2.0 * cot_t * u_t) / (rho * rho)
            + (u_pp + cot_p * u_p) / (rho * rho * st * st)
            + u_xx / (rho * rho * st * st * sp * sp);
    }
    Ok(out)
}

/// Directional derivative along `q`: the real number
/// `sum_mu <q e_mu, d_mu f>` at `p`.
///
/// On the coordinate-times-basis fields `x_mu e_nu` this reproduces the
/// component table of [`crate::quat::component_matrix`]; on real-valued
/// fields it equals `<q, grad f>`. Linear in `q` and in `f`.
pub fn directional_derivative(
    q: Quaternion,
    f: &QuaternionField,
    p: Point4,
    cfg: &DiffConfig,
) -> Result<f64> {
    require_cartesian(f)?;
    let mut out = 0.0;
    for mu in 0..4 {
        out += inner(q * Quaternion::basis(mu), f.partial(p, mu, cfg)?);
    }
    Ok(out)
}

/// A 1-form `sum_mu a_mu dx_mu` with constant coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneForm {
    pub coeffs: [f64; 4],
}

impl OneForm {
    pub fn new(coeffs: [f64; 4]) -> Self {
        Self { coeffs }
    }

    /// The basis form `dx_mu`.
    pub fn dx(mu: usize) -> Self {
        let mut coeffs = [0.0; 4];
        coeffs[mu] = 1.0;
        Self { coeffs }
    }

    /// Pair the form with a direction.
    pub fn apply(&self, p: Quaternion) -> f64 {
        inner(Quaternion::from_components(self.coeffs), p)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut coeffs = self.coeffs;
        for c in coeffs.iter_mut() {
            *c *= s;
        }
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs;
        for (c, o) in coeffs.iter_mut().zip(other.coeffs) {
            *c += o;
        }
        Self { coeffs }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()))
    }
}

/// A 2-form over `dx_mu ^ dx_nu`, `mu < nu`; antisymmetry is structural.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoForm {
    /// Coefficients in pair order (01, 02, 03, 12, 13, 23).
    pub coeffs: [f64; 6],
}

/// Index pairs backing [`TwoForm::coeffs`].
pub const TWO_FORM_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl TwoForm {
    /// Signed coefficient for the ordered pair `(mu, nu)`.
    pub fn coeff(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            return 0.0;
        }
        let (a, b, sign) = if mu < nu { (mu, nu, 1.0) } else { (nu, mu, -1.0) };
        let idx = TWO_FORM_PAIRS.iter().position(|&p| p == (a, b)).unwrap();
        sign * self.coeffs[idx]
    }

    /// Evaluate on an ordered pair of directions.
    pub fn apply(&self, p: Quaternion, q: Quaternion) -> f64 {
        let pc = p.components();
        let qc = q.components();
        TWO_FORM_PAIRS
            .iter()
            .zip(self.coeffs)
            .map(|(&(a, b), c)| c * (pc[a] * qc[b] - pc[b] * qc[a]))
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()))
    }
}

/// Wedge product `(a ^ b)_{mu nu} = a_mu b_nu - a_nu b_mu`.
pub fn wedge(a: &OneForm, b: &OneForm) -> TwoForm {
    let mut coeffs = [0.0; 6];
    for (slot, &(mu, nu)) in coeffs.iter_mut().zip(TWO_FORM_PAIRS.iter()) {
        *slot = a.coeffs[mu] * b.coeffs[nu] - a.coeffs[nu] * b.coeffs[mu];
    }
    TwoForm { coeffs }
}

/// The differential `df = sum_mu (grad f)_mu dx_mu` at `p`.
///
/// Coefficients are the components of [`gradient`], so a field with
/// vanishing gradient has the zero form.
pub fn differential(f: &QuaternionField, p: Point4, cfg: &DiffConfig) -> Result<OneForm> {
    Ok(OneForm::new(gradient(f, p, cfg)?.components()))
}

/// Mixed second partial of a field (used by the cross-coordinate checks).
pub fn field_partial_mixed(
    f: &QuaternionField,
    p: Point4,
    mu: usize,
    nu: usize,
    cfg: &DiffConfig,
) -> Result<Quaternion> {
    cfg.validate()?;
    if mu == nu {
        return f.partial2(p, mu, cfg);
    }
    dmixed(
        &|x, y| f.value(replace(replace(p, mu, x), nu, y)),
        p[mu],
        p[nu],
        cfg.h2(),
        cfg.h2(),
    )
}
