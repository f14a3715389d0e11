//! Connections from unit-quaternion frame fields, dual 1-forms, and
//! structural-equation residuals.
//!
//! A unit frame `u` over an `n`-parameter domain induces the moving basis
//! `{e_mu u}` and the pure-imaginary connection `omega^(a) = u_a conj(u)`
//! per parameter, with components `omega_l = <u_a, e_l u>`. The dual basis
//! coefficient matrix `A[mu][nu] = (e_mu u)_nu` then obeys
//! `d_a A = B^(a) A` with `B^(a)[mu][l] = (e_mu omega^(a))_l`, and the
//! connection 1-form `omega = sum_a omega^(a) da` obeys
//! `d omega = omega ^ omega` at the quaternion level (left-coefficient
//! convention; the sign flips in the product-reversing matrix picture, so
//! both sign conventions are reported).
//!
//! Matrix layout convention: 4x4 matrices here are row-indexed by the basis
//! element multiplying on the left, row `mu` carrying the components of
//! `e_mu x`, mirroring the component-table layout of
//! [`crate::quat::component_matrix`] up to that left/right choice.

use crate::calculus::{wedge, OneForm, TwoForm};
use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::field::{d1, DiffConfig};
use crate::quat::{component_matrix, inner, Matrix4, Quaternion};

/// Tolerance on `| |u| - 1 |` for frame fields.
pub const UNIT_FRAME_TOL: f64 = 1e-9;

/// A unit-quaternion frame field over 1 to 3 parameters.
///
/// Values are checked to be unit norm (within [`UNIT_FRAME_TOL`]) wherever
/// the frame is evaluated.
#[derive(Clone)]
pub struct UnitFrame {
    inner: Constraint,
}

impl UnitFrame {
    pub fn from_expr(src: &str, nparams: usize) -> Result<Self> {
        Ok(Self {
            inner: Constraint::from_expr(src, nparams)?,
        })
    }

    pub fn curve_expr(src: &str) -> Result<Self> {
        Self::from_expr(src, 1)
    }

    pub fn from_fn<F>(f: F, nparams: usize) -> Self
    where
        F: Fn(&[f64]) -> Quaternion + Send + Sync + 'static,
    {
        Self {
            inner: Constraint::from_fn(f, nparams),
        }
    }

    pub fn from_constraint(c: Constraint) -> Self {
        Self { inner: c }
    }

    pub fn nparams(&self) -> usize {
        self.inner.nparams()
    }

    pub fn param_name(&self, a: usize) -> &'static str {
        self.inner.param_name(a)
    }

    /// Frame value at `p`; errors when the value is not unit norm.
    pub fn value(&self, p: &[f64]) -> Result<Quaternion> {
        let u = self.inner.value(p)?;
        let n = u.norm();
        if (n - 1.0).abs() > UNIT_FRAME_TOL {
            return Err(Error::NonUnitFrame { norm: n });
        }
        Ok(u)
    }

    pub fn partial(&self, p: &[f64], a: usize, cfg: &DiffConfig) -> Result<Quaternion> {
        self.inner.partial(p, a, cfg)
    }
}

/// Connection `omega^(a) = u_a conj(u)` for one parameter.
pub fn connection(frame: &UnitFrame, a: usize, p: &[f64], cfg: &DiffConfig) -> Result<Quaternion> {
    let u = frame.value(p)?;
    let ua = frame.partial(p, a, cfg)?;
    Ok(ua * u.conj())
}

/// Connection components `omega_l = <u_a, e_l u>` for `l` in 0..4.
///
/// The scalar slot is included and is near zero for unit frames; slots
/// 1..4 match the components of the direct product `u_a conj(u)`.
pub fn connection_components(
    frame: &UnitFrame,
    a: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<[f64; 4]> {
    let u = frame.value(p)?;
    let ua = frame.partial(p, a, cfg)?;
    Ok([
        inner(ua, u),
        inner(ua, Quaternion::I * u),
        inner(ua, Quaternion::J * u),
        inner(ua, Quaternion::K * u),
    ])
}

/// The connection in all parameter directions at one point.
#[derive(Debug, Clone)]
pub struct Connection {
    pub per_param: Vec<Quaternion>,
}

impl Connection {
    /// Matrix view of `omega^(a)`; antisymmetric for pure-imaginary values.
    pub fn matrix(&self, a: usize) -> Matrix4 {
        component_matrix(self.per_param[a])
    }
}

pub fn connection_at(frame: &UnitFrame, p: &[f64], cfg: &DiffConfig) -> Result<Connection> {
    let mut per_param = Vec::with_capacity(frame.nparams());
    for a in 0..frame.nparams() {
        per_param.push(connection(frame, a, p, cfg)?);
    }
    Ok(Connection { per_param })
}

/// Dual 1-form `phi_mu(p) = <p, e_mu u>` of the basis induced by `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualForm {
    pub u: Quaternion,
    pub mu: usize,
}

impl DualForm {
    pub fn apply(&self, p: Quaternion) -> f64 {
        inner(p, Quaternion::basis(self.mu) * self.u)
    }

    /// Coefficients over `dx_nu`: the components of `e_mu u`.
    pub fn as_one_form(&self) -> OneForm {
        OneForm::new((Quaternion::basis(self.mu) * self.u).components())
    }
}

/// The dual 1-form of index `mu` for the frame quaternion `u`.
///
/// With `u = 1` this reduces to the coordinate form `dx_mu`. The duality
/// table is `phi_mu(e_nu u) = delta |u|^2`, so coefficients assume a unit
/// `u`.
pub fn dual_form(u: Quaternion, mu: usize) -> DualForm {
    DualForm { u, mu }
}

/// Expansion coefficients of `psi` in the dual basis of `u`:
/// `psi = sum_mu psi(e_mu u) phi_mu` (unique for unit `u`).
pub fn expand_in_dual_basis(psi: &OneForm, u: Quaternion) -> [f64; 4] {
    [
        psi.apply(Quaternion::basis(0) * u),
        psi.apply(Quaternion::basis(1) * u),
        psi.apply(Quaternion::basis(2) * u),
        psi.apply(Quaternion::basis(3) * u),
    ]
}

/// A 4x4 matrix of 1-forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixOneForm(pub [[OneForm; 4]; 4]);

/// A 4x4 matrix of 2-forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixTwoForm(pub [[TwoForm; 4]; 4]);

impl MatrixOneForm {
    pub const ZERO: Self = Self(
        [[OneForm { coeffs: [0.0; 4] }; 4]; 4],
    );

    /// Matrix wedge: entry `(mu, nu)` is `sum_lam self[mu][lam] ^ rhs[lam][nu]`.
    pub fn wedge(&self, rhs: &Self) -> MatrixTwoForm {
        let mut out = [[TwoForm::default(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = TwoForm::default();
                for lam in 0..4 {
                    let w = wedge(&self.0[mu][lam], &rhs.0[lam][nu]);
                    for (slot, c) in acc.coeffs.iter_mut().zip(w.coeffs) {
                        *slot += c;
                    }
                }
                out[mu][nu] = acc;
            }
        }
        MatrixTwoForm(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, f| acc.max(f.max_abs()))
    }
}

impl MatrixTwoForm {
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, f| acc.max(f.max_abs()))
    }
}

/// Connection as a matrix of 1-forms over the parameter slots:
/// entry `(mu, nu)` is `sum_a (e_mu omega^(a))_nu da`.
pub fn connection_matrix_form(
    frame: &UnitFrame,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<MatrixOneForm> {
    let conn = connection_at(frame, p, cfg)?;
    let mut out = MatrixOneForm::ZERO;
    for (a, omega) in conn.per_param.iter().enumerate() {
        for mu in 0..4 {
            let row = (Quaternion::basis(mu) * *omega).components();
            for nu in 0..4 {
                out.0[mu][nu].coeffs[a] += row[nu];
            }
        }
    }
    Ok(out)
}

/// Structural-equation residuals of a unit frame at a point.
///
/// `first[a]` is the 4x4 residual of `d_a A - B^(a) A` where `A` is the
/// dual-basis coefficient matrix and `B^(a)` the connection action; its
/// vanishing is the matrix form of the first structural equation, with the
/// connection taken from the component formula as an independent route.
///
/// `second_minus` holds the `da ^ db` coefficients of
/// `d omega - omega ^ omega` (the headline convention for left
/// coefficients) and `second_plus` those of `d omega + omega ^ omega`,
/// both at the quaternion level.
#[derive(Debug, Clone)]
pub struct StructuralResiduals {
    pub first: Vec<Matrix4>,
    pub first_max: f64,
    pub second_minus: Vec<((usize, usize), Quaternion)>,
    pub second_plus: Vec<((usize, usize), Quaternion)>,
    pub second_minus_max: f64,
    pub second_plus_max: f64,
}

impl StructuralResiduals {
    /// Matrix view of the `d omega - omega ^ omega` coefficients.
    pub fn second_minus_matrices(&self) -> Vec<((usize, usize), Matrix4)> {
        self.second_minus
            .iter()
            .map(|&(pair, q)| (pair, component_matrix(q)))
            .collect()
    }
}

/// Rows `e_mu x` of a quaternion, as a matrix.
fn left_basis_matrix(x: Quaternion) -> Matrix4 {
    let mut m = [[0.0; 4]; 4];
    for (mu, row) in m.iter_mut().enumerate() {
        *row = (Quaternion::basis(mu) * x).components();
    }
    Matrix4(m)
}

/// Evaluate the structural residuals of `frame` at `p`.
pub fn structural_residuals(
    frame: &UnitFrame,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<StructuralResiduals> {
    cfg.validate()?;
    let n = frame.nparams();
    let u = frame.value(p)?;

    // connection per parameter, from the component formula (independent of
    // the product route used by `connection`)
    let mut omegas = Vec::with_capacity(n);
    for a in 0..n {
        let comp = connection_components(frame, a, p, cfg)?;
        omegas.push(Quaternion::pure(comp[1], comp[2], comp[3]));
    }

    // first equation: d_a A = B^(a) A with A[mu][nu] = (e_mu u)_nu
    let a_matrix = left_basis_matrix(u);
    let mut first = Vec::with_capacity(n);
    let mut first_max = 0.0_f64;
    for a in 0..n {
        let ua = frame.partial(p, a, cfg)?;
        let da = left_basis_matrix(ua);
        let action = left_basis_matrix(omegas[a]).mul(&a_matrix);
        let resid = da.sub(&action);
        first_max = first_max.max(resid.max_abs());
        first.push(resid);
    }

    // second equation: compare d omega with omega ^ omega on da ^ db
    let mut second_minus = Vec::new();
    let mut second_plus = Vec::new();
    let mut second_minus_max = 0.0_f64;
    let mut second_plus_max = 0.0_f64;
    for a in 0..n {
        for b in (a + 1)..n {
            let domega = connection_derivative(frame, b, a, p, cfg)?
                - connection_derivative(frame, a, b, p, cfg)?;
            let wedge_coeff = omegas[a] * omegas[b] - omegas[b] * omegas[a];
            let minus = domega - wedge_coeff;
            let plus = domega + wedge_coeff;
            second_minus_max = second_minus_max.max(minus.norm());
            second_plus_max = second_plus_max.max(plus.norm());
            second_minus.push(((a, b), minus));
            second_plus.push(((a, b), plus));
        }
    }

    Ok(StructuralResiduals {
        first,
        first_max,
        second_minus,
        second_plus,
        second_minus_max,
        second_plus_max,
    })
}

/// `d_b omega^(a)`, differencing the connection field along parameter `b`.
///
/// The step is widened to sit above the noise of the inner connection
/// evaluation.
fn connection_derivative(
    frame: &UnitFrame,
    a: usize,
    b: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<Quaternion> {
    let h = cfg.step.powf(2.0 / 3.0);
    d1(
        &|x| {
            let mut moved = p.to_vec();
            moved[b] = x;
            connection(frame, a, &moved, cfg)
        },
        p[b],
        h,
        false,
    )
}
