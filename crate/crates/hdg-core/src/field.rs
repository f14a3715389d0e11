//! Quaternion-valued fields over four real coordinates, and the shared
//! differentiation engine.
//!
//! Fields come from the expression language (which also enables exact
//! forward-mode derivatives) or from arbitrary closures. Polar-tagged fields
//! take the point `(rho, theta, phi, xi)` and expose components in the
//! moving frame `{1, I, J, K}` at the evaluation point.

use crate::error::{Error, Result};
use crate::expr::{parse, Ast, Env, Var};
use crate::polar::{polar_frame, polar_frame_derivatives, PolarFrame};
use crate::quat::{inner, Quaternion};
use std::sync::Arc;

/// An evaluation point: `(x0, x1, x2, x3)` or `(rho, theta, phi, xi)`.
pub type Point4 = [f64; 4];

/// Closure backend for fields.
pub type FieldFn = Arc<dyn Fn(Point4) -> Result<Quaternion> + Send + Sync>;

/// Coordinate system a field is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordSystem {
    Cartesian,
    Polar,
}

impl CoordSystem {
    /// The coordinate variables in point order.
    pub fn vars(&self) -> [Var; 4] {
        match self {
            CoordSystem::Cartesian => [Var::X0, Var::X1, Var::X2, Var::X3],
            CoordSystem::Polar => [Var::Rho, Var::Theta, Var::Phi, Var::Xi],
        }
    }
}

/// Differentiation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffScheme {
    /// Second-order central differences.
    Central,
    /// Exact forward-mode derivatives; requires an expression backend.
    Exact,
}

/// Differentiation settings.
///
/// First derivatives use step `step * (1 + |x|)` per coordinate. Second
/// differences use a wider five-point stencil at `~2 sqrt(step)`, and mixed
/// partials a Richardson-extrapolated four-point cross at the same width,
/// which keeps truncation and rounding balanced at double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffConfig {
    pub scheme: DiffScheme,
    pub step: f64,
    /// One level of Richardson extrapolation on first derivatives.
    pub richardson: bool,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self {
            scheme: DiffScheme::Central,
            step: 5e-6,
            richardson: false,
        }
    }
}

impl DiffConfig {
    pub fn exact() -> Self {
        Self {
            scheme: DiffScheme::Exact,
            ..Self::default()
        }
    }

    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidStep(self.step));
        }
        Ok(())
    }

    pub(crate) fn h1(&self, x: f64) -> f64 {
        self.step * (1.0 + x.abs())
    }

    // absolute width: the wide stencils trade coordinate-relative rounding
    // (negligible at moderate coordinates) for uniform truncation
    pub(crate) fn h2(&self) -> f64 {
        2.0 * self.step.sqrt()
    }
}

#[derive(Clone)]
enum Backend {
    Expr(Arc<Ast>),
    Closure(FieldFn),
}

/// A quaternion-valued function of four real coordinates.
#[derive(Clone)]
pub struct QuaternionField {
    backend: Backend,
    coords: CoordSystem,
}

impl QuaternionField {
    /// Field from an expression in `x0..x3`.
    pub fn cartesian_expr(src: &str) -> Result<Self> {
        Self::from_expr(src, CoordSystem::Cartesian)
    }

    /// Field from an expression in `rho, theta, phi, xi`; the polar units
    /// `I, J, K` are in scope.
    pub fn polar_expr(src: &str) -> Result<Self> {
        Self::from_expr(src, CoordSystem::Polar)
    }

    fn from_expr(src: &str, coords: CoordSystem) -> Result<Self> {
        let ast = parse(src)?;
        let allowed = coords.vars();
        for v in ast.free_vars() {
            if !allowed.contains(&v) {
                return Err(crate::expr::EvalError::UnboundVariable(v.name()).into());
            }
        }
        if ast.uses_polar_units() && coords != CoordSystem::Polar {
            return Err(crate::expr::EvalError::PolarUnitsUnavailable.into());
        }
        Ok(Self {
            backend: Backend::Expr(Arc::new(ast)),
            coords,
        })
    }

    pub fn cartesian_fn<F>(f: F) -> Self
    where
        F: Fn(Point4) -> Quaternion + Send + Sync + 'static,
    {
        Self {
            backend: Backend::Closure(Arc::new(move |p| Ok(f(p)))),
            coords: CoordSystem::Cartesian,
        }
    }

    pub fn polar_fn<F>(f: F) -> Self
    where
        F: Fn(Point4) -> Quaternion + Send + Sync + 'static,
    {
        Self {
            backend: Backend::Closure(Arc::new(move |p| Ok(f(p)))),
            coords: CoordSystem::Polar,
        }
    }

    pub fn coords(&self) -> CoordSystem {
        self.coords
    }

    pub fn is_expr_backed(&self) -> bool {
        matches!(self.backend, Backend::Expr(_))
    }

    fn env_at(&self, p: Point4) -> Env {
        let mut env = Env::new();
        for (var, x) in self.coords.vars().into_iter().zip(p) {
            env.set(var, x);
        }
        env
    }

    /// Evaluate the field.
    pub fn value(&self, p: Point4) -> Result<Quaternion> {
        let q = match &self.backend {
            Backend::Expr(ast) => ast.eval(&self.env_at(p))?,
            Backend::Closure(f) => f(p)?,
        };
        if !q.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(q)
    }

    /// The moving frame at `p` (identity frame in Cartesian mode).
    pub fn frame_at(&self, p: Point4) -> PolarFrame {
        match self.coords {
            CoordSystem::Cartesian => PolarFrame {
                i: Quaternion::I,
                j: Quaternion::J,
                k: Quaternion::K,
            },
            CoordSystem::Polar => polar_frame(p[2], p[3]),
        }
    }

    /// Component `f^(mu)` in the field's frame at `p`.
    pub fn component(&self, mu: usize, p: Point4) -> Result<f64> {
        let q = self.value(p)?;
        Ok(match self.coords {
            CoordSystem::Cartesian => q.component(mu),
            CoordSystem::Polar => self.frame_at(p).components_of(q)[mu],
        })
    }

    /// Partial derivative of the field value along coordinate `nu`.
    pub fn partial(&self, p: Point4, nu: usize, cfg: &DiffConfig) -> Result<Quaternion> {
        cfg.validate()?;
        match cfg.scheme {
            DiffScheme::Exact => {
                let Backend::Expr(ast) = &self.backend else {
                    return Err(Error::ExactUnavailable);
                };
                let (_, der) = ast.eval_dual(&self.env_at(p), self.coords.vars()[nu])?;
                if !der.is_finite() {
                    return Err(Error::NonFinite);
                }
                Ok(der)
            }
            DiffScheme::Central => {
                d1(&|x| self.value(replace(p, nu, x)), p[nu], cfg.h1(p[nu]), cfg.richardson)
            }
        }
    }

    /// Pure second partial along coordinate `nu` (five-point stencil).
    pub fn partial2(&self, p: Point4, nu: usize, cfg: &DiffConfig) -> Result<Quaternion> {
        cfg.validate()?;
        match cfg.scheme {
            // difference the exact first derivative
            DiffScheme::Exact if self.is_expr_backed() => {
                d1(&|x| self.partial(replace(p, nu, x), nu, cfg), p[nu], cfg.h1(p[nu]), false)
            }
            _ => d2(&|x| self.value(replace(p, nu, x)), p[nu], cfg.h2()),
        }
    }

    /// Partial of the frame component `f^(mu)` along coordinate `nu`.
    ///
    /// In polar mode this is the derivative of the scalar function obtained
    /// by projecting onto the frame at each point, which is what the
    /// component-wise regularity rows consume.
    pub fn component_partial(
        &self,
        p: Point4,
        mu: usize,
        nu: usize,
        cfg: &DiffConfig,
    ) -> Result<f64> {
        cfg.validate()?;
        match cfg.scheme {
            DiffScheme::Exact => {
                let Backend::Expr(ast) = &self.backend else {
                    return Err(Error::ExactUnavailable);
                };
                let (val, der) = ast.eval_dual(&self.env_at(p), self.coords.vars()[nu])?;
                match self.coords {
                    CoordSystem::Cartesian => Ok(der.component(mu)),
                    CoordSystem::Polar => {
                        let frame = self.frame_at(p);
                        let mut out = inner(der, frame.units()[mu]);
                        // the projection frame moves with phi and xi
                        if nu == 2 || nu == 3 {
                            let d = polar_frame_derivatives(p[2], p[3]);
                            let unit_rate = match (mu, nu) {
                                (0, _) => Quaternion::ZERO,
                                (1, 2) => d.i_phi,
                                (1, 3) => d.i_xi,
                                (2, 2) => d.j_phi,
                                (2, 3) => d.j_xi,
                                (3, 2) => d.k_phi,
                                (3, 3) => d.k_xi,
                                _ => unreachable!(),
                            };
                            out += inner(val, unit_rate);
                        }
                        Ok(out)
                    }
                }
            }
            DiffScheme::Central => scalar_d1(
                &|x| self.component(mu, replace(p, nu, x)),
                p[nu],
                cfg.h1(p[nu]),
                cfg.richardson,
            ),
        }
    }

    /// Second partial of the frame component `f^(mu)` along `nu`.
    pub fn component_partial2(&self, p: Point4, mu: usize, nu: usize, cfg: &DiffConfig) -> Result<f64> {
        cfg.validate()?;
        scalar_d2(&|x| self.component(mu, replace(p, nu, x)), p[nu], cfg.h2())
    }
}

pub(crate) fn replace(mut p: Point4, nu: usize, x: f64) -> Point4 {
    p[nu] = x;
    p
}

// ---------------------------------------------------------------------------
// Stencils
// ---------------------------------------------------------------------------

pub(crate) fn d1<F>(f: &F, x: f64, h: f64, richardson: bool) -> Result<Quaternion>
where
    F: Fn(f64) -> Result<Quaternion>,
{
    let central = |h: f64| -> Result<Quaternion> {
        let fp = f(x + h)?;
        let fm = f(x - h)?;
        Ok((fp - fm).scale(1.0 / (2.0 * h)))
    };
    let d = if richardson {
        let dh = central(h)?;
        let dh2 = central(h / 2.0)?;
        (dh2.scale(4.0) - dh).scale(1.0 / 3.0)
    } else {
        central(h)?
    };
    if !d.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(d)
}

pub(crate) fn d2<F>(f: &F, x: f64, h: f64) -> Result<Quaternion>
where
    F: Fn(f64) -> Result<Quaternion>,
{
    let fp2 = f(x + 2.0 * h)?;
    let fp1 = f(x + h)?;
    let f0 = f(x)?;
    let fm1 = f(x - h)?;
    let fm2 = f(x - 2.0 * h)?;
    let d = (-fp2 + fp1.scale(16.0) - f0.scale(30.0) + fm1.scale(16.0) - fm2)
        .scale(1.0 / (12.0 * h * h));
    if !d.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(d)
}

/// Mixed partial by a four-point cross, Richardson-extrapolated once.
pub(crate) fn dmixed<G>(g: &G, x: f64, y: f64, hx: f64, hy: f64) -> Result<Quaternion>
where
    G: Fn(f64, f64) -> Result<Quaternion>,
{
    let cross = |hx: f64, hy: f64| -> Result<Quaternion> {
        let pp = g(x + hx, y + hy)?;
        let pm = g(x + hx, y - hy)?;
        let mp = g(x - hx, y + hy)?;
        let mm = g(x - hx, y - hy)?;
        Ok((pp - pm - mp + mm).scale(1.0 / (4.0 * hx * hy)))
    };
    let dh = cross(hx, hy)?;
    let dh2 = cross(hx / 2.0, hy / 2.0)?;
    let d = (dh2.scale(4.0) - dh).scale(1.0 / 3.0);
    if !d.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(d)
}

pub(crate) fn scalar_d1<F>(f: &F, x: f64, h: f64, richardson: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let q = d1(
        &|x| f(x).map(Quaternion::from_real),
        x,
        h,
        richardson,
    )?;
    Ok(q.x0)
}

pub(crate) fn scalar_d2<F>(f: &F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let q = d2(&|x| f(x).map(Quaternion::from_real), x, h)?;
    Ok(q.x0)
}
