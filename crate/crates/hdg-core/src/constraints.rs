//! Quaternionic constraints: smooth maps from an `n`-parameter domain
//! (`n` in 1..=3) into the quaternions, with curvature, torsion, and frame
//! extraction.
//!
//! For a regular constraint with tangent maps `q_a`, the unit tangent
//! `t = q_a / |q_a|` satisfies `t_a = kappa q_a` with a pure-imaginary
//! curvature `kappa`, whose components are
//! `kappa_l = <q_aa, e_l t> / |q_a|^2`. Mixed derivatives give the torsion
//! `tau_l = <q_ab, e_l t> / |q_a|^2`; the two orderings `(a, b)` and
//! `(b, a)` project onto different tangents and need not agree.

use crate::error::{Error, Result};
use crate::expr::{parse, Ast, Env, Var};
use crate::field::{d1, d2, dmixed, DiffConfig, DiffScheme};
use crate::quat::{inner, Quaternion};
use std::sync::Arc;

/// Default threshold on `|q_a|` below which a constraint counts as
/// non-regular; sits above the double-precision differentiation noise floor.
pub const REGULARITY_NORM_TOL: f64 = 1e-8;

/// Default threshold on the norm-normalized Gram determinant for linear
/// independence of the tangent maps.
pub const GRAM_COND_TOL: f64 = 1e-10;

/// Curvature/torsion magnitudes at or below this floor are treated as zero
/// when forming radii (the radius becomes infinite) and frames (undefined).
pub const CURVATURE_FLOOR: f64 = 1e-9;

/// Closure backend for constraints.
pub type ConstraintFn = Arc<dyn Fn(&[f64]) -> Result<Quaternion> + Send + Sync>;

#[derive(Clone)]
enum Backend {
    Expr(Arc<Ast>),
    Closure(ConstraintFn),
}

/// A quaternion-valued map from an `n`-parameter domain, `n` in 1..=3.
///
/// Curves use the parameter `t`; surfaces `u, v`; three-parameter
/// constraints `u, v, w`.
#[derive(Clone)]
pub struct Constraint {
    backend: Backend,
    nparams: usize,
    /// Constant left rotation applied to values (and hence derivatives).
    left_factor: Option<Quaternion>,
}

fn param_vars(nparams: usize) -> &'static [Var] {
    match nparams {
        1 => &[Var::T],
        2 => &[Var::U, Var::V],
        3 => &[Var::U, Var::V, Var::W],
        _ => panic!("constraints take 1 to 3 parameters, got {nparams}"),
    }
}

impl Constraint {
    /// One-parameter constraint (a curve) in the variable `t`.
    pub fn curve_expr(src: &str) -> Result<Self> {
        Self::from_expr(src, 1)
    }

    /// Two-parameter constraint (a surface) in `u, v`.
    pub fn surface_expr(src: &str) -> Result<Self> {
        Self::from_expr(src, 2)
    }

    /// Three-parameter constraint in `u, v, w`.
    pub fn volume_expr(src: &str) -> Result<Self> {
        Self::from_expr(src, 3)
    }

    pub fn from_expr(src: &str, nparams: usize) -> Result<Self> {
        let ast = parse(src)?;
        let allowed = param_vars(nparams);
        for v in ast.free_vars() {
            if !allowed.contains(&v) {
                return Err(crate::expr::EvalError::UnboundVariable(v.name()).into());
            }
        }
        if ast.uses_polar_units() {
            return Err(crate::expr::EvalError::PolarUnitsUnavailable.into());
        }
        Ok(Self {
            backend: Backend::Expr(Arc::new(ast)),
            nparams,
            left_factor: None,
        })
    }

    pub fn from_fn<F>(f: F, nparams: usize) -> Self
    where
        F: Fn(&[f64]) -> Quaternion + Send + Sync + 'static,
    {
        assert!((1..=3).contains(&nparams));
        Self {
            backend: Backend::Closure(Arc::new(move |p| Ok(f(p)))),
            nparams,
            left_factor: None,
        }
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn param_name(&self, a: usize) -> &'static str {
        param_vars(self.nparams)[a].name()
    }

    pub fn is_expr_backed(&self) -> bool {
        matches!(self.backend, Backend::Expr(_))
    }

    /// The constraint rotated on the left by a constant unit quaternion.
    pub fn rotate(&self, u: Quaternion) -> Result<Self> {
        check_unit_rotation(u)?;
        let factor = match self.left_factor {
            Some(existing) => u * existing,
            None => u,
        };
        Ok(Self {
            backend: self.backend.clone(),
            nparams: self.nparams,
            left_factor: Some(factor),
        })
    }

    fn env_at(&self, p: &[f64]) -> Env {
        let mut env = Env::new();
        for (var, x) in param_vars(self.nparams).iter().zip(p) {
            env.set(*var, *x);
        }
        env
    }

    pub fn value(&self, p: &[f64]) -> Result<Quaternion> {
        debug_assert_eq!(p.len(), self.nparams);
        let raw = match &self.backend {
            Backend::Expr(ast) => ast.eval(&self.env_at(p))?,
            Backend::Closure(f) => f(p)?,
        };
        let q = match self.left_factor {
            Some(u) => u * raw,
            None => raw,
        };
        if !q.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(q)
    }

    fn value_at(&self, p: &[f64], a: usize, x: f64) -> Result<Quaternion> {
        let mut moved = p.to_vec();
        moved[a] = x;
        self.value(&moved)
    }

    /// Tangent map `q_a` at `p`.
    pub fn partial(&self, p: &[f64], a: usize, cfg: &DiffConfig) -> Result<Quaternion> {
        cfg.validate()?;
        match cfg.scheme {
            DiffScheme::Exact => {
                let Backend::Expr(ast) = &self.backend else {
                    return Err(Error::ExactUnavailable);
                };
                let (_, der) = ast.eval_dual(&self.env_at(p), param_vars(self.nparams)[a])?;
                let d = match self.left_factor {
                    Some(u) => u * der,
                    None => der,
                };
                if !d.is_finite() {
                    return Err(Error::NonFinite);
                }
                Ok(d)
            }
            DiffScheme::Central => d1(
                &|x| self.value_at(p, a, x),
                p[a],
                cfg.h1(p[a]),
                cfg.richardson,
            ),
        }
    }

    /// Pure second derivative `q_aa` at `p`.
    pub fn partial2(&self, p: &[f64], a: usize, cfg: &DiffConfig) -> Result<Quaternion> {
        cfg.validate()?;
        match cfg.scheme {
            // difference the exact first derivative
            DiffScheme::Exact if self.is_expr_backed() => {
                let f = |x: f64| {
                    let mut moved = p.to_vec();
                    moved[a] = x;
                    self.partial(&moved, a, cfg)
                };
                d1(&f, p[a], cfg.h1(p[a]), false)
            }
            _ => d2(&|x| self.value_at(p, a, x), p[a], cfg.h2()),
        }
    }

    /// Mixed derivative `q_ab` (`a != b`) at `p`, from a symmetric cross
    /// stencil; in exact mode the exact `q_a` is differenced along `b`.
    pub fn partial_mixed(
        &self,
        p: &[f64],
        a: usize,
        b: usize,
        cfg: &DiffConfig,
    ) -> Result<Quaternion> {
        cfg.validate()?;
        if a == b {
            return self.partial2(p, a, cfg);
        }
        match cfg.scheme {
            DiffScheme::Exact if self.is_expr_backed() => {
                let f = |x: f64| {
                    let mut moved = p.to_vec();
                    moved[b] = x;
                    self.partial(&moved, a, cfg)
                };
                d1(&f, p[b], cfg.h1(p[b]), false)
            }
            _ => {
                let g = |x: f64, y: f64| {
                    let mut moved = p.to_vec();
                    moved[a] = x;
                    moved[b] = y;
                    self.value(&moved)
                };
                dmixed(&g, p[a], p[b], cfg.h2(), cfg.h2())
            }
        }
    }
}

fn check_unit_rotation(u: Quaternion) -> Result<()> {
    let n = u.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitRotation { norm: n });
    }
    Ok(())
}

/// Tangent map `q_a`.
pub fn tangent(c: &Constraint, a: usize, p: &[f64], cfg: &DiffConfig) -> Result<Quaternion> {
    c.partial(p, a, cfg)
}

/// Unit tangent `q_a / |q_a|`; non-regular points are rejected.
pub fn unit_tangent(c: &Constraint, a: usize, p: &[f64], cfg: &DiffConfig) -> Result<Quaternion> {
    let (_, _, t) = regular_tangent(c, a, p, cfg)?;
    Ok(t)
}

/// Regularity report: tangent norms, the Gram matrix of the tangent maps,
/// its spectrum, and the verdict.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub tangent_norms: Vec<f64>,
    /// `gram[a][b] = <q_a, q_b>`.
    pub gram: Vec<Vec<f64>>,
    pub gram_det: f64,
    /// Ascending eigenvalues of the Gram matrix.
    pub gram_eigenvalues: Vec<f64>,
    /// `det(gram) / prod_a |q_a|^2`, a scale-free independence measure in `[0, 1]`.
    pub normalized_det: f64,
    pub regular: bool,
}

/// Evaluate regularity at `p`: every `|q_a|` must exceed `tol` and the
/// norm-normalized Gram determinant must exceed [`GRAM_COND_TOL`].
pub fn check_regular(
    c: &Constraint,
    p: &[f64],
    tol: f64,
    cfg: &DiffConfig,
) -> Result<RegularityReport> {
    let n = c.nparams();
    let mut tangents = Vec::with_capacity(n);
    for a in 0..n {
        tangents.push(c.partial(p, a, cfg)?);
    }
    let tangent_norms: Vec<f64> = tangents.iter().map(|q| q.norm()).collect();
    let mut gram = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            gram[a][b] = inner(tangents[a], tangents[b]);
        }
    }
    let gram_det = det(&gram);
    let gram_eigenvalues = sym_eigenvalues(&gram);
    let norm_prod: f64 = tangent_norms.iter().map(|x| x * x).product();
    let normalized_det = if norm_prod > 0.0 {
        gram_det / norm_prod
    } else {
        0.0
    };
    let regular = tangent_norms.iter().all(|&x| x > tol) && normalized_det > GRAM_COND_TOL;
    Ok(RegularityReport {
        tangent_norms,
        gram,
        gram_det,
        gram_eigenvalues,
        normalized_det,
        regular,
    })
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!(),
    }
}

/// Eigenvalues of a symmetric matrix of size 1..=3, ascending.
fn sym_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    match m.len() {
        1 => vec![m[0][0]],
        2 => {
            let tr = m[0][0] + m[1][1];
            let d = det(m);
            let disc = ((tr * tr / 4.0) - d).max(0.0).sqrt();
            vec![tr / 2.0 - disc, tr / 2.0 + disc]
        }
        3 => {
            // trigonometric closed form for a symmetric 3x3
            let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
            if p1 == 0.0 {
                let mut v = vec![m[0][0], m[1][1], m[2][2]];
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                return v;
            }
            let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
            let p2 = (m[0][0] - q).powi(2)
                + (m[1][1] - q).powi(2)
                + (m[2][2] - q).powi(2)
                + 2.0 * p1;
            let p = (p2 / 6.0).sqrt();
            let mut b = vec![vec![0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    b[i][j] = (m[i][j] - if i == j { q } else { 0.0 }) / p;
                }
            }
            let r = (det(&b) / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let e1 = q + 2.0 * p * phi.cos();
            let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
            let e2 = 3.0 * q - e1 - e3;
            let mut v = vec![e1, e2, e3];
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        }
        _ => unreachable!(),
    }
}

fn regular_tangent(
    c: &Constraint,
    a: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<(Quaternion, f64, Quaternion)> {
    let qa = c.partial(p, a, cfg)?;
    let n = qa.norm();
    if n <= REGULARITY_NORM_TOL {
        return Err(Error::NotRegular {
            param: c.param_name(a),
            norm: n,
        });
    }
    Ok((qa, n, qa.scale(1.0 / n)))
}

/// Which side of the tangent the curvature/torsion coefficient multiplies:
/// `t_a = kappa q_a` (left, the default) or `t_a = q_a kappa` (right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientSide {
    #[default]
    Left,
    Right,
}

/// Coefficients of `d` over the moving basis `{e_l t}` (left) or `{t e_l}`
/// (right), assembled as a pure-imaginary quaternion.
fn imaginary_projection(
    d: Quaternion,
    t: Quaternion,
    norm_sq: f64,
    side: CoefficientSide,
) -> Quaternion {
    let axis = |e: Quaternion| match side {
        CoefficientSide::Left => e * t,
        CoefficientSide::Right => t * e,
    };
    Quaternion::pure(
        inner(d, axis(Quaternion::I)) / norm_sq,
        inner(d, axis(Quaternion::J)) / norm_sq,
        inner(d, axis(Quaternion::K)) / norm_sq,
    )
}

/// Quaternionic curvature along parameter `a` (pure imaginary).
pub fn curvature(c: &Constraint, a: usize, p: &[f64], cfg: &DiffConfig) -> Result<Quaternion> {
    curvature_with_side(c, a, p, cfg, CoefficientSide::Left)
}

/// Curvature with an explicit coefficient side.
pub fn curvature_with_side(
    c: &Constraint,
    a: usize,
    p: &[f64],
    cfg: &DiffConfig,
    side: CoefficientSide,
) -> Result<Quaternion> {
    let (_, n, t) = regular_tangent(c, a, p, cfg)?;
    let qaa = c.partial2(p, a, cfg)?;
    Ok(imaginary_projection(qaa, t, n * n, side))
}

/// Quaternionic torsion for the ordered pair `(a, b)`, `a != b`.
pub fn torsion(
    c: &Constraint,
    a: usize,
    b: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<Quaternion> {
    torsion_with_side(c, a, b, p, cfg, CoefficientSide::Left)
}

/// Torsion with an explicit coefficient side.
pub fn torsion_with_side(
    c: &Constraint,
    a: usize,
    b: usize,
    p: &[f64],
    cfg: &DiffConfig,
    side: CoefficientSide,
) -> Result<Quaternion> {
    assert_ne!(a, b, "torsion takes an ordered pair of distinct parameters");
    let (_, n, t) = regular_tangent(c, a, p, cfg)?;
    let qab = c.partial_mixed(p, a, b, cfg)?;
    Ok(imaginary_projection(qab, t, n * n, side))
}

/// Unit normal `kappa t / |kappa|`; undefined where curvature vanishes.
pub fn normal(c: &Constraint, a: usize, p: &[f64], cfg: &DiffConfig) -> Result<Quaternion> {
    let (_, _, t) = regular_tangent(c, a, p, cfg)?;
    let kappa = curvature(c, a, p, cfg)?;
    let kn = kappa.norm();
    if kn <= CURVATURE_FLOOR {
        return Err(Error::UndefinedFrame {
            quantity: "curvature",
        });
    }
    Ok((kappa * t).scale(1.0 / kn))
}

/// Unit binormal `tau t / |tau|`; undefined where torsion vanishes.
pub fn binormal(
    c: &Constraint,
    a: usize,
    b: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<Quaternion> {
    let (_, _, t) = regular_tangent(c, a, p, cfg)?;
    let tau = torsion(c, a, b, p, cfg)?;
    let tn = tau.norm();
    if tn <= CURVATURE_FLOOR {
        return Err(Error::UndefinedFrame { quantity: "torsion" });
    }
    Ok((tau * t).scale(1.0 / tn))
}

fn radius_from_magnitude(mag: f64) -> f64 {
    if mag <= CURVATURE_FLOOR {
        f64::INFINITY
    } else {
        1.0 / mag
    }
}

/// Curvature radius `1 / |kappa|`; infinite (not an error) on straight parts.
pub fn curvature_radius(c: &Constraint, a: usize, p: &[f64], cfg: &DiffConfig) -> Result<f64> {
    Ok(radius_from_magnitude(curvature(c, a, p, cfg)?.norm()))
}

/// Torsion radius `1 / |tau|`; infinite where the torsion vanishes.
pub fn torsion_radius(
    c: &Constraint,
    a: usize,
    b: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<f64> {
    Ok(radius_from_magnitude(torsion(c, a, b, p, cfg)?.norm()))
}

/// Residual of the curvature decomposition
/// `q_aa = |q_a|_a t + |q_a|^2 kappa t`, with `|q_a|_a = <q_a, q_aa> / |q_a|`.
pub fn frenet_residual_curvature(
    c: &Constraint,
    a: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<f64> {
    let (qa, n, t) = regular_tangent(c, a, p, cfg)?;
    let qaa = c.partial2(p, a, cfg)?;
    let norm_rate = inner(qa, qaa) / n;
    let kappa = imaginary_projection(qaa, t, n * n, CoefficientSide::Left);
    let recon = t.scale(norm_rate) + (kappa * t).scale(n * n);
    Ok((qaa - recon).norm())
}

/// Residual of the torsion decomposition
/// `q_ab = |q_a|_b t + |q_a|^2 tau t` for the ordered pair `(a, b)`.
pub fn frenet_residual_torsion(
    c: &Constraint,
    a: usize,
    b: usize,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<f64> {
    let (qa, n, t) = regular_tangent(c, a, p, cfg)?;
    let qab = c.partial_mixed(p, a, b, cfg)?;
    let norm_rate = inner(qa, qab) / n;
    let tau = imaginary_projection(qab, t, n * n, CoefficientSide::Left);
    let recon = t.scale(norm_rate) + (tau * t).scale(n * n);
    Ok((qab - recon).norm())
}

/// Curvature conjugated by a constant unit rotation: `u kappa conj(u)`.
///
/// This is the curvature of the rotated constraint `u q`; the magnitude and
/// radius are unchanged.
pub fn transformed_curvature(u: Quaternion, kappa: Quaternion) -> Result<Quaternion> {
    check_unit_rotation(u)?;
    Ok(u * kappa * u.conj())
}

/// Frenet data of one parameter direction.
#[derive(Debug, Clone)]
pub struct ParamFrenet {
    pub param: &'static str,
    pub tangent: Quaternion,
    pub tangent_norm: f64,
    pub unit_tangent: Quaternion,
    pub curvature: Quaternion,
    pub curvature_norm: f64,
    /// Unit normal, absent where curvature vanishes.
    pub normal: Option<Quaternion>,
    pub curvature_radius: f64,
}

/// Frenet data of one ordered parameter pair.
#[derive(Debug, Clone)]
pub struct PairFrenet {
    pub params: (&'static str, &'static str),
    pub torsion: Quaternion,
    pub torsion_norm: f64,
    /// Unit binormal, absent where torsion vanishes.
    pub binormal: Option<Quaternion>,
    pub torsion_radius: f64,
}

/// Complete Frenet extraction at a point.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub per_param: Vec<ParamFrenet>,
    /// All ordered pairs `(a, b)`, `a != b`, in row-major order.
    pub pairs: Vec<PairFrenet>,
    pub regularity: RegularityReport,
}

/// Extract tangents, curvatures, torsions, frames, and radii at `p`.
pub fn frenet_data(c: &Constraint, p: &[f64], cfg: &DiffConfig) -> Result<FrenetData> {
    let regularity = check_regular(c, p, REGULARITY_NORM_TOL, cfg)?;
    let n = c.nparams();
    let mut per_param = Vec::with_capacity(n);
    for a in 0..n {
        let (qa, norm, t) = regular_tangent(c, a, p, cfg)?;
        let qaa = c.partial2(p, a, cfg)?;
        let kappa = imaginary_projection(qaa, t, norm * norm, CoefficientSide::Left);
        let kn = kappa.norm();
        let normal = if kn > CURVATURE_FLOOR {
            Some((kappa * t).scale(1.0 / kn))
        } else {
            None
        };
        per_param.push(ParamFrenet {
            param: c.param_name(a),
            tangent: qa,
            tangent_norm: norm,
            unit_tangent: t,
            curvature: kappa,
            curvature_norm: kn,
            normal,
            curvature_radius: radius_from_magnitude(kn),
        });
    }
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let t = per_param[a].unit_tangent;
            let norm = per_param[a].tangent_norm;
            let qab = c.partial_mixed(p, a, b, cfg)?;
            let tau = imaginary_projection(qab, t, norm * norm, CoefficientSide::Left);
            let tn = tau.norm();
            let binormal = if tn > CURVATURE_FLOOR {
                Some((tau * t).scale(1.0 / tn))
            } else {
                None
            };
            pairs.push(PairFrenet {
                params: (c.param_name(a), c.param_name(b)),
                torsion: tau,
                torsion_norm: tn,
                binormal,
                torsion_radius: radius_from_magnitude(tn),
            });
        }
    }
    Ok(FrenetData {
        per_param,
        pairs,
        regularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfgs() -> [DiffConfig; 2] {
        [DiffConfig::default(), DiffConfig::exact()]
    }

    fn circle() -> Constraint {
        Constraint::curve_expr("cos(t) + i*sin(t)").unwrap()
    }

    fn product_surface() -> Constraint {
        Constraint::surface_expr("(cos(u) + i*sin(u))*(cos(v) + j*sin(v))").unwrap()
    }

    #[test]
    fn tangent_examples() {
        for cfg in cfgs() {
            let c = circle();
            let qt = tangent(&c, 0, &[0.0], &cfg).unwrap();
            assert!(qt.max_abs_diff(&Quaternion::I) <= 1e-9, "{cfg:?}");
            let t = unit_tangent(&c, 0, &[0.0], &cfg).unwrap();
            assert!(t.max_abs_diff(&Quaternion::I) <= 1e-9);

            let c = Constraint::surface_expr("u + i*v").unwrap();
            let qu = tangent(&c, 0, &[0.4, -0.9], &cfg).unwrap();
            let qv = tangent(&c, 1, &[0.4, -0.9], &cfg).unwrap();
            assert!(qu.max_abs_diff(&Quaternion::ONE) <= 1e-10);
            assert!(qv.max_abs_diff(&Quaternion::I) <= 1e-10);
        }
    }

    #[test]
    fn unit_tangent_is_orthogonal_to_its_derivative() {
        let c = product_surface();
        let cfg = DiffConfig::default();
        let p = [0.7, 1.3];
        for a in 0..2 {
            for b in 0..2 {
                let h = 1e-5;
                let mut pp = p;
                pp[b] += h;
                let mut pm = p;
                pm[b] -= h;
                let tp = unit_tangent(&c, a, &pp, &cfg).unwrap();
                let tm = unit_tangent(&c, a, &pm, &cfg).unwrap();
                let tb = (tp - tm).scale(1.0 / (2.0 * h));
                let t = unit_tangent(&c, a, &p, &cfg).unwrap();
                assert!(inner(t, tb).abs() <= 1e-6, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn regularity_examples() {
        let cfg = DiffConfig::default();
        let c = Constraint::surface_expr("u + i*v").unwrap();
        let r = check_regular(&c, &[0.2, 0.3], REGULARITY_NORM_TOL, &cfg).unwrap();
        assert!(r.regular);
        assert!((r.gram_det - 1.0).abs() <= 1e-8);
        assert!(r.gram_eigenvalues.iter().all(|&e| (e - 1.0).abs() <= 1e-8));

        // q_v vanishes identically
        let c = Constraint::surface_expr("u + i*u").unwrap();
        let r = check_regular(&c, &[0.2, 0.3], REGULARITY_NORM_TOL, &cfg).unwrap();
        assert!(!r.regular);

        // derivative vanishes at t = 0
        let c = Constraint::curve_expr("t^3").unwrap();
        let r = check_regular(&c, &[0.0], REGULARITY_NORM_TOL, &cfg).unwrap();
        assert!(!r.regular);

        // dependent but nonzero tangents
        let c = Constraint::surface_expr("u + v + i*(u + v)").unwrap();
        let r = check_regular(&c, &[0.5, 0.1], REGULARITY_NORM_TOL, &cfg).unwrap();
        assert!(!r.regular);
        assert!(r.normalized_det.abs() <= 1e-10);
    }

    #[test]
    fn circle_curvature() {
        for cfg in cfgs() {
            let c = circle();
            for t in [0.0, 0.9, 2.5, 4.4] {
                let kappa = curvature(&c, 0, &[t], &cfg).unwrap();
                assert!(kappa.max_abs_diff(&Quaternion::I) <= 1e-9, "{cfg:?} t={t}");
                assert_eq!(kappa.x0, 0.0);
                let r = curvature_radius(&c, 0, &[t], &cfg).unwrap();
                assert!((r - 1.0).abs() <= 1e-9);
            }
            // normal at t = 0 points back to -q(0) = -1
            let n = normal(&c, 0, &[0.0], &cfg).unwrap();
            assert!(n.max_abs_diff(&-Quaternion::ONE) <= 1e-9);
        }
    }

    #[test]
    fn doubled_circle_normalizes_speed() {
        for cfg in cfgs() {
            let c = Constraint::curve_expr("cos(2*t) + i*sin(2*t)").unwrap();
            let kappa = curvature(&c, 0, &[0.7], &cfg).unwrap();
            assert!((kappa.norm() - 1.0).abs() <= 1e-8, "{cfg:?}");
            let r = curvature_radius(&c, 0, &[0.7], &cfg).unwrap();
            assert!((r - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn straight_line_has_infinite_radius() {
        for cfg in cfgs() {
            let c = Constraint::curve_expr("(1 + 2*i - k) + (3 - j)*t").unwrap();
            let kappa = curvature(&c, 0, &[1.2], &cfg).unwrap();
            assert!(kappa.norm() <= 1e-9, "{cfg:?}");
            let r = curvature_radius(&c, 0, &[1.2], &cfg).unwrap();
            assert!(r.is_infinite());
            assert!(matches!(
                normal(&c, 0, &[1.2], &cfg),
                Err(Error::UndefinedFrame { .. })
            ));
        }
    }

    #[test]
    fn product_surface_torsion() {
        for cfg in cfgs() {
            let c = product_surface();
            // closed form: tau_uv = -(j cos 2u + k sin 2u), tau_vu = i
            for (u, v) in [(0.0, 0.0), (0.6, 1.1), (2.0, 0.3)] {
                let tau = torsion(&c, 0, 1, &[u, v], &cfg).unwrap();
                let want = Quaternion::pure(0.0, -(2.0 * u).cos(), -(2.0 * u).sin());
                assert!(tau.max_abs_diff(&want) <= 1e-6, "{cfg:?} u={u}");
                assert!((tau.norm() - 1.0).abs() <= 1e-6);
                assert_eq!(tau.x0, 0.0);

                let tau_vu = torsion(&c, 1, 0, &[u, v], &cfg).unwrap();
                assert!(tau_vu.max_abs_diff(&Quaternion::I) <= 1e-6);
                let r = torsion_radius(&c, 0, 1, &[u, v], &cfg).unwrap();
                assert!((r - 1.0).abs() <= 1e-6);
            }
            // asymmetry at a generic point
            let p = [std::f64::consts::PI / 5.0, std::f64::consts::PI / 7.0];
            let tau_uv = torsion(&c, 0, 1, &p, &cfg).unwrap();
            let tau_vu = torsion(&c, 1, 0, &p, &cfg).unwrap();
            assert!(tau_uv.max_abs_diff(&tau_vu) > 0.5);
        }
    }

    #[test]
    fn flat_surface_has_zero_torsion() {
        let c = Constraint::surface_expr("u + i*v").unwrap();
        let cfg = DiffConfig::default();
        let tau = torsion(&c, 0, 1, &[0.4, 0.2], &cfg).unwrap();
        assert!(tau.norm() <= 1e-9);
        let r = torsion_radius(&c, 0, 1, &[0.4, 0.2], &cfg).unwrap();
        assert!(r.is_infinite());
    }

    #[test]
    fn binormal_is_unit_and_tangent_orthogonal() {
        let c = product_surface();
        for cfg in cfgs() {
            let p = [0.8, 0.5];
            let b = binormal(&c, 0, 1, &p, &cfg).unwrap();
            assert!((b.norm() - 1.0).abs() <= 1e-9);
            let t = unit_tangent(&c, 0, &p, &cfg).unwrap();
            assert!(inner(b, t).abs() <= 1e-9, "{cfg:?}");
        }
    }

    #[test]
    fn frenet_residuals() {
        let line = Constraint::curve_expr("1 + (i + 2*j)*t").unwrap();
        let cfg = DiffConfig::default();
        assert!(frenet_residual_curvature(&line, 0, &[0.5], &cfg).unwrap() <= 1e-12);

        for cfg in cfgs() {
            let c = circle();
            let tol = if cfg.scheme == DiffScheme::Exact {
                1e-9
            } else {
                1e-6
            };
            for t in [0.1, 1.7, 3.9] {
                assert!(frenet_residual_curvature(&c, 0, &[t], &cfg).unwrap() <= tol);
            }
            let s = product_surface();
            let p = [0.9, 1.4];
            assert!(frenet_residual_torsion(&s, 0, 1, &p, &cfg).unwrap() <= tol);
            assert!(frenet_residual_torsion(&s, 1, 0, &p, &cfg).unwrap() <= tol);
        }
    }

    #[test]
    fn rotation_covariance() {
        let cfg = DiffConfig::default();
        let c = circle();
        let kappa = curvature(&c, 0, &[0.4], &cfg).unwrap();

        // u = 1 leaves curvature alone
        let same = transformed_curvature(Quaternion::ONE, kappa).unwrap();
        assert_eq!(same, kappa);

        // u = j conjugates i to -i
        let rotated = c.rotate(Quaternion::J).unwrap();
        let got = curvature(&rotated, 0, &[0.4], &cfg).unwrap();
        assert!(got.max_abs_diff(&-Quaternion::I) <= 1e-9);
        let want = transformed_curvature(Quaternion::J, kappa).unwrap();
        assert!(got.max_abs_diff(&want) <= 1e-9);
        assert!((got.norm() - kappa.norm()).abs() <= 1e-9);

        // exact mode survives rotation wrapping
        let got = curvature(&rotated, 0, &[0.4], &DiffConfig::exact()).unwrap();
        assert!(got.max_abs_diff(&want) <= 1e-9);

        assert!(matches!(
            c.rotate(Quaternion::new(1.0, 1.0, 0.0, 0.0)),
            Err(Error::NonUnitRotation { .. })
        ));
    }

    #[test]
    fn frenet_data_shapes() {
        let cfg = DiffConfig::default();
        let c = Constraint::volume_expr("u + i*v + j*w").unwrap();
        let d = frenet_data(&c, &[0.1, 0.2, 0.3], &cfg).unwrap();
        assert_eq!(d.per_param.len(), 3);
        assert_eq!(d.pairs.len(), 6);
        assert!(d.regularity.regular);
        assert_eq!(d.per_param[0].param, "u");
        assert_eq!(d.pairs[0].params, ("u", "v"));

        let c = circle();
        let d = frenet_data(&c, &[1.0], &cfg).unwrap();
        assert_eq!(d.per_param.len(), 1);
        assert!(d.pairs.is_empty());
        assert!((d.per_param[0].curvature_norm - 1.0).abs() <= 1e-9);
        assert!(d.per_param[0].normal.is_some());
    }

    #[test]
    fn right_sided_coefficients() {
        // right mode decomposes t_a over {t e_l}: the reconstruction
        // q_aa = |q_a|_a t + |q_a|^2 t kappa must close
        let c = product_surface();
        let cfg = DiffConfig::default();
        let p = [0.8, 1.3];
        for a in 0..2 {
            let qa = c.partial(&p, a, &cfg).unwrap();
            let n = qa.norm();
            let t = qa.scale(1.0 / n);
            let qaa = c.partial2(&p, a, &cfg).unwrap();
            let kappa_r =
                curvature_with_side(&c, a, &p, &cfg, CoefficientSide::Right).unwrap();
            assert_eq!(kappa_r.x0, 0.0);
            let norm_rate = inner(qa, qaa) / n;
            let recon = t.scale(norm_rate) + (t * kappa_r).scale(n * n);
            assert!((qaa - recon).norm() <= 1e-6, "a={a}");
        }
        // on the circle both sides agree (everything commutes with i)
        let circle = circle();
        let left = curvature(&circle, 0, &[0.4], &cfg).unwrap();
        let right =
            curvature_with_side(&circle, 0, &[0.4], &cfg, CoefficientSide::Right).unwrap();
        assert!(left.max_abs_diff(&right) <= 1e-9);
        // torsion variant stays pure imaginary and closes the same way
        let tau_r =
            torsion_with_side(&c, 0, 1, &p, &cfg, CoefficientSide::Right).unwrap();
        assert_eq!(tau_r.x0, 0.0);
    }

    #[test]
    fn non_regular_points_error_for_frame_data() {
        let c = Constraint::curve_expr("t^3").unwrap();
        let cfg = DiffConfig::default();
        assert!(matches!(
            curvature(&c, 0, &[0.0], &cfg),
            Err(Error::NotRegular { param: "t", .. })
        ));
    }

    #[test]
    fn gram_spectrum_against_jacobian_rank() {
        // the report's verdict must agree with a brute-force rank of the
        // 4 x n real Jacobian
        let cfg = DiffConfig::default();
        let cases: Vec<(Constraint, Vec<f64>, usize)> = vec![
            (Constraint::surface_expr("u + i*v").unwrap(), vec![0.1, 0.2], 2),
            (Constraint::surface_expr("u + i*u").unwrap(), vec![0.1, 0.2], 1),
            (
                Constraint::volume_expr("u + i*v + j*w").unwrap(),
                vec![0.3, 0.1, 0.5],
                3,
            ),
            (
                Constraint::volume_expr("u + i*v + j*(u + v)").unwrap(),
                vec![0.3, 0.1, 0.5],
                2,
            ),
        ];
        for (c, p, want_rank) in cases {
            let n = c.nparams();
            let mut cols = Vec::new();
            for a in 0..n {
                cols.push(c.partial(&p, a, &cfg).unwrap().components());
            }
            let rank = jacobian_rank(&mut cols.clone());
            assert_eq!(rank, want_rank);
            let r = check_regular(&c, &p, REGULARITY_NORM_TOL, &cfg).unwrap();
            assert_eq!(r.regular, rank == n, "rank {rank} for n={n}");
        }
    }

    // column-pivoted elimination rank of a 4 x n matrix given as columns
    fn jacobian_rank(cols: &mut Vec<[f64; 4]>) -> usize {
        let mut rank = 0;
        let mut rows_used = [false; 4];
        for _ in 0..cols.len() {
            // pick the column/row with the largest remaining pivot
            let mut best = (0usize, 0usize, 0.0f64);
            for (ci, col) in cols.iter().enumerate() {
                for ri in 0..4 {
                    if !rows_used[ri] && col[ri].abs() > best.2 {
                        best = (ci, ri, col[ri].abs());
                    }
                }
            }
            if best.2 <= 1e-10 {
                break;
            }
            let (ci, ri, _) = best;
            let pivot_col = cols[ci];
            let pivot = pivot_col[ri];
            rows_used[ri] = true;
            rank += 1;
            for (idx, col) in cols.iter_mut().enumerate() {
                if idx == ci {
                    continue;
                }
                let factor = col[ri] / pivot;
                for r in 0..4 {
                    col[r] -= factor * pivot_col[r];
                }
            }
            cols[ci] = [0.0; 4];
        }
        rank
    }
}
