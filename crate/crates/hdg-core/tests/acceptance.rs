//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `--nocapture`).

use hdg_core::calculus::{
    cr_residual, directional_derivative, gradient, laplacian, wedge, OneForm, TWO_FORM_PAIRS,
};
use hdg_core::constraints::{
    self, check_regular, curvature, curvature_radius, frenet_residual_curvature,
    frenet_residual_torsion, torsion, Constraint, REGULARITY_NORM_TOL,
};
use hdg_core::forms::{
    connection, connection_components, connection_at, dual_form, expand_in_dual_basis,
    structural_residuals, UnitFrame,
};
use hdg_core::polar::{add_polar_angles, from_polar, polar_frame, to_polar};
use hdg_core::symplectic::{
    add_symplectic_angles, extract_components, from_symplectic, from_symplectic_polar,
    to_symplectic, to_symplectic_polar, SymplecticQuaternion,
};
use hdg_core::{component_matrix, DiffConfig, Matrix4, Quaternion, QuaternionField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn criterion(name: &str, ok: bool) {
    println!("acceptance {}: {}", name, if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance criterion failed: {name}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_quat(r: &mut ChaCha8Rng, scale: f64) -> Quaternion {
    Quaternion::new(
        r.gen_range(-scale..scale),
        r.gen_range(-scale..scale),
        r.gen_range(-scale..scale),
        r.gen_range(-scale..scale),
    )
}

fn random_unit(r: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let q = random_quat(r, 1.0);
        if q.norm() > 0.1 {
            return q.scale(1.0 / q.norm());
        }
    }
}

/// Structure-constant product, independent of the Hamilton expansion in the
/// library: e_m e_n = -delta + eps e_l.
fn oracle_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    const EPS: [[i32; 3]; 6] = [
        // (m, n, l) entries with eps = +1 / -1
        [1, 2, 3],
        [2, 3, 1],
        [3, 1, 2],
        [-2, -1, 3],
        [-3, -2, 1],
        [-1, -3, 2],
    ];
    let pc = p.components();
    let qc = q.components();
    let mut out = [0.0; 4];
    out[0] = pc[0] * qc[0] - pc[1] * qc[1] - pc[2] * qc[2] - pc[3] * qc[3];
    for m in 1..4 {
        out[m] += pc[0] * qc[m] + pc[m] * qc[0];
    }
    for row in EPS {
        let (m, n, l) = (row[0], row[1], row[2]);
        let sign = if m < 0 { -1.0 } else { 1.0 };
        let (m, n, l) = (m.unsigned_abs() as usize, n.unsigned_abs() as usize, l.unsigned_abs() as usize);
        out[l] += sign * pc[m] * qc[n];
    }
    Quaternion::from_components(out)
}

#[test]
fn criterion_01_algebra_table_and_norm() {
    let mut table_exact = true;
    for mu in 0..4 {
        for nu in 0..4 {
            let got = Quaternion::basis(mu) * Quaternion::basis(nu);
            let want = oracle_mul(Quaternion::basis(mu), Quaternion::basis(nu));
            table_exact &= got == want;
        }
    }
    let mut r = rng(1);
    let mut norm_ok = true;
    for _ in 0..10_000 {
        let p = random_quat(&mut r, 2.0);
        let q = random_quat(&mut r, 2.0);
        let lhs = (p * q).norm();
        let rhs = p.norm() * q.norm();
        norm_ok &= (lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300);
    }
    criterion("01 algebra table exact, |pq| = |p||q| (1e4 pairs)", table_exact && norm_ok);
}

#[test]
fn criterion_02_polar_frames_and_change_of_basis() {
    let mut r = rng(2);
    let mut ok = true;
    for _ in 0..100 {
        let phi = r.gen_range(0.0..PI);
        let xi = r.gen_range(0.0..TAU);
        let f = polar_frame(phi, xi);
        let units = f.units();
        // frame satisfies the natural multiplication table
        for mu in 0..4 {
            for nu in 0..4 {
                let got = units[mu] * units[nu];
                // expected product in frame coordinates, pushed through the frame
                let expect_frame = oracle_mul(Quaternion::basis(mu), Quaternion::basis(nu));
                let want = f.from_components(expect_frame.components());
                ok &= got.max_abs_diff(&want) <= 1e-12;
            }
        }
        // reconstruction of the natural units from the frame
        let (sp, cp) = phi.sin_cos();
        let (sx, cx) = xi.sin_cos();
        let i_rec = f.i * cp - f.j * sp;
        let j_rec = (f.i * sp + f.j * cp) * cx - f.k * sx;
        let k_rec = (f.i * sp + f.j * cp) * sx + f.k * cx;
        ok &= i_rec.max_abs_diff(&Quaternion::I) <= 1e-12;
        ok &= j_rec.max_abs_diff(&Quaternion::J) <= 1e-12;
        ok &= k_rec.max_abs_diff(&Quaternion::K) <= 1e-12;
    }
    criterion("02 frame multiplication table and change of basis (100 random angles)", ok);
}

#[test]
fn criterion_03_roundtrips_and_exact_extraction() {
    let mut r = rng(3);
    let mut ok = true;
    let mut count = 0;
    while count < 10_000 {
        let q = random_quat(&mut r, 3.0);
        // skip degeneracy neighborhoods
        if q.norm() < 1e-3
            || q.vector_norm() < 1e-3
            || (q.x2 * q.x2 + q.x3 * q.x3).sqrt() < 1e-3
            || (q.x0 * q.x0 + q.x1 * q.x1).sqrt() < 1e-3
        {
            continue;
        }
        count += 1;
        let rt = from_polar(&to_polar(q));
        ok &= rt.max_abs_diff(&q) <= 1e-12 * q.norm();
        let rt = from_symplectic_polar(&to_symplectic_polar(q));
        ok &= rt.max_abs_diff(&q) <= 1e-12 * q.norm();
        let rt = from_symplectic(&to_symplectic(q));
        ok &= rt == q;
    }
    // extraction formulas are exact on rationals
    let samples = [
        Quaternion::new(1.0, 2.0, 3.0, 4.0),
        Quaternion::new(0.5, -0.25, 0.75, -1.5),
        Quaternion::new(-3.0, 0.125, -0.375, 2.0),
    ];
    for q in samples {
        let (z0, z1) = extract_components(q);
        ok &= z0 == Complex64::new(q.x0, q.x1) && z1 == Complex64::new(q.x2, q.x3);
        let s = to_symplectic(q);
        ok &= (s.z0, s.z1) == (z0, z1);
    }
    criterion("03 polar/symplectic roundtrips (1e4), exact component extraction", ok);
}

#[test]
fn criterion_04_angle_addition_tables() {
    let mut ok = true;
    let i_unit = polar_frame(1.1, 4.0).i;
    for a in 0..100 {
        for b in 0..100 {
            let t1 = PI * (a as f64 / 99.0);
            let t2 = PI * (b as f64 / 99.0);
            let s = add_polar_angles(t1, t2).unwrap();
            let direct = Quaternion::from_real((t1 + t2).cos()) + i_unit * (t1 + t2).sin();
            ok &= s.reconstruct(i_unit).max_abs_diff(&direct) <= 1e-12;
        }
    }
    let (rho, phi, psi) = (1.0, 0.7, 5.3);
    for a in 0..100 {
        for b in 0..100 {
            let v1 = FRAC_PI_2 * (a as f64 / 99.0);
            let v2 = FRAC_PI_2 * (b as f64 / 99.0);
            let s = add_symplectic_angles(v1, v2).unwrap();
            let sum = v1 + v2;
            let direct = from_symplectic(&SymplecticQuaternion {
                z0: Complex64::from_polar(rho * sum.cos(), phi),
                z1: Complex64::from_polar(rho * sum.sin(), psi),
            });
            ok &= s.reconstruct(rho, phi, psi).max_abs_diff(&direct) <= 1e-12;
        }
    }
    criterion("04 angle-addition branch tables vs direct trig (100x100 grids)", ok);
}

#[test]
fn criterion_05_gradient_cr_harmonicity() {
    let f = QuaternionField::cartesian_expr("x2 - x3*i").unwrap();
    let central = DiffConfig::default();
    let exact = DiffConfig::exact();
    let mut r = rng(5);
    let mut ok = true;
    for _ in 0..100 {
        let p = [
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ];
        ok &= gradient(&f, p, &central).unwrap().norm() <= 1e-9;
        ok &= cr_residual(&f, p, &central).unwrap().iter().all(|v| v.abs() <= 1e-9);
        ok &= gradient(&f, p, &exact).unwrap().norm() <= 1e-14;
        ok &= cr_residual(&f, p, &exact).unwrap().iter().all(|v| v.abs() <= 1e-14);
        ok &= laplacian(&f, p, &central).unwrap().norm() <= 1e-6;
    }
    criterion("05 regular field: gradient, residual rows, harmonicity (100 points)", ok);
}

#[test]
fn criterion_06_directional_table_and_matrix() {
    let exact = DiffConfig::exact();
    // the component table, as printed
    let expected = |p: Quaternion| -> Matrix4 {
        Matrix4([
            [p.x0, p.x1, p.x2, p.x3],
            [-p.x1, p.x0, p.x3, -p.x2],
            [-p.x2, -p.x3, p.x0, p.x1],
            [-p.x3, p.x2, -p.x1, p.x0],
        ])
    };
    let coordinate_fields: Vec<Vec<QuaternionField>> = (0..4)
        .map(|mu| {
            (0..4)
                .map(|nu| {
                    let unit = ["1", "i", "j", "k"][nu];
                    QuaternionField::cartesian_expr(&format!("x{mu}*{unit}")).unwrap()
                })
                .collect()
        })
        .collect();

    let mut r = rng(6);
    let mut ok = true;
    for _ in 0..20 {
        let p = random_quat(&mut r, 2.0);
        let want = expected(p);
        let at = [
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
            r.gen_range(-1.0..1.0),
        ];
        // all 16 directional derivatives of x_mu e_nu, exactly
        for mu in 0..4 {
            for nu in 0..4 {
                let got = directional_derivative(p, &coordinate_fields[mu][nu], at, &exact).unwrap();
                ok &= got == want.0[mu][nu];
            }
        }
        // the assembled matrix, entrywise
        let m = component_matrix(p);
        ok &= m == want;
        // orthogonality
        let prod = m.mul(&m.transpose());
        let scaled_id = Matrix4::identity().scale(p.norm_sq());
        ok &= prod.max_abs_diff(&scaled_id) <= 1e-12 * p.norm_sq().max(1.0);
    }
    // product reversal over all basis pairs, then at random
    for mu in 0..4 {
        for nu in 0..4 {
            let p = Quaternion::basis(mu);
            let q = Quaternion::basis(nu);
            ok &= component_matrix(p).mul(&component_matrix(q)) == component_matrix(q * p);
        }
    }
    for _ in 0..100 {
        let p = random_quat(&mut r, 2.0);
        let q = random_quat(&mut r, 2.0);
        let lhs = component_matrix(p).mul(&component_matrix(q));
        let rhs = component_matrix(q * p);
        let scale = (p.norm() * q.norm()).max(1.0);
        ok &= lhs.max_abs_diff(&rhs) <= 1e-12 * scale;
    }
    criterion("06 directional-derivative table and matrix representation", ok);
}

#[test]
fn criterion_07_frenet_family() {
    let central = DiffConfig::default();
    let exact = DiffConfig::exact();
    let mut ok = true;

    // circle: unit curvature and radius on a 64-point grid
    let circle = Constraint::curve_expr("cos(t) + i*sin(t)").unwrap();
    for s in 0..64 {
        let t = TAU * (s as f64 / 64.0);
        let kappa = curvature(&circle, 0, &[t], &central).unwrap();
        ok &= (kappa.norm() - 1.0).abs() <= 1e-9;
        ok &= (curvature_radius(&circle, 0, &[t], &central).unwrap() - 1.0).abs() <= 1e-9;
    }

    // straight line: zero curvature, infinite radius
    let line = Constraint::curve_expr("(1 - j) + (2*i + k)*t").unwrap();
    let kappa = curvature(&line, 0, &[0.7], &central).unwrap();
    ok &= kappa.norm() <= 1e-9;
    ok &= curvature_radius(&line, 0, &[0.7], &central).unwrap().is_infinite();

    // decomposition residuals over the built-in family
    let helix = Constraint::curve_expr("cos(t) + i*sin(t) + j*t").unwrap();
    let surface = Constraint::surface_expr("(cos(u) + i*sin(u))*(cos(v) + j*sin(v))").unwrap();
    for c in [&circle, &line, &helix] {
        for t in [0.3, 1.9, 4.0] {
            ok &= frenet_residual_curvature(c, 0, &[t], &central).unwrap() <= 1e-6;
            ok &= frenet_residual_curvature(c, 0, &[t], &exact).unwrap() <= 1e-9;
        }
    }
    for (a, b) in [(0, 1), (1, 0)] {
        for p in [[0.4, 0.9], [1.2, 0.1]] {
            ok &= frenet_residual_torsion(&surface, a, b, &p, &central).unwrap() <= 1e-6;
            ok &= frenet_residual_torsion(&surface, a, b, &p, &exact).unwrap() <= 1e-9;
        }
    }

    // product surface: unit torsion on a 5x5 grid, asymmetric orderings
    for a in 0..5 {
        for b in 0..5 {
            let p = [FRAC_PI_2 * (a as f64 / 4.0), FRAC_PI_2 * (b as f64 / 4.0)];
            let tau = torsion(&surface, 0, 1, &p, &central).unwrap();
            ok &= (tau.norm() - 1.0).abs() <= 1e-6;
        }
    }
    let generic = [PI / 5.0, PI / 7.0];
    let tau_uv = torsion(&surface, 0, 1, &generic, &central).unwrap();
    let tau_vu = torsion(&surface, 1, 0, &generic, &central).unwrap();
    ok &= tau_uv.max_abs_diff(&tau_vu) > 0.5;

    criterion("07 Frenet data: circle, line, residuals, torsion asymmetry", ok);
}

#[test]
fn criterion_08_rotation_covariance() {
    let central = DiffConfig::default();
    let base = Constraint::curve_expr("cos(t) + i*sin(t) + j*t").unwrap();
    let mut r = rng(8);
    let mut ok = true;
    for _ in 0..20 {
        let u = random_unit(&mut r);
        let rotated = base.rotate(u).unwrap();
        for t in [0.2, 1.5] {
            let kappa = curvature(&base, 0, &[t], &central).unwrap();
            let got = curvature(&rotated, 0, &[t], &central).unwrap();
            let want = constraints::transformed_curvature(u, kappa).unwrap();
            ok &= got.max_abs_diff(&want) <= 1e-9;
            ok &= (got.norm() - kappa.norm()).abs() <= 1e-9;
        }
    }
    criterion("08 curvature conjugates under constant unit rotations (20 frames)", ok);
}

#[test]
fn criterion_09_connection() {
    let central = DiffConfig::default();
    let mut ok = true;

    let frame = UnitFrame::curve_expr("cos(t) + i*sin(t)").unwrap();
    for s in 0..32 {
        let t = TAU * (s as f64 / 32.0);
        let w = connection(&frame, 0, &[t], &central).unwrap();
        ok &= w.max_abs_diff(&Quaternion::I) <= 1e-9;
    }

    let mut r = rng(9);
    for _ in 0..10 {
        let (a, b, c) = (
            r.gen_range(0.2..0.8),
            r.gen_range(0.2..0.8),
            r.gen_range(0.2..0.8),
        );
        let src = format!(
            "(cos({a}*t) + i*sin({a}*t))*(cos({b}*t) + j*sin({b}*t))*(cos({c}*t) + k*sin({c}*t))"
        );
        let frame = UnitFrame::curve_expr(&src).unwrap();
        for t in [0.0, 0.7, 1.4] {
            let w = connection(&frame, 0, &[t], &central).unwrap();
            ok &= w.x0.abs() <= 1e-9;
            let conn = connection_at(&frame, &[t], &central).unwrap();
            let m = conn.matrix(0);
            ok &= m.add(&m.transpose()).max_abs() <= 1e-9;
            let comp = connection_components(&frame, 0, &[t], &central).unwrap();
            for l in 0..4 {
                ok &= (comp[l] - w.component(l)).abs() <= 1e-9;
            }
        }
    }
    criterion("09 connection: planar frames, pure-imaginary, antisymmetric view", ok);
}

#[test]
fn criterion_10_forms() {
    let mut r = rng(10);
    let mut ok = true;

    // wedge antisymmetry, exactly
    for _ in 0..50 {
        let a = OneForm::new([
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ]);
        let b = OneForm::new([
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ]);
        let ab = wedge(&a, &b);
        let ba = wedge(&b, &a);
        for (&(mu, nu), _) in TWO_FORM_PAIRS.iter().zip(ab.coeffs) {
            ok &= ab.coeff(mu, nu) == -ba.coeff(mu, nu);
        }
    }

    // duality and expansion
    for _ in 0..20 {
        let u = random_unit(&mut r);
        for mu in 0..4 {
            let phi = dual_form(u, mu);
            for nu in 0..4 {
                let want = if mu == nu { 1.0 } else { 0.0 };
                ok &= (phi.apply(Quaternion::basis(nu) * u) - want).abs() <= 1e-12;
            }
        }
        let psi = OneForm::new([
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ]);
        let coeffs = expand_in_dual_basis(&psi, u);
        let mut recon = OneForm::default();
        for mu in 0..4 {
            recon = recon.add(&dual_form(u, mu).as_one_form().scale(coeffs[mu]));
        }
        for nu in 0..4 {
            ok &= (recon.coeffs[nu] - psi.coeffs[nu]).abs() <= 1e-12;
        }
    }

    // structural residuals on the constant and single-parameter frames
    let central = DiffConfig::default();
    let constant = UnitFrame::curve_expr("0.6 + 0.8*i").unwrap();
    let res = structural_residuals(&constant, &[0.4], &central).unwrap();
    ok &= res.first_max <= 1e-6 && res.second_minus_max <= 1e-6;
    let rotating = UnitFrame::curve_expr("cos(t) + i*sin(t)").unwrap();
    for t in [0.0, 1.3, 3.5] {
        let res = structural_residuals(&rotating, &[t], &central).unwrap();
        ok &= res.first_max <= 1e-6;
    }
    criterion("10 forms: wedge antisymmetry, duality, expansion, structural residuals", ok);
}

#[test]
fn regularity_brute_force_agreement() {
    // supporting check: the Gram verdict matches a brute-force Jacobian rank
    // on 50 random two-parameter constraints
    let central = DiffConfig::default();
    let mut r = rng(11);
    let mut ok = true;
    for k in 0..50 {
        let degenerate = k % 3 == 0;
        let (c1, c2) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let src = if degenerate {
            format!("(u + v)*({c1} + {c2}*i + j)")
        } else {
            format!("u + {c1}*v*i + {c2}*u*j + v*k")
        };
        let c = Constraint::surface_expr(&src).unwrap();
        let p = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let report = check_regular(&c, &p, REGULARITY_NORM_TOL, &central).unwrap();

        let qu = c.partial(&p, 0, &central).unwrap().components();
        let qv = c.partial(&p, 1, &central).unwrap().components();
        let rank = rank_4x2(qu, qv);
        ok &= report.regular == (rank == 2);
    }
    criterion("supporting: Gram regularity matches Jacobian rank (50 cases)", ok);
}

fn rank_4x2(a: [f64; 4], b: [f64; 4]) -> usize {
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na.sqrt() <= 1e-8 && nb.sqrt() <= 1e-8 {
        return 0;
    }
    // area of the parallelogram: |a|^2 |b|^2 - <a,b>^2
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let gram2 = na * nb - dot * dot;
    if gram2 > 1e-10 * na * nb {
        2
    } else {
        1
    }
}
