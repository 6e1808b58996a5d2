use iwave_core::dispersion::{alpha_beta_star, dbeta_star_ds, mode_eigenvalues};
use iwave_core::field::{Field, Quadrature};
use iwave_core::regions::detect_scenario;
use iwave_core::spectral::*;
use iwave_core::{ModelParams, C64};
use proptest::prelude::*;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn params() -> ModelParams {
    ModelParams::new(0.5, 1.3, 0.7, 0.2, 0.6, -0.3, 1.1).unwrap()
}

fn tangent(base: &ModelParams, s: f64) -> ModelParams {
    let (a, b) = alpha_beta_star(base, 1, s).unwrap();
    base.with_alpha_beta(a, b)
}

fn diff_norm(a: &Field, b: &Field) -> f64 {
    sup_norm(&a.sub(b), &y_grid(64))
}

#[test]
fn eigenvectors_of_every_root() {
    let p = params();
    for k in -2..=2 {
        for r in mode_eigenvalues(&p, k).unwrap() {
            if r.s == 0.0 && k == 0 {
                continue;
            }
            let v = eigenvector(&p, k, r.s).unwrap();
            let (res, bc) = chain_residual(&p, r.s, &v, None);
            assert!(res < 1e-8, "k={k} s={} res={res}", r.s);
            assert!(bc < 1e-9, "k={k} s={} bc={bc}", r.s);
        }
    }
}

#[test]
fn eigenvector_traces() {
    let p = params();
    let s = 0.9;
    let v = eigenvector(&p, 1, s).unwrap();
    let g = iwave_core::params::gamma_tilde(&p, 1, s);
    let top = v.phi1.value(1.0);
    assert!((top - I / g.tanh()).norm() < 1e-13);
    assert_eq!(v.phi1.d1(0.0).norm(), 0.0);
}

#[test]
fn generalized_chain_at_tangency() {
    let base = params();
    for &s in &[0.3, 0.8, 1.6] {
        let p = tangent(&base, s);
        let v = eigenvector(&p, 1, s).unwrap();
        let u = generalized_eigenvector(&p, 1, s).unwrap();
        assert_eq!(u.eta, C64::new(0.0, 0.0));
        let (res, bc) = chain_residual(&p, s, &u, Some(&v));
        assert!(res < 1e-7 && bc < 1e-9, "s={s} res={res} bc={bc}");

        // reverser image: (L + i s) S u = -S v
        let su = u.reverser();
        let sv = v.reverser();
        let (res, _) = chain_residual(&p, -s, &su, Some(&sv.scale(C64::new(-1.0, 0.0))));
        assert!(res < 1e-7, "reverser chain {res}");
    }
    assert!(generalized_eigenvector(&base, 1, 0.8).is_err());
}

#[test]
fn zero_mode_chain_closes() {
    let p = params();
    let z = zero_mode_chain(&p);
    for e in [&z.e1, &z.e2] {
        let a = apply_l(&p, e);
        assert_eq!(sup_norm(&a.field, &y_grid(16)), 0.0);
    }
    let (r1, b1) = chain_residual(&p, 0.0, &z.f1, Some(&z.e1));
    let (r2, b2) = chain_residual(&p, 0.0, &z.f2, Some(&z.e2));
    assert!(r1 < 1e-10 && r2 < 1e-10 && b1 < 1e-10 && b2 < 1e-10);
    // dual basis up to the common constant c4
    let c4 = c4_closed(&p);
    let o11 = symplectic_product(&z.e1_hat(&p), &z.f1);
    let o22 = symplectic_product(&z.e2_hat(&p), &z.f2);
    let o12 = symplectic_product(&z.e1_hat(&p), &z.f2);
    let o21 = symplectic_product(&z.e2_hat(&p), &z.f1);
    assert!((o11.re - c4).abs() < 1e-10 * c4.abs().max(1.0));
    assert!((o22.re - c4).abs() < 1e-10 * c4.abs().max(1.0));
    assert!(o12.norm() < 1e-10 && o21.norm() < 1e-10);
    // normalised: Omega(e~_i, f~_i) = 1
    let n = c4.abs().sqrt();
    let sg = c4.signum();
    let one = symplectic_product(
        &z.e1_hat(&p).scale(C64::new(sg / n, 0.0)),
        &z.f1.scale(C64::new(1.0 / n, 0.0)),
    );
    assert!((one - C64::new(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn c4_closed_form() {
    let p = params();
    let c_sq = p.cos1().powi(2);
    let expect = 2.0 * std::f64::consts::PI * p.h / c_sq * (c_sq * (p.rho + 1.0 / p.h) - p.alpha);
    assert!((c4_closed(&p) - expect).abs() < 1e-14 * expect.abs().max(1.0));
}

#[test]
fn operator_anticommutes_with_reverser() {
    let p = params();
    for k in [-1, 0, 1, 2] {
        let v = eigenvector(&p, k, 0.7 + 0.1 * k as f64).unwrap();
        let lhs = apply_l(&p, &v.reverser()).field;
        let rhs = apply_l(&p, &v).field.reverser().scale(C64::new(-1.0, 0.0));
        assert!(diff_norm(&lhs, &rhs) < 1e-10 * (1.0 + sup_norm(&lhs, &y_grid(64))));
    }
}

#[test]
fn operator_is_linear() {
    let p = params();
    let u = eigenvector(&p, 1, 0.4).unwrap();
    let w = generalized_eigenvector(&tangent(&p, 0.9), 1, 0.9).unwrap();
    let (a, b) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
    let lhs = apply_l(&p, &u.scale(a).add(&w.scale(b))).field;
    let rhs = apply_l(&p, &u)
        .field
        .scale(a)
        .add(&apply_l(&p, &w).field.scale(b));
    assert!(diff_norm(&lhs, &rhs) < 1e-12 * (1.0 + sup_norm(&lhs, &y_grid(64))));
}

#[test]
fn independent_quadrature_agrees() {
    let p = params();
    let v = eigenvector(&p, 1, 0.9).unwrap();
    let a64 = apply_l(&p, &v);
    let a128 = apply_l_with(&p, &v, &Quadrature::new(128));
    assert!(diff_norm(&a64.field, &a128.field) < 1e-12);
    let u = eigenvector(&p, -1, -0.4).unwrap();
    let o64 = symplectic_product(&v, &u);
    let o128 = symplectic_product_with(&v, &u, &Quadrature::new(128));
    assert!((o64 - o128).norm() < 1e-10);
}

#[test]
fn symplectic_form_structure() {
    let p = params();
    let v = eigenvector(&p, 1, 0.9).unwrap();
    let w = eigenvector(&p, -1, 0.2).unwrap();
    assert!((symplectic_product(&v, &w) + symplectic_product(&w, &v)).norm() < 1e-12);
    let f = zero_mode_chain(&p)
        .f1
        .add(&eigenvector(&p, 0, 0.6).unwrap());
    assert!(symplectic_product(&f, &f).norm() < 1e-14);
    let z = eigenvector(&p, 2, 0.5).unwrap();
    assert_eq!(symplectic_product(&v, &z), C64::new(0.0, 0.0));
}

#[test]
fn tau1_against_quadrature_and_sign() {
    let base = params();
    for &s in &[0.3, 0.8, 1.6] {
        let p = tangent(&base, s);
        let closed = tau1_closed(&p, s).unwrap();
        let quad = tau1_quadrature(&p, s).unwrap();
        assert!(
            (closed - quad).abs() < 1e-6 * quad.abs(),
            "{closed} vs {quad}"
        );
        let q = s + p.nu0 * p.cd();
        let slope = dbeta_star_ds(&p, 1, s).unwrap();
        if slope < 0.0 && q > 0.0 {
            assert!(closed > 0.0);
        }
    }
}

#[test]
fn resonance_normalisation() {
    let (rho, h, alpha, beta, t1, t2) = (0.5, 1.0, 0.2, 0.05, 0.5, -0.3);
    let nu = iwave_core::regions::solve_nu0_zero_mode1(beta, alpha, rho, h, t2).unwrap()[0];
    let p = ModelParams::new(rho, h, alpha, beta, t1, t2, nu).unwrap();
    let report = detect_scenario(&p, None).unwrap();
    let Normalization::Resonance(r) = normalization_constants(&p, &report).unwrap() else {
        panic!("expected resonance constants");
    };
    for c in [&r.c1, &r.c2, &r.c3, &r.c4] {
        assert!(c.rel_err() < 1e-6, "{c:?}");
    }
    let v = eigenvector(&p, 0, r.kappa0).unwrap();
    let c1 = r.c1.closed;
    let scaled = v.scale(C64::new(1.0 / c1.abs().sqrt(), 0.0));
    let omega = symplectic_product(&scaled, &scaled.conj());
    assert!((omega - I * c1.signum()).norm() < 1e-8);
    let unit = symplectic_unit(&v, c1);
    assert!((symplectic_product(&unit, &unit.conj()) - I).norm() < 1e-8);
}

fn arb_params() -> impl Strategy<Value = ModelParams> {
    (
        0.1f64..0.9,
        0.3f64..3.0,
        0.05f64..2.0,
        0.01f64..0.5,
        -1.3f64..1.3,
        -1.3f64..1.3,
        0.2f64..4.0,
    )
        .prop_filter_map("admissible", |(rho, h, a, b, t1, t2, nu)| {
            let p = ModelParams::new(rho, h, a, b, t1, t2, nu).ok()?;
            (p.sd().abs() > 0.05 && p.cos1().abs() > 0.1).then_some(p)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn master_residual(p in arb_params(), k in -2i32..=2) {
        for r in mode_eigenvalues(&p, k).unwrap() {
            if k == 0 && r.s == 0.0 {
                continue;
            }
            let Ok(v) = eigenvector(&p, k, r.s) else { continue };
            let (res, bc) = chain_residual(&p, r.s, &v, None);
            let scale = sup_norm(&v, &y_grid(64)).max(1.0);
            prop_assert!(res < 1e-8 * scale && bc < 1e-9 * scale, "k={} s={} res={} bc={}", k, r.s, res, bc);
        }
    }

    #[test]
    fn orthogonal_modes(p in arb_params(), ka in -2i32..=2, kb in -2i32..=2, s in 0.1f64..2.0) {
        prop_assume!(ka + kb != 0);
        let (Ok(a), Ok(b)) = (eigenvector(&p, ka, s), eigenvector(&p, kb, -s)) else { return Ok(()) };
        prop_assert_eq!(symplectic_product(&a, &b), C64::new(0.0, 0.0));
    }
}
