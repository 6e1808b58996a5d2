use std::f64::consts::FRAC_PI_4;

use iwave_core::dispersion::*;
use iwave_core::params::{wavevector_of, ModelParams, WaveVector};
use iwave_core::Error;
use proptest::prelude::*;

/// Direct transcription with tanh, valid away from the origin.
fn d_oracle(p: &ModelParams, l1: f64, l2: f64) -> f64 {
    let g = l1.hypot(l2);
    l1 * l1 * (p.rho / g.tanh() + 1.0 / (p.h * g).tanh()) - (p.alpha + p.beta * g * g) * g
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Simple roots of f on [lo, hi] from sign changes on a uniform grid.
fn sign_scan(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let mut out = Vec::new();
    for w in xs.windows(2) {
        let (fa, fb) = (f(w[0]), f(w[1]));
        if fa == 0.0 {
            out.push(w[0]);
        } else if fa * fb < 0.0 {
            out.push(bisect(&f, w[0], w[1]));
        }
    }
    out
}

fn base() -> ModelParams {
    ModelParams::new(0.5, 1.0, 0.5, 0.1, 0.3, -0.4, 1.0).unwrap()
}

#[test]
fn d_at_trivial_points() {
    let p = ModelParams::new(0.5, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
    assert_eq!(evaluate_d(&p, WaveVector { l1: 0.0, l2: 0.0 }), 0.0);
    assert!((evaluate_d(&p, WaveVector { l1: 0.0, l2: 1.0 }) + 2.0).abs() < 1e-14);
}

#[test]
fn d_matches_tanh_form() {
    let p = base();
    for &(l1, l2) in &[(0.3, 0.2), (2.0, -1.5), (-7.0, 3.0), (0.01, 0.02)] {
        let a = evaluate_d(&p, WaveVector { l1, l2 });
        let b = d_oracle(&p, l1, l2);
        assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
    }
}

#[test]
fn axis_root_and_branch_endpoint() {
    let p = ModelParams::new(0.5, 1.0, 0.5, 0.1, 0.0, 0.0, 1.0).unwrap();
    // log-spaced scan of D(l1, 0)
    let grid: Vec<f64> = (0..=4000)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 4000.0))
        .collect();
    let f = |x: f64| d_oracle(&p, x, 0.0);
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        if f(w[0]) * f(w[1]) < 0.0 {
            roots.push(bisect(f, w[0], w[1]));
        }
    }
    assert_eq!(roots.len(), 1);
    let astar = branch_extent(&p).unwrap();
    assert!((astar - roots[0]).abs() < 1e-10, "{astar} vs {}", roots[0]);

    // l2_sq changes sign at the endpoint
    let s = sample_branch(&p, 1.5 * astar, 301);
    let first_invalid = s.iter().position(|b| !b.valid).unwrap();
    assert!(s[first_invalid - 1].a <= astar && s[first_invalid].a >= astar);
}

#[test]
fn extent_from_dense_scan() {
    let p = ModelParams::new(0.5, 1.0, 0.5, 0.1, 0.3, 0.0, 1.0).unwrap();
    let l2_sq = |a: f64| {
        let s = sample_branch(&p, a, 2);
        s[1].l2_sq
    };
    let upper = 200.0;
    let n = 200_000;
    let mut last = None;
    for i in 1..n {
        let (a, b) = (
            upper * i as f64 / n as f64,
            upper * (i + 1) as f64 / n as f64,
        );
        if l2_sq(a) >= 0.0 && l2_sq(b) < 0.0 {
            last = Some(bisect(l2_sq, a, b));
        }
    }
    let oracle = last.unwrap();
    assert!((branch_extent(&p).unwrap() - oracle).abs() < 1e-9);
}

#[test]
fn branch_limits() {
    let p = base();
    let s = sample_branch(&p, 1e-6, 3);
    assert!(s[1].l1_sq < 1e-6);
    let astar = branch_extent(&p).unwrap();
    let far = sample_branch(&p, 10.0 * astar, 3);
    assert!(far[2].l2_sq < 0.0 && !far[2].valid);
    for b in sample_branch(&p, astar, 50) {
        assert!(b.l1_sq >= 0.0);
        assert!((b.l1_sq + b.l2_sq - b.a * b.a).abs() < 1e-9 * (1.0 + b.a * b.a));
    }
}

#[test]
fn stiff_surface_tension_leaves_no_branch() {
    let p = ModelParams::new(0.5, 1.0, 2.0, 50.0, 0.3, 0.0, 1.0).unwrap();
    let eps = 1e-6;
    assert!(branch_extent(&p).unwrap() <= eps);
    assert_eq!(
        branch_extent(&p.with_alpha_beta(2.0, 0.0)),
        Err(Error::UnboundedBranch)
    );
}

#[test]
fn two_simple_mode_one_roots() {
    let p = ModelParams::new(0.5, 1.0, 0.2, 0.05, FRAC_PI_4, 0.0, 5.0).unwrap();
    let astar = branch_extent(&p).unwrap();
    let bound = astar + p.nu0;
    let oracle = sign_scan(
        |s| d_oracle(&p, wavevector_of(&p, 1, s).l1, wavevector_of(&p, 1, s).l2),
        -bound,
        bound,
        40_000,
    );
    let roots = mode_eigenvalues(&p, 1).unwrap();
    assert_eq!(oracle.len(), 2);
    assert_eq!(roots.len(), 2);
    assert!(roots[0].s < roots[1].s);
    for (r, o) in roots.iter().zip(&oracle) {
        assert_eq!(r.mult, 1);
        assert!((r.s - o).abs() < 1e-9);
    }
}

#[test]
fn lines_miss_the_branch_for_large_nu0() {
    let p = base();
    let astar = branch_extent(&p).unwrap();
    let q = p.with_nu0(10.0 * astar / p.sd().abs());
    assert!(mode_eigenvalues(&q, 1).unwrap().is_empty());
    assert!(mode_eigenvalues(&q, -1).unwrap().is_empty());
}

#[test]
fn origin_is_a_mode_zero_root() {
    let p = base();
    assert_eq!(evaluate_mode_residual(&p, 0, 0.0), 0.0);
    let z = mode_eigenvalues(&p, 0).unwrap();
    assert!(z.iter().any(|pt| pt.s == 0.0 && pt.mult >= 4));
}

#[test]
fn double_root_at_tangency_parameters() {
    let base = ModelParams::new(0.4, 1.5, 1.0, 0.1, 0.5, -0.6, 1.3).unwrap();
    let sbar = 0.8;
    let (a, b) = alpha_beta_star(&base, 1, sbar).unwrap();
    let p = base.with_alpha_beta(a, b);
    let roots = mode_eigenvalues(&p, 1).unwrap();
    let hit: Vec<_> = roots.iter().filter(|r| (r.s - sbar).abs() < 1e-5).collect();
    assert_eq!(hit.len(), 1);
    assert_eq!(hit[0].mult, 2);
    // tangency consistency: the reported root maps back to the input parameters
    let (a2, b2) = alpha_beta_star(&p, 1, hit[0].s).unwrap();
    assert!((a2 - p.alpha).abs() < 1e-6 && (b2 - p.beta).abs() < 1e-6);
}

#[test]
fn two_dimensional_curves_at_zero_angle() {
    // k = 0, theta1 = 0: alpha = xT(s) - beta s^2 with beta = xT'(s)/(2s)
    let p = ModelParams::new(0.3, 2.0, 1.0, 0.1, 0.0, 0.5, 1.0).unwrap();
    for &s in &[0.2, 0.9, 2.5] {
        let xt = |x: f64| p.rho * x / x.tanh() + x / (p.h * x).tanh();
        let hs = 1e-5;
        let dxt = (xt(s + hs) - xt(s - hs)) / (2.0 * hs);
        let beta = dxt / (2.0 * s);
        let alpha = xt(s) - beta * s * s;
        let (a, b) = alpha_beta_star(&p, 0, s).unwrap();
        assert!((a - alpha).abs() < 1e-8 && (b - beta).abs() < 1e-8);
    }
}

#[test]
fn star_point_limit() {
    let p = ModelParams::new(0.3, 2.0, 1.0, 0.1, 0.7, 0.5, 1.0).unwrap();
    let (a, b) = alpha_beta_star(&p, 0, 1e-4).unwrap();
    assert!((a - p.line_alpha()).abs() < 1e-6);
    assert!((b - p.star_beta()).abs() < 1e-6);
}

#[test]
fn signed_distances_agree_with_roots() {
    let p = ModelParams::new(0.5, 1.0, 0.2, 0.05, FRAC_PI_4, 0.0, 5.0).unwrap();
    let d = signed_distance_spectrum(&p, 1).unwrap();
    let r = mode_eigenvalues(&p, 1).unwrap();
    assert_eq!(d.len(), r.len());
    for (a, b) in d.iter().zip(&r) {
        assert!((a - b.s).abs() < 1e-12);
    }
    let m: Vec<f64> = signed_distance_spectrum(&p, -1).unwrap();
    let neg: Vec<f64> = d.iter().rev().map(|x| -x).collect();
    assert_eq!(m.len(), neg.len());
    for (a, b) in m.iter().zip(&neg) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn zero_is_mode_one_root_when_reduced_equation_holds() {
    let (rho, h, alpha, beta, t2) = (0.5, 1.0, 0.2, 0.05, -0.3);
    let nus = iwave_core::regions::solve_nu0_zero_mode1(beta, alpha, rho, h, t2).unwrap();
    assert!(!nus.is_empty());
    let p = ModelParams::new(rho, h, alpha, beta, 0.5, t2, nus[0]).unwrap();
    let d = signed_distance_spectrum(&p, 1).unwrap();
    assert!(d.iter().any(|x| x.abs() < 1e-8));
    let off = p.with_nu0(nus[0] * 1.1);
    assert!(signed_distance_spectrum(&off, 1)
        .unwrap()
        .iter()
        .all(|x| x.abs() > 1e-6));
}

#[test]
fn explicit_k_max_needed_for_parallel_lines() {
    let p = ModelParams::new(0.5, 1.0, 0.5, 0.1, 0.4, 0.4, 1.0).unwrap();
    assert_eq!(
        iwave_core::regions::detect_scenario(&p, None).unwrap_err(),
        Error::KmaxRequired
    );
    assert!(iwave_core::regions::detect_scenario(&p, Some(3)).is_ok());
    assert!(matches!(
        critical_nu0(&p),
        Err(Error::DegenerateDirection(_))
    ));
}

fn arb_params() -> impl Strategy<Value = ModelParams> {
    (
        0.1f64..0.9,
        0.3f64..3.0,
        0.05f64..2.0,
        0.01f64..0.5,
        -1.4f64..1.4,
        -1.4f64..1.4,
        0.2f64..4.0,
    )
        .prop_filter_map("admissible", |(rho, h, a, b, t1, t2, nu)| {
            let p = ModelParams::new(rho, h, a, b, t1, t2, nu).ok()?;
            (p.sd().abs() > 0.05 && p.cos1().abs() > 0.05).then_some(p)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_is_even_in_each_component(p in arb_params(), l1 in -5.0f64..5.0, l2 in -5.0f64..5.0) {
        let d = evaluate_d(&p, WaveVector { l1, l2 });
        for (a, b) in [(-l1, l2), (l1, -l2), (-l1, -l2)] {
            prop_assert_eq!(d, evaluate_d(&p, WaveVector { l1: a, l2: b }));
        }
    }

    #[test]
    fn residual_is_d_on_the_line(p in arb_params(), k in -3i32..=3, s in -6.0f64..6.0) {
        let w = wavevector_of(&p, k, s);
        prop_assume!(w.norm() > 1e-3);
        let r = evaluate_mode_residual(&p, k, s);
        let o = d_oracle(&p, w.l1, w.l2);
        prop_assert!((r - o).abs() < 1e-12 * (1.0 + o.abs()));
        prop_assert!((r - evaluate_mode_residual(&p, -k, -s)).abs() < 1e-12 * (1.0 + r.abs()));
    }

    #[test]
    fn roots_mirror_between_k_and_minus_k(p in arb_params(), k in 0i32..=2) {
        let a = mode_eigenvalues(&p, k).unwrap();
        let b = mode_eigenvalues(&p, -k).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter().rev()) {
            prop_assert!((x.s + y.s).abs() < 1e-9 * (1.0 + x.s.abs()));
            prop_assert_eq!(x.mult, y.mult);
        }
    }

    #[test]
    fn root_count_matches_sign_scan(p in arb_params(), k in 0i32..=2) {
        let astar = branch_extent(&p).unwrap();
        prop_assume!(astar > 1e-3 && astar < 60.0);
        let bound = astar + (k as f64 * p.nu0).abs();
        let f = |s: f64| evaluate_mode_residual(&p, k, s);
        let oracle: Vec<f64> = sign_scan(f, -bound - 0.01, bound + 0.013, 60_000)
            .into_iter()
            .filter(|s| s.abs() > 1e-9)
            .collect();
        let roots: Vec<_> = mode_eigenvalues(&p, k).unwrap().into_iter().filter(|r| r.s != 0.0).collect();
        prop_assume!(roots.iter().all(|r| r.mult == 1));
        prop_assert_eq!(roots.len(), oracle.len(), "roots {:?} oracle {:?}", roots, oracle);
        for (r, o) in roots.iter().zip(&oracle) {
            prop_assert!((r.s - o).abs() < 1e-8 * (1.0 + o.abs()));
        }
    }

    #[test]
    fn reported_roots_are_roots(p in arb_params(), k in -2i32..=2) {
        for r in mode_eigenvalues(&p, k).unwrap() {
            let g = wavevector_of(&p, k, r.s).norm();
            let scale = 1.0 + (p.alpha + p.beta * g * g) * g;
            prop_assert!(evaluate_mode_residual(&p, k, r.s).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn tangency_from_star_parameters(p in arb_params(), k in 0i32..=1, s in 0.1f64..3.0) {
        let Ok((a, b)) = alpha_beta_star(&p, k, s) else { return Ok(()); };
        prop_assume!(a > 0.0 && b >= 0.0);
        let q = p.with_alpha_beta(a, b);
        let h = 1e-5;
        let f = |x: f64| evaluate_mode_residual(&q, k, x);
        let fp = (f(s + h) - f(s - h)) / (2.0 * h);
        let g = wavevector_of(&q, k, s).norm();
        let scale = 1.0 + (a + b * g * g) * g;
        prop_assert!(f(s).abs() < 1e-8 * scale);
        prop_assert!(fp.abs() < 1e-6 * scale);
    }
}
