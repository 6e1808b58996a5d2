use iwave_core::dynamics::*;
use iwave_core::normalform::{DoublyPeriodicCoefficients, HopfCoefficients};
use iwave_core::{Error, C64};
use nalgebra::Matrix4;
use proptest::prelude::*;

fn bright_coeffs() -> HopfCoefficients {
    HopfCoefficients::simple(0.8, -1.0, 1.0)
}

fn dark_coeffs() -> HopfCoefficients {
    HopfCoefficients::simple(0.8, -1.0, -1.0)
}

fn full_coeffs() -> HopfCoefficients {
    HopfCoefficients {
        s: 0.7,
        tau1: 1.0,
        c2_1: -1.2,
        d1_0: 0.9,
        c3_1: 0.3,
        d2_0: 0.25,
        d3_0: -0.15,
    }
}

fn sech_profile(c: &HopfCoefficients, mu: f64, x: f64) -> f64 {
    let lam = (-c.c2_1 * mu).sqrt();
    (-c.c2_1 * mu / c.d1_0).sqrt() / (lam * x).cosh()
}

fn as_vec(st: &ReducedState) -> [f64; 4] {
    [st.a.re, st.a.im, st.b.re, st.b.im]
}

fn linearization(c: &HopfCoefficients, mu: f64) -> Matrix4<f64> {
    let eps = 1e-7;
    let mut m = Matrix4::zeros();
    for j in 0..4 {
        let mut e = [0.0; 4];
        e[j] = eps;
        let st = ReducedState::new(C64::new(e[0], e[1]), C64::new(e[2], e[3]));
        let v = as_vec(&vector_field(c, mu, &st));
        for i in 0..4 {
            m[(i, j)] = v[i] / eps;
        }
    }
    m
}

#[test]
fn bright_orbit_is_a_sech() {
    let c = bright_coeffs();
    for mu in [1e-4, 1e-3, 1e-2] {
        let o = find_bright_homoclinic(&c, mu).unwrap();
        let peak = sech_profile(&c, mu, 0.0);
        let err = o
            .samples
            .iter()
            .map(|(x, st)| (st.a.norm() - sech_profile(&c, mu, *x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6 * peak, "mu={mu}: {err:e}");
        let (x0, x1) = o.x_range();
        assert!(
            o.interpolate(x0).a.norm() < 1e-8 * peak && o.interpolate(x1).a.norm() < 1e-8 * peak
        );
        let neg = o.negated();
        assert_eq!(neg.max_abs_a(), o.max_abs_a());
        assert_eq!(neg.samples[0].1.a, -o.samples[0].1.a);
    }
}

#[test]
fn bright_decay_scales_with_root_mu() {
    let c = bright_coeffs();
    let width = |mu: f64| {
        let o = find_bright_homoclinic(&c, mu).unwrap();
        let half = 0.5 * o.max_abs_a();
        // first x > 0 where |A| drops below half the peak
        let (mut lo, mut hi) = (0.0, o.x_range().1);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if o.interpolate(m).a.norm() > half {
                lo = m;
            } else {
                hi = m;
            }
        }
        lo
    };
    let ratio = width(1e-3) / width(2e-3);
    assert!((ratio - 2f64.sqrt()).abs() < 1e-6, "{ratio}");
}

#[test]
fn bright_orbit_is_reversible() {
    let c = bright_coeffs();
    let o = find_bright_homoclinic(&c, 1e-2).unwrap();
    let peak = o.max_abs_a();
    for &x in &[0.5, 3.0, 12.0, 40.0] {
        let p = o.interpolate(x);
        let m = o.interpolate(-x).reversed();
        assert!((p.a - m.a).norm() < 1e-9 * peak && (p.b - m.b).norm() < 1e-9 * peak);
    }
    assert!(o.hamiltonian_drift < 1e-8 * peak * peak);
}

#[test]
fn flow_commutes_with_the_reverser() {
    // y(x) a solution implies R y(-x) a solution
    let c = full_coeffs();
    let mu = 0.02;
    let y0 = ReducedState::new(C64::new(0.12, -0.05), C64::new(0.03, 0.08));
    let x = 5.0;
    let fwd = integrate(&c, mu, y0, (0.0, x), 1e-11).unwrap();
    let end = fwd.samples.last().unwrap().1;
    let back = integrate(&c, mu, end.reversed(), (0.0, x), 1e-11).unwrap();
    let got = back.samples.last().unwrap().1;
    let want = y0.reversed();
    assert!((got.a - want.a).norm() < 1e-8 && (got.b - want.b).norm() < 1e-8);
    let f = vector_field(&c, mu, &y0.reversed());
    let g = vector_field(&c, mu, &y0).reversed();
    assert!((f.a + g.a).norm() < 1e-14 && (f.b + g.b).norm() < 1e-14);
}

#[test]
fn hamiltonian_is_conserved() {
    let c = full_coeffs();
    let mu = 0.05;
    let y0 = ReducedState::new(C64::new(0.2, 0.1), C64::new(-0.05, 0.15));
    let o = integrate(&c, mu, y0, (0.0, 60.0), 1e-11).unwrap();
    assert!(o.hamiltonian_drift < 1e-8, "{:e}", o.hamiltonian_drift);
}

#[test]
fn zero_state_stays_zero() {
    let o = integrate(&full_coeffs(), 0.1, ReducedState::ZERO, (0.0, 10.0), 1e-10).unwrap();
    assert!(o.samples.iter().all(|(_, st)| *st == ReducedState::ZERO));
}

#[test]
fn linear_growth_rate() {
    let c = bright_coeffs();
    let mu = 4e-3;
    let lam = (-c.c2_1 * mu).sqrt();
    let m = linearization(&c, mu);
    let ev = m.complex_eigenvalues();
    let top = ev.iter().map(|z| z.re).fold(f64::MIN, f64::max);
    assert!((top - lam).abs() < 1e-6 * lam, "{top} vs {lam}");
    for z in ev.iter() {
        assert!((z.re.abs() - lam).abs() < 1e-6 * lam);
        assert!((z.im.abs() - c.s).abs() < 1e-6);
    }
    // measured on the unstable manifold
    let eps = 1e-9;
    let x = 4.0 / lam;
    let o = integrate(
        &c,
        mu,
        ReducedState::new(C64::new(eps, 0.0), C64::new(lam * eps, 0.0)),
        (0.0, x),
        1e-12,
    )
    .unwrap();
    let rate = (o.samples.last().unwrap().1.a.norm() / eps).ln() / x;
    assert!((rate - lam).abs() < 1e-6 * lam, "{rate}");
}

#[test]
fn co_rotating_envelope_equation() {
    // a~ = exp(-i s x) A satisfies a~'' = -c2_1 mu a~ - 2 d1_0 a~ |a~|^2
    let c = bright_coeffs();
    let mu = 1e-2;
    let o = find_bright_homoclinic(&c, mu).unwrap();
    let h = 1e-3;
    for &x in &[0.0, 2.0, 7.5, 15.0] {
        let st = o.interpolate(x);
        let at = |dx: f64| -> C64 {
            if dx == 0.0 {
                return st.a * C64::from_polar(1.0, -c.s * x);
            }
            let t = integrate(&c, mu, st, (x, x + dx), 1e-13).unwrap();
            t.samples.last().unwrap().1.a * C64::from_polar(1.0, -c.s * (x + dx))
        };
        let (m, z, p) = (at(-h), at(0.0), at(h));
        let lhs = (m - 2.0 * z + p) / (h * h);
        let rhs = -c.c2_1 * mu * z - 2.0 * c.d1_0 * z * z.norm_sqr();
        let scale = (c.c2_1 * mu).abs() * o.max_abs_a();
        assert!((lhs - rhs).norm() < 1e-5 * scale, "x={x}: {lhs} vs {rhs}");
    }
}

#[test]
fn dark_envelope_is_a_tanh() {
    let c = dark_coeffs();
    for mu in [-1e-3, -1e-2] {
        let o = find_dark_envelope(&c, mu).unwrap();
        // balance of the linear and cubic forcing
        let rinf = (-c.c2_1 * mu / (2.0 * c.d1_0)).sqrt();
        assert!((dark_asymptote(&c, mu) - rinf).abs() < 1e-15);
        let k = (0.5 * c.c2_1 * mu).sqrt();
        let err = o
            .samples
            .iter()
            .map(|(x, st)| (st.a.norm() - rinf * (k * x).tanh().abs()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6 * rinf, "mu={mu}: {err:e}");
        let (x0, x1) = o.x_range();
        assert!((o.interpolate(x0).a.norm() - rinf).abs() < 1e-6 * rinf);
        assert!((o.interpolate(x1).a.norm() - rinf).abs() < 1e-6 * rinf);
        let min = o
            .samples
            .iter()
            .min_by(|a, b| a.1.a.norm().total_cmp(&b.1.a.norm()))
            .unwrap();
        assert_eq!(min.0, 0.0);
    }
    let r1 = dark_asymptote(&c, -1e-3);
    let r2 = dark_asymptote(&c, -4e-3);
    assert!((r2 / r1 - 2.0).abs() < 1e-12);
}

#[test]
fn envelope_sign_conditions() {
    assert!(matches!(
        find_bright_homoclinic(&dark_coeffs(), 1e-3),
        Err(Error::OutsideScenario(_))
    ));
    assert!(matches!(
        find_bright_homoclinic(&bright_coeffs(), -1e-3),
        Err(Error::OutsideScenario(_))
    ));
    assert!(matches!(
        find_dark_envelope(&bright_coeffs(), -1e-3),
        Err(Error::OutsideScenario(_))
    ));
    assert!(matches!(
        find_bright_homoclinic(&full_coeffs(), 1e-3),
        Err(Error::OutsideScenario(_))
    ));
}

#[test]
fn periodic_orbit_closes() {
    let c = HopfCoefficients::simple(0.8, 1.0, 0.5);
    let o = find_periodic_orbit(&c, 1e-2, 0.1).unwrap();
    let first = o.samples[0].1;
    let last = o.samples.last().unwrap().1;
    assert!((first.a - last.a).norm() < 1e-9 && (first.b - last.b).norm() < 1e-9);
    assert!(o
        .samples
        .iter()
        .all(|(_, st)| (st.a.norm() - 0.1).abs() < 1e-9));
}

#[test]
fn trivial_doubly_periodic_branch() {
    let dp = DoublyPeriodicCoefficients {
        kappa0: 1.3,
        nu0: 2.1,
        d1_01: 2.0 * std::f64::consts::PI,
        d2_01: 0.0,
        d2_10: 0.7,
        d1_10: 0.4,
        d1_01_quadrature: 2.0 * std::f64::consts::PI,
        d2_01_quadrature: 0.0,
        beta_tilde: 0.1,
        c2: 1.0,
    };
    let b = doubly_periodic_branch(&dp, 0.0, 0.0, &AmplitudeTerms::default()).unwrap();
    assert_eq!((b.mu1, b.mu2), (0.0, 0.0));
    assert!((b.period_x - 2.0 * std::f64::consts::PI / 1.3).abs() < 1e-15);
    assert!((b.period_z - 2.0 * std::f64::consts::PI / 2.1).abs() < 1e-15);
    let t = AmplitudeTerms {
        q: [[1.0, 0.5], [-0.3, 2.0]],
    };
    let b = doubly_periodic_branch(&dp, 0.05, 0.03, &t).unwrap();
    let j = dp.jacobian();
    let r1 = j[0][0] * b.mu1 + j[0][1] * b.mu2 + 0.0025 + 0.5 * 0.0009;
    let r2 = j[1][0] * b.mu1 + j[1][1] * b.mu2 - 0.3 * 0.0025 + 2.0 * 0.0009;
    assert!(r1.abs() < 1e-15 && r2.abs() < 1e-15);
    assert!(doubly_periodic_branch(&dp, 0.2, 0.0, &t).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_invariant_under_rotation(re_a in -0.5f64..0.5, im_a in -0.5f64..0.5,
                                            re_b in -0.5f64..0.5, im_b in -0.5f64..0.5,
                                            phase in -3.2f64..3.2, mu in -0.1f64..0.1) {
        let c = full_coeffs();
        let st = ReducedState::new(C64::new(re_a, im_a), C64::new(re_b, im_b));
        let h0 = hamiltonian(&c, mu, &st);
        prop_assert!((hamiltonian(&c, mu, &st.rotated(phase)) - h0).abs() < 1e-13);
        prop_assert!((hamiltonian(&c, mu, &st.reversed()) - h0).abs() < 1e-13);
    }

    #[test]
    fn field_is_rotation_equivariant(re_a in -0.5f64..0.5, im_a in -0.5f64..0.5,
                                     re_b in -0.5f64..0.5, im_b in -0.5f64..0.5, phase in -3.2f64..3.2) {
        let c = full_coeffs();
        let st = ReducedState::new(C64::new(re_a, im_a), C64::new(re_b, im_b));
        let a = vector_field(&c, 0.03, &st.rotated(phase));
        let b = vector_field(&c, 0.03, &st).rotated(phase);
        prop_assert!((a.a - b.a).norm() < 1e-13 && (a.b - b.b).norm() < 1e-13);
    }
}
