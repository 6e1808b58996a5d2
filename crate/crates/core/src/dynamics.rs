//! The truncated reduced system for the amplitudes (A, B), its bright and
//! dark solutions, and the doubly periodic branch at linear order.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalform::{DoublyPeriodicCoefficients, HopfCoefficients};
use crate::ode::{self, Control, Options};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub a: C64,
    pub b: C64,
}

impl ReducedState {
    pub const ZERO: ReducedState = ReducedState {
        a: C64 { re: 0.0, im: 0.0 },
        b: C64 { re: 0.0, im: 0.0 },
    };

    pub fn new(a: C64, b: C64) -> Self {
        ReducedState { a, b }
    }

    /// (A, B) -> (conj A, -conj B)
    pub fn reversed(&self) -> Self {
        ReducedState {
            a: self.a.conj(),
            b: -self.b.conj(),
        }
    }

    /// Multiplication of both amplitudes by exp(i phase).
    pub fn rotated(&self, phase: f64) -> Self {
        let r = C64::from_polar(1.0, phase);
        ReducedState {
            a: self.a * r,
            b: self.b * r,
        }
    }

    fn to_array(self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    fn from_array(y: &[f64; 4]) -> Self {
        ReducedState {
            a: C64::new(y[0], y[1]),
            b: C64::new(y[2], y[3]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    Bright,
    Dark,
    Periodic,
    Trajectory,
}

impl OrbitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitKind::Bright => "bright",
            OrbitKind::Dark => "dark",
            OrbitKind::Periodic => "periodic",
            OrbitKind::Trajectory => "trajectory",
        }
    }
}

impl std::str::FromStr for OrbitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bright" => Ok(OrbitKind::Bright),
            "dark" => Ok(OrbitKind::Dark),
            "periodic" => Ok(OrbitKind::Periodic),
            "trajectory" => Ok(OrbitKind::Trajectory),
            _ => Err(Error::Parse(format!("unknown orbit kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedOrbit {
    pub samples: Vec<(f64, ReducedState)>,
    pub mu: f64,
    pub kind: OrbitKind,
    pub coeffs: HopfCoefficients,
    /// max |H(x) - H(x0)| over the samples.
    pub hamiltonian_drift: f64,
}

impl ReducedOrbit {
    fn build(
        samples: Vec<(f64, ReducedState)>,
        c: &HopfCoefficients,
        mu: f64,
        kind: OrbitKind,
    ) -> Self {
        let h0 = samples
            .first()
            .map(|s| hamiltonian(c, mu, &s.1))
            .unwrap_or(0.0);
        let drift = samples
            .iter()
            .map(|s| (hamiltonian(c, mu, &s.1) - h0).abs())
            .fold(0.0, f64::max);
        ReducedOrbit {
            samples,
            mu,
            kind,
            coeffs: *c,
            hamiltonian_drift: drift,
        }
    }

    /// The companion solution A -> -A, B -> -B.
    pub fn negated(&self) -> Self {
        ReducedOrbit {
            samples: self
                .samples
                .iter()
                .map(|(x, st)| (*x, ReducedState::new(-st.a, -st.b)))
                .collect(),
            ..self.clone()
        }
    }

    pub fn max_abs_a(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1.a.norm())
            .fold(0.0, f64::max)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (
            self.samples.first().map(|s| s.0).unwrap_or(0.0),
            self.samples.last().map(|s| s.0).unwrap_or(0.0),
        )
    }

    /// State at x by cubic Hermite interpolation between samples, with
    /// slopes from the vector field.
    pub fn interpolate(&self, x: f64) -> ReducedState {
        let n = self.samples.len();
        if n == 0 {
            return ReducedState::ZERO;
        }
        if x <= self.samples[0].0 {
            return self.samples[0].1;
        }
        if x >= self.samples[n - 1].0 {
            return self.samples[n - 1].1;
        }
        let j = self.samples.partition_point(|s| s.0 <= x);
        let (x0, s0) = self.samples[j - 1];
        let (x1, s1) = self.samples[j];
        let hgap = x1 - x0;
        if hgap == 0.0 {
            return s0;
        }
        let t = (x - x0) / hgap;
        let d0 = vector_field(&self.coeffs, self.mu, &s0);
        let d1 = vector_field(&self.coeffs, self.mu, &s1);
        let h00 = 2.0 * t.powi(3) - 3.0 * t * t + 1.0;
        let h10 = t.powi(3) - 2.0 * t * t + t;
        let h01 = -2.0 * t.powi(3) + 3.0 * t * t;
        let h11 = t.powi(3) - t * t;
        let mix = |p0: C64, m0: C64, p1: C64, m1: C64| {
            p0 * h00 + m0 * (h10 * hgap) + p1 * h01 + m1 * (h11 * hgap)
        };
        ReducedState {
            a: mix(s0.a, d0.a, s1.a, d1.a),
            b: mix(s0.b, d0.b, s1.b, d1.b),
        }
    }

    /// n uniformly spaced samples over the orbit's x-range.
    pub fn resample(&self, n: usize) -> Vec<(f64, ReducedState)> {
        let (a, b) = self.x_range();
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let x = a + (b - a) * i as f64 / (n - 1) as f64;
                (x, self.interpolate(x))
            })
            .collect()
    }
}

/// Right-hand side of the truncated reduced system.
pub fn vector_field(c: &HopfCoefficients, mu: f64, st: &ReducedState) -> ReducedState {
    let (a, b) = (st.a, st.b);
    let a2 = a.norm_sqr();
    let cross = a * b.conj() - a.conj() * b;
    let rot = I * (c.s + c.c3_1 * mu);
    let da = rot * a + b + I * c.d2_0 * a * a2 - 2.0 * c.d3_0 * a * cross;
    let db = rot * b - c.c2_1 * mu * a - 2.0 * c.d1_0 * a * a2 - I * c.d2_0 * a * a * b.conj()
        + 2.0 * I * c.d2_0 * b * a2
        - 2.0 * c.d3_0 * b * cross;
    ReducedState { a: da, b: db }
}

/// The truncated Hamiltonian; conserved by [`vector_field`].
pub fn hamiltonian(c: &HopfCoefficients, mu: f64, st: &ReducedState) -> f64 {
    let (a, b) = (st.a, st.b);
    let a2 = a.norm_sqr();
    // i (A conj B - conj A B) = -2 Im(A conj B)
    let j = -2.0 * (a * b.conj()).im;
    (c.s + c.c3_1 * mu) * j
        + b.norm_sqr()
        + c.c2_1 * mu * a2
        + c.d1_0 * a2 * a2
        + c.d2_0 * j * a2
        + c.d3_0 * j * j
}

fn rhs(c: &HopfCoefficients, mu: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    move |_x, y| vector_field(c, mu, &ReducedState::from_array(y)).to_array()
}

fn options(tol: f64, scale: f64, h0: f64) -> Options {
    Options {
        rtol: tol,
        atol: tol * 1e-3 * scale.max(1e-300),
        h0,
        max_steps: 2_000_000,
    }
}

/// Adaptive integration over `x_span`, recording every accepted step.
pub fn integrate(
    c: &HopfCoefficients,
    mu: f64,
    initial: ReducedState,
    x_span: (f64, f64),
    tol: f64,
) -> Result<ReducedOrbit> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParam {
            name: "tol",
            reason: "must be positive".into(),
        });
    }
    let f = rhs(c, mu);
    let scale = initial.a.norm().max(initial.b.norm());
    let o = options(tol, scale, 1e-3 * (x_span.1 - x_span.0).abs().max(1e-12));
    let mut samples = vec![(x_span.0, initial)];
    ode::integrate(
        &f,
        x_span.0,
        initial.to_array(),
        x_span.1,
        &o,
        |_, _, x, y| {
            samples.push((x, ReducedState::from_array(y)));
            Control::Continue
        },
    )?;
    Ok(ReducedOrbit::build(samples, c, mu, OrbitKind::Trajectory))
}

fn require_phase_free(c: &HopfCoefficients) -> Result<()> {
    if c.d2_0 != 0.0 || c.d3_0 != 0.0 {
        return Err(Error::OutsideScenario(
            "envelope solutions are computed with d2_0 = d3_0 = 0".into(),
        ));
    }
    Ok(())
}

/// Symmetric homoclinic orbit by shooting from the unstable manifold of the
/// origin to the reverser's fixed set.
pub fn find_bright_homoclinic(c: &HopfCoefficients, mu: f64) -> Result<ReducedOrbit> {
    if !(c.c2_1 < 0.0 && c.d1_0 > 0.0 && mu > 0.0) {
        return Err(Error::OutsideScenario(
            "bright orbits need c2_1 < 0, d1_0 > 0, mu > 0".into(),
        ));
    }
    require_phase_free(c)?;
    let lambda = (-c.c2_1 * mu).sqrt();
    let r = (-c.c2_1 * mu / c.d1_0).sqrt();
    let x_end = 20.0 / lambda;
    let eps = 2.0 * r * (-20.0f64).exp();
    let init = ReducedState::new(C64::new(eps, 0.0), C64::new(lambda * eps, 0.0));
    let f = rhs(c, mu);
    let o = options(1e-12, eps, 1e-2 / lambda);
    // Re(B conj A) = (1/2) d|A|^2/dx in the co-rotating frame
    let g = |y: &[f64; 4]| y[2] * y[0] + y[3] * y[1];

    let mut samples = vec![(-x_end, init)];
    let mut hit: Option<(f64, [f64; 4], f64)> = None;
    ode::integrate(
        &f,
        -x_end,
        init.to_array(),
        2.0 * x_end,
        &o,
        |xp, yp, x, y| {
            if g(y) <= 0.0 && g(yp) > 0.0 {
                hit = Some((xp, *yp, x - xp));
                return Control::Stop;
            }
            samples.push((x, ReducedState::from_array(y)));
            Control::Continue
        },
    )?;
    let Some((xp, yp, hstep)) = hit else {
        return Err(Error::NoConvergence(
            "no turning point of |A| before the window end".into(),
        ));
    };
    let (mut lo, mut hi) = (0.0, hstep);
    for _ in 0..80 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if g(&ode::step(&f, xp, &yp, m).0) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let xm = xp + 0.5 * (lo + hi);
    let peak = ReducedState::from_array(&ode::step(&f, xp, &yp, xm - xp).0);
    let phase = -peak.a.arg();
    let peak = peak.rotated(phase);
    if peak.b.re.abs() > 1e-8 * r {
        return Err(Error::NoConvergence(format!(
            "shooting residual {:e} above tolerance",
            peak.b.re.abs() / r
        )));
    }
    // exact reverser-fixed point at the centre
    let centre = ReducedState::new(C64::new(peak.a.re, 0.0), C64::new(0.0, peak.b.im));
    let mut left: Vec<(f64, ReducedState)> = samples
        .into_iter()
        .filter(|(x, _)| *x < xm)
        .map(|(x, st)| (x - xm, st.rotated(phase)))
        .collect();
    let mut all = left.clone();
    all.push((0.0, centre));
    left.reverse();
    all.extend(left.into_iter().map(|(x, st)| (-x, st.reversed())));
    Ok(ReducedOrbit::build(all, c, mu, OrbitKind::Bright))
}

/// Asymptotic modulus of the dark envelope: the positive root of
/// c2_1 mu + 2 d1_0 r^2 = 0.
pub fn dark_asymptote(c: &HopfCoefficients, mu: f64) -> f64 {
    (-c.c2_1 * mu / (2.0 * c.d1_0)).sqrt()
}

/// Reverser-symmetric dark envelope A = i exp(i s x) r(x) with r odd, from a
/// finite-difference boundary-value problem on [0, X].
pub fn find_dark_envelope(c: &HopfCoefficients, mu: f64) -> Result<ReducedOrbit> {
    if !(c.c2_1 < 0.0 && c.d1_0 < 0.0 && mu < 0.0) {
        return Err(Error::OutsideScenario(
            "dark orbits need c2_1 < 0, d1_0 < 0, mu < 0".into(),
        ));
    }
    require_phase_free(c)?;
    let rinf = dark_asymptote(c, mu);
    let k = (0.5 * c.c2_1 * mu).sqrt();
    let x_end = 20.0 / k;
    let n = 20_000;
    let h = x_end / n as f64;
    let h2 = h * h;
    // r'' = F(r)
    let lin = -c.c2_1 * mu;
    let cub = -2.0 * c.d1_0;
    let force = |r: f64| lin * r + cub * r * r * r;
    let dforce = |r: f64| lin + 3.0 * cub * r * r;

    // unknowns r_1..r_n; r_0 = 0 and a ghost node enforces r'(X) = 0
    let mut r: Vec<f64> = (1..=n)
        .map(|i| rinf * (0.5 * k * i as f64 * h).tanh())
        .collect();
    let mut converged = false;
    for _ in 0..100 {
        let mut res = vec![0.0; n];
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { r[i - 1] };
            let right = if i == n - 1 { r[n - 2] } else { r[i + 1] };
            res[i] = (left - 2.0 * r[i] + right) / h2 - force(r[i]);
            diag[i] = -2.0 / h2 - dforce(r[i]);
            if i > 0 {
                sub[i] = if i == n - 1 { 2.0 / h2 } else { 1.0 / h2 };
            }
            if i < n - 1 {
                sup[i] = 1.0 / h2;
            }
        }
        let delta = thomas(&sub, &diag, &sup, &res);
        let mut dmax: f64 = 0.0;
        for i in 0..n {
            r[i] -= delta[i];
            dmax = dmax.max(delta[i].abs());
        }
        if dmax < 1e-14 * rinf {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(
            "dark envelope Newton iteration".into(),
        ));
    }
    let s_eff = c.s + c.c3_1 * mu;
    let state = |x: f64, rv: f64, dr: f64| {
        let e = I * C64::from_polar(1.0, s_eff * x);
        ReducedState::new(e * rv, e * dr)
    };
    let mut grid = Vec::with_capacity(n + 1);
    grid.push((0.0, 0.0));
    grid.extend((1..=n).map(|i| (i as f64 * h, r[i - 1])));
    let slope = |i: usize| -> f64 {
        if i == 0 {
            (-3.0 * grid[0].1 + 4.0 * grid[1].1 - grid[2].1) / (2.0 * h)
        } else if i == n {
            0.0
        } else {
            (grid[i + 1].1 - grid[i - 1].1) / (2.0 * h)
        }
    };
    let mut samples = Vec::with_capacity(2 * n + 1);
    for i in (1..=n).rev() {
        let (x, rv) = grid[i];
        samples.push((-x, state(-x, -rv, slope(i))));
    }
    for (i, &(x, rv)) in grid.iter().enumerate() {
        samples.push((x, state(x, rv, slope(i))));
    }
    Ok(ReducedOrbit::build(samples, c, mu, OrbitKind::Dark))
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = sup[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / m;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Rotating-wave periodic orbit A = r exp(i (s + kappa) x) with
/// kappa^2 = c2_1 mu + 2 d1_0 r^2, integrated over one period.
pub fn find_periodic_orbit(c: &HopfCoefficients, mu: f64, amp: f64) -> Result<ReducedOrbit> {
    require_phase_free(c)?;
    let kappa_sq = c.c2_1 * mu + 2.0 * c.d1_0 * amp * amp;
    if kappa_sq < 0.0 {
        return Err(Error::OutsideScenario(format!(
            "no rotating wave of amplitude {amp}: kappa^2 = {kappa_sq}"
        )));
    }
    let kappa = kappa_sq.sqrt();
    let freq = c.s + c.c3_1 * mu + kappa;
    if freq == 0.0 {
        return Err(Error::OutsideScenario(
            "rotating wave is an equilibrium".into(),
        ));
    }
    let period = 2.0 * PI / freq.abs();
    let init = ReducedState::new(C64::new(amp, 0.0), C64::new(0.0, kappa * amp));
    let mut orbit = integrate(c, mu, init, (0.0, period), 1e-12)?;
    orbit.kind = OrbitKind::Periodic;
    Ok(orbit)
}

/// Offsets (mu1, mu2) and periods of a small doubly periodic wave at
/// linear order in the amplitudes squared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublyPeriodicBranch {
    pub amp_a: f64,
    pub amp_b: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub kappa0: f64,
    pub nu0: f64,
    pub period_x: f64,
    pub period_z: f64,
}

/// Quadratic amplitude coefficients of the bifurcation equations:
/// Theta_i = J (mu1, mu2) + q_i1 |A|^2 + q_i2 |B|^2. Not available in
/// closed form; zero by default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AmplitudeTerms {
    pub q: [[f64; 2]; 2],
}

pub const DEFAULT_AMP_BOUND: f64 = 1e-2;

pub fn doubly_periodic_branch(
    dp: &DoublyPeriodicCoefficients,
    amp_a: f64,
    amp_b: f64,
    terms: &AmplitudeTerms,
) -> Result<DoublyPeriodicBranch> {
    for (name, v) in [("amp_a", amp_a), ("amp_b", amp_b)] {
        if v.is_nan() || v * v >= DEFAULT_AMP_BOUND {
            return Err(Error::InvalidParam {
                name,
                reason: format!("squared amplitude must be below {DEFAULT_AMP_BOUND}"),
            });
        }
    }
    let det = dp.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::DeterminantZero);
    }
    let j = dp.jacobian();
    let (a2, b2) = (amp_a * amp_a, amp_b * amp_b);
    let r1 = -(terms.q[0][0] * a2 + terms.q[0][1] * b2);
    let r2 = -(terms.q[1][0] * a2 + terms.q[1][1] * b2);
    let mu1 = (r1 * j[1][1] - j[0][1] * r2) / det;
    let mu2 = (j[0][0] * r2 - j[1][0] * r1) / det;
    Ok(DoublyPeriodicBranch {
        amp_a,
        amp_b,
        mu1,
        mu2,
        kappa0: dp.kappa0,
        nu0: dp.nu0,
        period_x: 2.0 * PI / (dp.kappa0 + mu2),
        period_z: 2.0 * PI / (dp.nu0 + mu1),
    })
}
