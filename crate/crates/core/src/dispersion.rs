//! The dispersion function, its real branch and the purely imaginary
//! eigenvalues of each Fourier mode.
//!
//! A mode-k eigenvalue `i s` corresponds to an intersection of the line
//! `Q_k = { s (cos t1, sin t1) + k nu0 (cos t2, sin t2) }` with the zero set of
//! [`evaluate_d`]. The mode residual is exactly `evaluate_d` composed with
//! [`wavevector_of`]; no rescaling is applied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{wavevector_of, ModelParams, WaveVector};
use crate::regions::taylor_mult_at_zero;
use crate::special::{coth, csch2, xcoth, xcoth_prime};

/// Below this |sin(theta1 - theta2)| all lines Q_k are treated as parallel.
pub const SD_EPS: f64 = 1e-14;
/// Derivative threshold (scaled by 1 + |s|) for declaring a double root.
pub const TANGENCY_TOL: f64 = 1e-6;
/// Central-difference step for the tangency test.
pub const FD_STEP: f64 = 1e-6;
const GRID: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub k: i32,
    pub s: f64,
    /// 1, 2 or 3 for nonzero points; 4, 6 or 8 for the origin of mode 0.
    pub mult: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub a: f64,
    pub l1_sq: f64,
    pub l2_sq: f64,
    pub valid: bool,
}

/// Line tangent to the branch: the critical transverse wavenumber and the
/// position of the double eigenvalue on mode 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangency {
    pub nu0: f64,
    pub s: f64,
}

/// rho coth(x) + coth(h x)
pub fn t_fun(p: &ModelParams, x: f64) -> f64 {
    p.rho * coth(x) + coth(p.h * x)
}

/// x (rho coth(x) + coth(h x)), finite at the origin.
pub fn xt_fun(p: &ModelParams, x: f64) -> f64 {
    p.rho * xcoth(x) + xcoth(p.h * x) / p.h
}

fn xt_prime(p: &ModelParams, x: f64) -> f64 {
    p.rho * xcoth_prime(x) + xcoth_prime(p.h * x)
}

/// d/dx [rho coth(x) + coth(h x)]
pub fn t_prime(p: &ModelParams, x: f64) -> f64 {
    -p.rho * csch2(x) - p.h * csch2(p.h * x)
}

/// D(l1, l2) = l1^2 (rho coth g + coth h g) - (alpha + beta g^2) g, g = |l|.
pub fn evaluate_d(p: &ModelParams, w: WaveVector) -> f64 {
    let g = w.norm();
    if g == 0.0 {
        return 0.0;
    }
    // l1^2 T(g) written as l1 (l1/g) g T(g) so that the series branch of
    // g T(g) handles small g.
    w.l1 * (w.l1 / g) * xt_fun(p, g) - (p.alpha + p.beta * g * g) * g
}

/// f_k(s) = D(wavevector_of(k, s)).
pub fn evaluate_mode_residual(p: &ModelParams, k: i32, s: f64) -> f64 {
    evaluate_d(p, wavevector_of(p, k, s))
}

/// Analytic s-derivative of the mode residual.
pub fn mode_residual_ds(p: &ModelParams, k: i32, s: f64) -> f64 {
    let w = wavevector_of(p, k, s);
    let g = w.norm();
    if g < 1e-4 {
        let h = 1e-5;
        return (evaluate_mode_residual(p, k, s + h) - evaluate_mode_residual(p, k, s - h))
            / (2.0 * h);
    }
    let q = s + k as f64 * p.nu0 * p.cd();
    let dg = q / g;
    2.0 * w.l1 * p.cos1() * t_fun(p, g) + w.l1 * w.l1 * t_prime(p, g) * dg
        - (p.alpha + 3.0 * p.beta * g * g) * dg
}

/// Central difference of the mode residual with step [`FD_STEP`].
pub fn residual_derivative_fd(p: &ModelParams, k: i32, s: f64) -> f64 {
    (evaluate_mode_residual(p, k, s + FD_STEP) - evaluate_mode_residual(p, k, s - FD_STEP))
        / (2.0 * FD_STEP)
}

/// |f_k'(s)| < TANGENCY_TOL (1 + |s|) by central differences.
pub fn is_tangent(p: &ModelParams, k: i32, s: f64) -> bool {
    residual_derivative_fd(p, k, s).abs() < TANGENCY_TOL * (1.0 + s.abs())
}

fn branch_l1_sq(p: &ModelParams, a: f64) -> f64 {
    (p.alpha + p.beta * a * a) * a * a / xt_fun(p, a)
}

/// Samples of the real branch at a = a_max i / n, i = 1..=n.
pub fn sample_branch(p: &ModelParams, a_max: f64, n: usize) -> Vec<BranchSample> {
    (1..=n)
        .map(|i| {
            let a = a_max * i as f64 / n as f64;
            let l1_sq = branch_l1_sq(p, a);
            let l2_sq = a * a - l1_sq;
            BranchSample {
                a,
                l1_sq,
                l2_sq,
                valid: l2_sq >= 0.0,
            }
        })
        .collect()
}

/// Largest a with l2_sq(a) >= 0, or 0 when the branch is empty.
pub fn branch_extent(p: &ModelParams) -> Result<f64> {
    if p.beta <= 0.0 {
        return Err(Error::UnboundedBranch);
    }
    // sign(l2_sq) = sign(phi)
    let phi = |a: f64| xt_fun(p, a) - p.alpha - p.beta * a * a;
    // a coth a <= 1 + a, so phi < 0 beyond the positive root below
    let b = p.rho + 1.0;
    let c0 = p.rho + 1.0 / p.h;
    let a_up = (b + (b * b + 4.0 * p.beta * c0).sqrt()) / (2.0 * p.beta);
    let n = 4096;
    let step = a_up / n as f64;
    let mut bracket = None;
    for i in (1..n).rev() {
        let a = step * i as f64;
        if phi(a) >= 0.0 {
            bracket = Some((a, a + step));
            break;
        }
    }
    if bracket.is_none() {
        let tiny = 1e-12 * a_up;
        if phi(tiny) >= 0.0 {
            bracket = Some((tiny, step));
        }
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(0.0);
    };
    for _ in 0..200 {
        if hi - lo <= 1e-14 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Segment of Q_k inside the disk of radius a*, in the s coordinate.
pub fn admissible_interval(p: &ModelParams, k: i32) -> Result<(f64, f64)> {
    let astar = branch_extent(p)?;
    interval_with(p, k, astar)
}

fn interval_with(p: &ModelParams, k: i32, astar: f64) -> Result<(f64, f64)> {
    let kn = k as f64 * p.nu0;
    let center = -kn * p.cd();
    let off = kn * p.sd();
    let disc = astar * astar - off * off;
    if disc < 0.0 || astar == 0.0 {
        return Err(Error::NoAdmissibleInterval(k));
    }
    let half = disc.sqrt();
    Ok((center - half, center + half))
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    x: f64,
    double: bool,
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Bracketed bisection followed by an Illinois secant polish.
fn polish<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, ftol: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..30 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let mut side = 0;
    let mut x = 0.5 * (a + b);
    for _ in 0..100 {
        x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() < ftol || b - a <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    x
}

/// All roots of f on [lo, hi]. Critical points of f split the interval into
/// monotone pieces; a critical point where |f| <= ftol is a double root.
fn find_roots<F, G>(f: F, df: G, lo: f64, hi: f64, n: usize, ftol: f64) -> Vec<Hit>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Vec::new();
    }
    let xs: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let ds: Vec<f64> = xs.iter().map(|&x| df(x)).collect();
    let mut crit = Vec::new();
    for i in 1..n {
        if ds[i] == 0.0 {
            crit.push(xs[i]);
        }
    }
    for i in 0..n {
        if ds[i] != 0.0 && ds[i + 1] != 0.0 && (ds[i] < 0.0) != (ds[i + 1] < 0.0) {
            crit.push(bisect(&df, xs[i], xs[i + 1], ds[i]));
        }
    }
    crit.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit.iter().copied());
    knots.push(hi);
    let fk: Vec<f64> = knots.iter().map(|&x| f(x)).collect();

    let mut simple = Vec::new();
    if fk[0] == 0.0 {
        simple.push(lo);
    }
    for i in 0..knots.len() - 1 {
        let (a, b) = (knots[i], knots[i + 1]);
        if fk[i] != 0.0 && fk[i + 1] != 0.0 && (fk[i] < 0.0) != (fk[i + 1] < 0.0) {
            simple.push(polish(&f, a, b, ftol * 0.1));
        }
    }
    if *fk.last().unwrap() == 0.0 {
        simple.push(hi);
    }

    let doubles: Vec<f64> = crit
        .iter()
        .zip(fk[1..fk.len() - 1].iter())
        .filter(|(_, fc)| fc.abs() <= ftol)
        .map(|(c, _)| *c)
        .collect();

    let mut hits: Vec<Hit> = simple
        .into_iter()
        .filter(|x| {
            !doubles
                .iter()
                .any(|c| (x - c).abs() <= 1e-6 * (1.0 + c.abs()))
        })
        .map(|x| Hit { x, double: false })
        .collect();
    hits.extend(doubles.into_iter().map(|x| Hit { x, double: true }));
    hits.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    hits
}

fn residual_scale(p: &ModelParams, astar: f64) -> f64 {
    1.0 + (p.alpha + p.beta * astar * astar) * astar
}

/// Positive roots of c_sq x T(x) - alpha - beta x^2 on (0, upper].
pub(crate) fn reduced_positive_roots(p: &ModelParams, c_sq: f64, upper: f64) -> Vec<(f64, bool)> {
    if c_sq == 0.0 || upper <= 0.0 {
        return Vec::new();
    }
    let g = |x: f64| c_sq * xt_fun(p, x) - p.alpha - p.beta * x * x;
    let dg = |x: f64| c_sq * xt_prime(p, x) - 2.0 * p.beta * x;
    let scale = 1.0 + p.alpha + p.beta * upper * upper;
    let lo = 1e-9 * upper;
    find_roots(g, dg, lo, upper * (1.0 + 1e-9), GRID, 1e-12 * scale)
        .into_iter()
        .map(|h| (h.x, h.double))
        .collect()
}

fn mode0_points(p: &ModelParams, astar: f64) -> Vec<SpectralPoint> {
    let c_sq = p.cos1().powi(2);
    let pos = reduced_positive_roots(p, c_sq, astar);
    let mut out = Vec::with_capacity(2 * pos.len() + 1);
    for &(x, double) in pos.iter().rev() {
        let mult = if double || is_tangent(p, 0, x) { 2 } else { 1 };
        out.push(SpectralPoint { k: 0, s: -x, mult });
    }
    out.push(SpectralPoint {
        k: 0,
        s: 0.0,
        mult: taylor_mult_at_zero(p),
    });
    for &(x, double) in pos.iter() {
        let mult = if double || is_tangent(p, 0, x) { 2 } else { 1 };
        out.push(SpectralPoint { k: 0, s: x, mult });
    }
    out
}

/// All purely imaginary mode-k eigenvalues, sorted by s.
///
/// An empty list is returned when Q_k misses the disk containing the branch.
/// Mode 0 always contains s = 0 with its Taylor multiplicity.
pub fn mode_eigenvalues(p: &ModelParams, k: i32) -> Result<Vec<SpectralPoint>> {
    let astar = branch_extent(p)?;
    if k == 0 {
        return Ok(mode0_points(p, astar));
    }
    if p.sd().abs() < SD_EPS {
        // Q_k coincides with Q_0 shifted by k nu0 cos(theta1 - theta2)
        let shift = k as f64 * p.nu0 * p.cd();
        return Ok(mode0_points(p, astar)
            .into_iter()
            .map(|pt| SpectralPoint {
                k,
                s: pt.s - shift,
                mult: pt.mult,
            })
            .collect());
    }
    let (lo, hi) = match interval_with(p, k, astar) {
        Ok(iv) => iv,
        Err(Error::NoAdmissibleInterval(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let ftol = 1e-11 * residual_scale(p, astar);
    let hits = find_roots(
        |s| evaluate_mode_residual(p, k, s),
        |s| mode_residual_ds(p, k, s),
        lo,
        hi,
        GRID,
        ftol,
    );
    Ok(hits
        .into_iter()
        .map(|h| SpectralPoint {
            k,
            s: h.x,
            mult: if h.double || is_tangent(p, k, h.x) {
                2
            } else {
                1
            },
        })
        .collect())
}

/// The eigenvalue positions read as signed distances from p_k = k nu0 P
/// along Q_k. Same values as [`mode_eigenvalues`].
pub fn signed_distance_spectrum(p: &ModelParams, k: i32) -> Result<Vec<f64>> {
    Ok(mode_eigenvalues(p, k)?.into_iter().map(|pt| pt.s).collect())
}

/// (alpha*, beta*) making i s a double mode-k eigenvalue. The alpha and beta
/// fields of `p` are ignored.
pub fn alpha_beta_star(p: &ModelParams, k: i32, s: f64) -> Result<(f64, f64)> {
    let c = p.cos1();
    if c.abs() < 1e-12 {
        return Err(Error::DegenerateDirection("cos(theta1) = 0"));
    }
    let q = s + k as f64 * p.nu0 * p.cd();
    if q.abs() < 1e-14 * (1.0 + s.abs()) {
        return Err(Error::DegenerateDirection(
            "s + k nu0 cos(theta1 - theta2) = 0",
        ));
    }
    if k == 0 {
        let b = beta0_star(p, s);
        return Ok((c * c * xt_fun(p, s) - b * s * s, b));
    }
    let w = wavevector_of(p, k, s);
    let g = w.norm();
    let l1 = w.l1;
    let t = t_fun(p, g);
    let tp = t_prime(p, g);
    let beta = c * l1 * t / (g * q) - l1 * l1 * (t - g * tp) / (2.0 * g * g * g);
    let alpha = l1 * l1 * t / g - beta * g * g;
    Ok((alpha, beta))
}

/// beta_0*(s) = cos^2(theta1)/2 (rho F(s) + h F(h s)), F(x) = coth(x)/x - csch^2(x)
fn beta0_star(p: &ModelParams, s: f64) -> f64 {
    use crate::special::coth_over_x_minus_csch2 as f;
    0.5 * p.cos1().powi(2) * (p.rho * f(s) + p.h * f(p.h * s))
}

/// d beta_k*/ds by Richardson-extrapolated central differences.
pub fn dbeta_star_ds(p: &ModelParams, k: i32, s: f64) -> Result<f64> {
    let b = |x: f64| alpha_beta_star(p, k, x).map(|ab| ab.1);
    let d = |h: f64| -> Result<f64> { Ok((b(s + h)? - b(s - h)?) / (2.0 * h)) };
    let h = 1e-4;
    Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
}

/// Triple-multiplicity predicate: d beta_k*/ds vanishes.
pub fn is_triple(p: &ModelParams, k: i32, s: f64) -> Result<bool> {
    Ok(dbeta_star_ds(p, k, s)?.abs() < TANGENCY_TOL * (1.0 + s.abs()))
}

/// Critical transverse wavenumber at which Q_1 touches the branch from
/// outside, together with the position of the double eigenvalue.
pub fn critical_nu0(p: &ModelParams) -> Result<Tangency> {
    let sd = p.sd();
    let (sn, c) = p.theta1.sin_cos();
    if sd.abs() < SD_EPS {
        return Err(Error::DegenerateDirection("sin(theta1 - theta2) = 0"));
    }
    if c.abs() < 1e-12 {
        return Err(Error::DegenerateDirection("cos(theta1) = 0"));
    }
    let astar = branch_extent(p)?;
    if astar <= 0.0 {
        return Err(Error::NoConvergence("empty dispersion branch".into()));
    }
    // support function of the branch in the normal direction of Q_0
    let support = |a: f64| {
        let l1_sq = branch_l1_sq(p, a);
        let l2_sq = a * a - l1_sq;
        if l2_sq < 0.0 {
            f64::NEG_INFINITY
        } else {
            l1_sq.sqrt() * sn.abs() + l2_sq.sqrt() * c.abs()
        }
    };
    let n = 4096;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for i in 1..=n {
        let v = support(astar * i as f64 / n as f64);
        if v > best.0 {
            best = (v, i);
        }
    }
    let step = astar / n as f64;
    let mut lo = step * (best.1 as f64 - 1.0);
    let mut hi = (step * (best.1 as f64 + 1.0)).min(astar);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..120 {
        let x1 = hi - gr * (hi - lo);
        let x2 = lo + gr * (hi - lo);
        if support(x1) < support(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let a = 0.5 * (lo + hi);
    let l1_sq = branch_l1_sq(p, a);
    let l2_sq = (a * a - l1_sq).max(0.0);
    let l1 = (sd * sn).signum() * l1_sq.sqrt();
    let l2 = (-sd * c).signum() * l2_sq.sqrt();
    let m = support(a);
    let mut nu = m / sd.abs();
    let mut s = l1 * c + l2 * sn - nu * p.cd();

    let resid = |nu: f64, s: f64| -> Result<(f64, f64)> {
        let (al, be) = alpha_beta_star(&p.with_nu0(nu), 1, s)?;
        Ok((be - p.beta, al - p.alpha))
    };
    let tol = 1e-13 * (1.0 + p.alpha);
    for _ in 0..40 {
        let (f1, f2) = resid(nu, s)?;
        if f1.abs().max(f2.abs()) < tol {
            break;
        }
        let hn = 1e-7 * (1.0 + nu);
        let hs = 1e-7 * (1.0 + s.abs());
        let (a1, a2) = resid(nu + hn, s)?;
        let (b1, b2) = resid(nu - hn, s)?;
        let (c1, c2) = resid(nu, s + hs)?;
        let (d1, d2) = resid(nu, s - hs)?;
        let j11 = (a1 - b1) / (2.0 * hn);
        let j21 = (a2 - b2) / (2.0 * hn);
        let j12 = (c1 - d1) / (2.0 * hs);
        let j22 = (c2 - d2) / (2.0 * hs);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dn = (f1 * j22 - f2 * j12) / det;
        let ds = (j11 * f2 - j21 * f1) / det;
        nu -= dn;
        s -= ds;
        if dn.abs() < 1e-16 * (1.0 + nu) && ds.abs() < 1e-16 * (1.0 + s.abs()) {
            break;
        }
    }
    let (f1, f2) = resid(nu, s)?;
    if nu.is_nan() || nu <= 0.0 || f1.abs().max(f2.abs()) > 1e-9 * (1.0 + p.alpha) {
        return Err(Error::NoConvergence(format!(
            "tangency refinement stalled at residual {:e}",
            f1.abs().max(f2.abs())
        )));
    }
    Ok(Tangency { nu0: nu, s })
}
