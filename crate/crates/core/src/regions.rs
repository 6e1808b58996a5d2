//! Mode-0 bifurcation curves in the (beta, alpha) plane, region labels, the
//! mode-1 zero-eigenvalue condition and scenario detection.

use serde::{Deserialize, Serialize};

use crate::dispersion::xt_fun;
use crate::dispersion::{
    branch_extent, mode_eigenvalues, reduced_positive_roots, SpectralPoint, SD_EPS,
};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::{coth_over_x_minus_csch2, csc2_minus_cot_over_x};

/// Absolute distance in alpha below which a point counts as lying on a curve.
pub const CURVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
    #[serde(rename = "on-C1")]
    OnC1,
    #[serde(rename = "on-C2")]
    OnC2,
    #[serde(rename = "on-C3")]
    OnC3,
    #[serde(rename = "on-C4")]
    OnC4,
    #[serde(rename = "star")]
    Star,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::OnC1 => "on-C1",
            Region::OnC2 => "on-C2",
            Region::OnC3 => "on-C3",
            Region::OnC4 => "on-C4",
            Region::Star => "star",
        }
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, Region::I | Region::II | Region::III | Region::IV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub region: Region,
    /// Nontrivial purely imaginary mode-0 pairs, counted without multiplicity.
    pub mode0_imag_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curve {
    C1,
    C2,
    C3,
    C4,
}

impl std::str::FromStr for Curve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "C1" => Ok(Curve::C1),
            "C2" => Ok(Curve::C2),
            "C3" => Ok(Curve::C3),
            "C4" => Ok(Curve::C4),
            _ => Err(Error::Parse(format!("unknown curve '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "HamiltonianHopf-mode1")]
    HamiltonianHopfMode1,
    #[serde(rename = "Resonance-00-is-ikappa0")]
    Resonance00IsIkappa0,
    #[serde(rename = "real-1:1")]
    Real11,
    #[serde(rename = "0^2-resonance")]
    ZeroSquared,
    #[serde(rename = "none")]
    None,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::HamiltonianHopfMode1 => "HamiltonianHopf-mode1",
            Scenario::Resonance00IsIkappa0 => "Resonance-00-is-ikappa0",
            Scenario::Real11 => "real-1:1",
            Scenario::ZeroSquared => "0^2-resonance",
            Scenario::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub witnesses: Vec<SpectralPoint>,
    pub nu0_critical: Option<f64>,
    /// Full imaginary spectrum over the enumerated modes.
    pub spectrum: Vec<SpectralPoint>,
}

impl ScenarioReport {
    /// Position of the positive mode-0 witness.
    pub fn kappa0(&self) -> Option<f64> {
        self.witnesses
            .iter()
            .find(|w| w.k == 0 && w.s > 0.0)
            .map(|w| w.s)
    }

    /// Position of the nonzero mode-1 witness.
    pub fn mode1_s(&self) -> Option<f64> {
        self.witnesses
            .iter()
            .find(|w| w.k == 1 && w.s.abs() >= 1e-6)
            .map(|w| w.s)
    }
}

/// (alpha_0*(s), beta_0*(s)) for the mode-0 tangency; continuous at s = 0.
pub fn star0(rho: f64, h: f64, c_sq: f64, s: f64) -> (f64, f64) {
    let f = coth_over_x_minus_csch2;
    let beta = 0.5 * c_sq * (rho * f(s) + h * f(h * s));
    let p = stub(rho, h);
    (c_sq * xt_fun(&p, s) - beta * s * s, beta)
}

/// The same tangency pair continued to s = i sigma.
pub fn star0_imag(rho: f64, h: f64, c_sq: f64, sigma: f64) -> (f64, f64) {
    let g = csc2_minus_cot_over_x;
    let beta = 0.5 * c_sq * (rho * g(sigma) + h * g(h * sigma));
    let cot = |x: f64| x.cos() / x.sin();
    let xt = if sigma.abs() < 1e-8 {
        rho + 1.0 / h
    } else {
        sigma * (rho * cot(sigma) + cot(h * sigma))
    };
    (c_sq * xt + beta * sigma * sigma, beta)
}

fn stub(rho: f64, h: f64) -> ModelParams {
    ModelParams {
        rho,
        h,
        alpha: 1.0,
        beta: 0.0,
        theta1: 0.0,
        theta2: 0.0,
        nu0: 1.0,
    }
}

/// Upper end of the C1 parameter: sigma in (0, min(pi, pi/h)).
pub fn c1_sigma_max(h: f64) -> f64 {
    std::f64::consts::PI.min(std::f64::consts::PI / h)
}

/// Point of C2 with the given beta in (0, beta_star): (s, alpha).
fn c2_at_beta(rho: f64, h: f64, c_sq: f64, beta: f64) -> (f64, f64) {
    let b = |s: f64| star0(rho, h, c_sq, s).1;
    let mut hi = 1.0;
    while b(hi) > beta && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if b(m) > beta {
            lo = m;
        } else {
            hi = m;
        }
    }
    let s = 0.5 * (lo + hi);
    (s, star0(rho, h, c_sq, s).0)
}

/// Point of C1 with the given beta above beta_star: (sigma, alpha).
fn c1_at_beta(rho: f64, h: f64, c_sq: f64, beta: f64) -> (f64, f64) {
    let b = |x: f64| star0_imag(rho, h, c_sq, x).1;
    let mut lo = 0.0;
    let mut hi = c1_sigma_max(h);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if b(m) < beta {
            lo = m;
        } else {
            hi = m;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, star0_imag(rho, h, c_sq, x).0)
}

/// Samples of a curve for beta up to `beta_max`. C3 and C4 are the two
/// halves of the horizontal line; C1 and C2 start at the star point.
pub fn curve_points(
    curve: Curve,
    rho: f64,
    h: f64,
    theta1: f64,
    n: usize,
    beta_max: f64,
) -> Vec<(f64, f64)> {
    let c_sq = theta1.cos().powi(2);
    let line = c_sq * (rho + 1.0 / h);
    let bstar = c_sq * (rho + h) / 3.0;
    let n = n.max(2);
    let frac = |i: usize| i as f64 / (n - 1) as f64;
    match curve {
        Curve::C4 => {
            let top = bstar.min(beta_max);
            (0..n).map(|i| (top * frac(i), line)).collect()
        }
        Curve::C3 => {
            let top = beta_max.max(bstar);
            (0..n)
                .map(|i| (bstar + (top - bstar) * frac(i), line))
                .collect()
        }
        Curve::C2 => {
            let top = bstar.min(beta_max);
            (0..n)
                .map(|i| {
                    let beta = top * (1.0 - frac(i));
                    if i == 0 && top == bstar {
                        (bstar, line)
                    } else if beta <= 0.0 {
                        (0.0, f64::INFINITY)
                    } else {
                        (beta, c2_at_beta(rho, h, c_sq, beta).1)
                    }
                })
                .filter(|pt| pt.1.is_finite())
                .collect()
        }
        Curve::C1 => {
            let top = beta_max.max(bstar);
            (0..n)
                .map(|i| {
                    let beta = bstar + (top - bstar) * frac(i);
                    if i == 0 {
                        (bstar, line)
                    } else {
                        (beta, c1_at_beta(rho, h, c_sq, beta).1)
                    }
                })
                .collect()
        }
    }
}

/// Region of (beta, alpha) with respect to C1..C4 for direction theta1.
pub fn classify(beta: f64, alpha: f64, rho: f64, h: f64, theta1: f64) -> RegionLabel {
    let c_sq = theta1.cos().powi(2);
    let label = |region, mode0_imag_count| RegionLabel {
        region,
        mode0_imag_count,
    };
    if c_sq < 1e-24 {
        // the reduced mode-0 function is -alpha - beta s^2 < 0
        return label(Region::III, 0);
    }
    let line = c_sq * (rho + 1.0 / h);
    let bstar = c_sq * (rho + h) / 3.0;
    let da = alpha - line;
    if da.abs() <= CURVE_TOL && (beta - bstar).abs() <= CURVE_TOL {
        return label(Region::Star, 0);
    }
    if da.abs() <= CURVE_TOL {
        return if beta < bstar {
            label(Region::OnC4, 1)
        } else {
            label(Region::OnC3, 0)
        };
    }
    if da < 0.0 {
        return label(Region::I, 1);
    }
    if beta < bstar {
        if beta <= 0.0 {
            return label(Region::II, 2);
        }
        let (_, a2) = c2_at_beta(rho, h, c_sq, beta);
        let d = alpha - a2;
        if d.abs() <= CURVE_TOL {
            label(Region::OnC2, 1)
        } else if d < 0.0 {
            label(Region::II, 2)
        } else {
            label(Region::III, 0)
        }
    } else {
        let (_, a1) = c1_at_beta(rho, h, c_sq, beta);
        let d = alpha - a1;
        if d.abs() <= CURVE_TOL {
            label(Region::OnC1, 0)
        } else if d > 0.0 {
            label(Region::III, 0)
        } else {
            label(Region::IV, 0)
        }
    }
}

/// Algebraic multiplicity of the zero mode-0 eigenvalue from the Taylor
/// coefficients of f_0 at s = 0.
pub fn taylor_mult_at_zero(p: &ModelParams) -> u8 {
    let c_sq = p.cos1().powi(2);
    let a1 = p.alpha - c_sq * (p.rho + 1.0 / p.h);
    let a3 = p.beta - c_sq * (p.rho + p.h) / 3.0;
    let tol1 = 1e-12 * (1.0 + p.alpha.abs());
    let tol3 = 1e-12 * (1.0 + p.beta.abs());
    if a1.abs() > tol1 {
        4
    } else if a3.abs() > tol3 {
        6
    } else {
        8
    }
}

/// Positive nu0 for which 0 is a mode +-1 eigenvalue.
pub fn solve_nu0_zero_mode1(
    beta: f64,
    alpha: f64,
    rho: f64,
    h: f64,
    theta2: f64,
) -> Result<Vec<f64>> {
    let c2 = theta2.cos();
    if c2.abs() < 1e-12 {
        return Err(Error::ExcludedAngle);
    }
    let c_sq = c2 * c2;
    let mut p = stub(rho, h);
    p.alpha = alpha;
    p.beta = beta;
    // beyond `upper` the reduced function keeps one sign
    let upper = if beta > 0.0 {
        let b = c_sq * (rho + 1.0);
        let c0 = c_sq * (rho + 1.0 / h);
        (b + (b * b + 4.0 * beta * c0).sqrt()) / (2.0 * beta)
    } else {
        alpha / (c_sq * (rho + 1.0)) + 1.0
    };
    Ok(reduced_positive_roots(&p, c_sq, upper)
        .into_iter()
        .map(|(x, _)| x)
        .collect())
}

/// (beta~(nu0), alpha~(nu0)); depends on theta2 only.
pub fn tilde_curves(rho: f64, h: f64, _theta1: f64, theta2: f64, nu0: f64) -> (f64, f64) {
    let (a, b) = star0(rho, h, theta2.cos().powi(2), nu0);
    (b, a)
}

fn is_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Enumerates the imaginary spectrum over |k| <= K and labels the scenario.
///
/// K is `k_max` capped by the last mode whose line still meets the branch
/// disk; when all lines are parallel `k_max` must be supplied.
pub fn detect_scenario(p: &ModelParams, k_max: Option<i32>) -> Result<ScenarioReport> {
    let astar = branch_extent(p)?;
    let sd = p.sd().abs();
    let kk = if sd < SD_EPS {
        match k_max {
            Some(k) if k >= 1 => k,
            Some(_) => {
                return Err(Error::InvalidParam {
                    name: "k_max",
                    reason: "must be at least 1".into(),
                })
            }
            None => return Err(Error::KmaxRequired),
        }
    } else {
        let geom = (astar / (p.nu0 * sd)).floor().min(1e6) as i32;
        match k_max {
            Some(k) if k < 1 => {
                return Err(Error::InvalidParam {
                    name: "k_max",
                    reason: "must be at least 1".into(),
                })
            }
            Some(k) => k.min(geom),
            None => geom,
        }
    };
    let mut spectrum = Vec::new();
    for k in -kk.max(1)..=kk.max(1) {
        spectrum.extend(mode_eigenvalues(p, k)?);
    }
    let of_mode = |k: i32| -> Vec<SpectralPoint> {
        spectrum.iter().copied().filter(|pt| pt.k == k).collect()
    };
    let report = |scenario, witnesses, nu0_critical| ScenarioReport {
        scenario,
        witnesses,
        nu0_critical,
        spectrum: spectrum.clone(),
    };
    let zero = SpectralPoint {
        k: 0,
        s: 0.0,
        mult: taylor_mult_at_zero(p),
    };
    if zero.mult >= 6 {
        return Ok(report(Scenario::ZeroSquared, vec![zero], None));
    }
    let label = classify(p.beta, p.alpha, p.rho, p.h, p.theta1);
    if label.region == Region::OnC1 {
        return Ok(report(Scenario::Real11, vec![zero], None));
    }

    let mode0: Vec<SpectralPoint> = of_mode(0).into_iter().filter(|pt| pt.s != 0.0).collect();
    let others: Vec<SpectralPoint> = spectrum
        .iter()
        .copied()
        .filter(|pt| pt.k.abs() >= 2)
        .collect();
    let m1 = of_mode(1);
    let mm1 = of_mode(-1);

    if mode0.is_empty()
        && others.is_empty()
        && m1.len() == 1
        && mm1.len() == 1
        && m1[0].mult == 2
        && mm1[0].mult == 2
    {
        return Ok(report(
            Scenario::HamiltonianHopfMode1,
            vec![m1[0], mm1[0]],
            Some(p.nu0),
        ));
    }

    for k in -kk..=kk {
        let pts = of_mode(k);
        for w in pts.windows(2) {
            if w[0].mult == 1 && w[1].mult == 1 && is_close(w[0].s, w[1].s, 1e-5) {
                return Err(Error::Inconclusive(format!(
                    "two mode-{k} roots near s = {} are within tolerance",
                    w[0].s
                )));
            }
        }
    }

    let pos0: Vec<SpectralPoint> = mode0.iter().copied().filter(|pt| pt.s > 0.0).collect();
    let near_zero: Vec<SpectralPoint> = m1.iter().copied().filter(|pt| pt.s.abs() < 1e-6).collect();
    if pos0.len() == 1
        && pos0[0].mult == 1
        && others.is_empty()
        && near_zero.len() == 1
        && m1.len() == 2
    {
        let z = near_zero[0];
        if z.s.abs() > 1e-8 {
            return Err(Error::Inconclusive(format!(
                "mode-1 root {} is too close to zero to decide",
                z.s
            )));
        }
        let s1 = m1.iter().copied().find(|pt| pt.s.abs() >= 1e-6).unwrap();
        if s1.mult == 1 && z.mult == 1 {
            let kappa0 = pos0[0].s;
            let mmax = (s1.s.abs() / kappa0).ceil() as i64 + 1;
            for m in 0..=mmax {
                if (s1.s.abs() - m as f64 * kappa0).abs() <= 1e-8 {
                    return Err(Error::Inconclusive(format!(
                        "s = {} is resonant with {m} kappa0",
                        s1.s
                    )));
                }
            }
            let neg0 = mode0.iter().copied().find(|pt| pt.s < 0.0).unwrap();
            let zm = mm1.iter().copied().find(|pt| pt.s.abs() < 1e-6);
            let mut w = vec![neg0, pos0[0], z, s1];
            w.extend(zm);
            w.extend(mm1.iter().copied().filter(|pt| pt.s.abs() >= 1e-6));
            return Ok(report(Scenario::Resonance00IsIkappa0, w, Some(p.nu0)));
        }
    }
    Ok(report(Scenario::None, Vec::new(), None))
}
