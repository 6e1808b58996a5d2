//! Eigenvectors of the linearised operator on a single Fourier mode, the
//! operator itself, and symplectic products.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{
    alpha_beta_star, dbeta_star_ds, evaluate_mode_residual, is_tangent, t_fun,
};
use crate::error::{Error, Result};
use crate::field::{Field, Profile, Quadrature};
use crate::params::{wavevector_of, ModelParams};
use crate::regions::{Scenario, ScenarioReport};
use crate::special::{coth, coth_minus_inv, csch2};

pub const QUAD_NODES: usize = 64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// L applied to a field, with the four boundary residuals
/// `phi1'(0)`, top condition of layer 1, `phi2'(0)`, top condition of layer 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub field: Field,
    pub bc: [C64; 4],
}

struct Geometry {
    g: f64,
    l1: f64,
    q: f64,
    c: f64,
}

fn geometry(p: &ModelParams, k: i32, s: f64) -> Result<Geometry> {
    let w = wavevector_of(p, k, s);
    let g = w.norm();
    if g == 0.0 || w.l1.abs() < 1e-14 * (1.0 + g) {
        return Err(Error::DivisionDegenerate);
    }
    Ok(Geometry {
        g,
        l1: w.l1,
        q: s + k as f64 * p.nu0 * p.cd(),
        c: p.cos1(),
    })
}

/// Eigenvector of mode k for the eigenvalue i s.
pub fn eigenvector(p: &ModelParams, k: i32, s: f64) -> Result<Field> {
    let Geometry { g, l1, q, c } = geometry(p, k, s)?;
    let hg = p.h * g;
    let omega = I * (-p.rho * c * coth_minus_inv(g) - c * coth_minus_inv(hg) + g * p.beta * q / l1);
    Ok(Field {
        k,
        eta: re(g / l1),
        omega,
        phi1: Profile::chat(g, I),
        psi1: Profile::constant(re(p.rho * g * c / l1)).add(&Profile::chat(g, re(-p.rho * q))),
        phi2: Profile::chat(hg, -I),
        psi2: Profile::constant(re(-g * c / l1)).add(&Profile::chat(hg, re(p.h * q))),
    })
}

/// Generalised eigenvector u with (L - i s) u = v at a double eigenvalue.
pub fn generalized_eigenvector(p: &ModelParams, k: i32, s: f64) -> Result<Field> {
    let Geometry { g, l1, q, c } = geometry(p, k, s)?;
    let scale = 1.0 + (p.alpha + p.beta * g * g) * g;
    if evaluate_mode_residual(p, k, s).abs() > 1e-8 * scale || !is_tangent(p, k, s) {
        return Err(Error::NotDouble { k, s });
    }
    let rho = p.rho;
    let h = p.h;
    let hg = h * g;
    let g2 = g * g;
    let omega = rho * c * q / g2 * (coth(g) + g * csch2(g) - 2.0 / g)
        - rho * c * c / l1 * coth_minus_inv(g)
        + c * q / g2 * (coth(hg) + hg * csch2(hg) - 2.0 / hg)
        - c * c / l1 * coth_minus_inv(hg)
        + g * p.beta / l1;
    let phi1 = Profile::chat(g, re(-(q / g2) * (1.0 + g * coth(g)) + c / l1))
        .add(&Profile::shat(g, re(q / g)));
    let psi1 = phi1.scale(I * (rho * q)).add(&Profile::chat(g, I * rho));
    let phi2 = Profile::chat(hg, re((q / g2) * (1.0 + hg * coth(hg)) - c / l1))
        .add(&Profile::shat(hg, re(-q * h / g)));
    let psi2 = phi2.scale(I * (h * q)).add(&Profile::chat(hg, -I * h));
    Ok(Field {
        k,
        eta: re(0.0),
        omega: re(omega),
        phi1,
        psi1,
        phi2,
        psi2,
    })
}

/// Kernel vectors e1, e2 and generalised vectors f1, f2 of the zero mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroChain {
    pub e1: Field,
    pub e2: Field,
    pub f1: Field,
    pub f2: Field,
}

impl ZeroChain {
    /// The combination of e1, e2 paired with f1 by the symplectic form.
    pub fn e1_hat(&self, p: &ModelParams) -> Field {
        let c_sq = p.cos1().powi(2);
        self.e1
            .scale(re(-(p.h * p.alpha - c_sq) / (p.rho * c_sq)))
            .add(&self.e2)
    }

    pub fn e2_hat(&self, p: &ModelParams) -> Field {
        let c_sq = p.cos1().powi(2);
        self.e1
            .add(&self.e2.scale(re(-(p.alpha - p.rho * c_sq) / c_sq)))
    }
}

pub fn zero_mode_chain(p: &ModelParams) -> ZeroChain {
    let c = p.cos1();
    let (rho, a, h) = (p.rho, p.alpha, p.h);
    let mut e1 = Field::zero(0);
    e1.phi1 = Profile::constant(re(1.0));
    let mut e2 = Field::zero(0);
    e2.phi2 = Profile::constant(re(1.0));
    let mut f1 = Field::zero(0);
    f1.eta = re(-rho * c / a);
    f1.psi1 = Profile::constant(re(rho * (1.0 - rho * c * c / a)));
    f1.psi2 = Profile::constant(re(rho * c * c / a));
    let mut f2 = Field::zero(0);
    f2.eta = re(c / a);
    f2.psi1 = Profile::constant(re(rho * c * c / a));
    f2.psi2 = Profile::constant(re(h - c * c / a));
    ZeroChain { e1, e2, f1, f2 }
}

/// L applied to exp(i k z) u with the default quadrature.
pub fn apply_l(p: &ModelParams, u: &Field) -> Applied {
    apply_l_with(p, u, &Quadrature::new(QUAD_NODES))
}

pub fn apply_l_with(p: &ModelParams, u: &Field, quad: &Quadrature) -> Applied {
    let (rho, h, beta) = (p.rho, p.h, p.beta);
    let c = p.cos1();
    let kf = u.k as f64;
    let ik = I * kf;
    let transport = ik * (p.nu0 * p.cd());
    let e = p.nu0 * (p.cd() * c - p.cos2());
    let stretch = p.nu0 * p.nu0 * p.sd().powi(2) * kf * kf;

    let int_y_dphi1 = quad.integrate(|y| u.phi1.d1(y) * y);
    let int_y_dphi2 = quad.integrate(|y| u.phi2.d1(y) * y);
    let int_psi1 = quad.integrate(|y| u.psi1.value(y));
    let int_psi2 = quad.integrate(|y| u.psi2.value(y));
    let w = u.omega + int_y_dphi1 * (rho * c) - int_y_dphi2 * c;
    let phi1_top = u.phi1.value(1.0);
    let phi2_top = u.phi2.value(1.0);

    let l1 = w / beta - transport * u.eta;
    let l2 = (int_psi1 - u.eta * (rho * c)) * c
        - ik * phi1_top * (rho * e)
        - (int_psi2 + u.eta * c) * (c / h)
        + ik * phi2_top * e
        + u.eta * (stretch * beta)
        - transport * u.omega
        + u.eta * p.alpha;
    let l3 = u
        .psi1
        .scale(re(1.0 / rho))
        .add(&Profile::constant(-u.eta * c))
        .add(&u.phi1.scale(-transport));
    let l4 = u
        .phi1
        .second_derivative()
        .scale(re(-rho))
        .add(&u.psi1.scale(-transport))
        .add(&Profile::constant(w * (rho * c / beta)))
        .add(&u.phi1.scale(re(rho * stretch)));
    let l5 = u
        .psi2
        .scale(re(1.0 / h))
        .add(&Profile::constant(u.eta * (c / h)))
        .add(&u.phi2.scale(-transport));
    let l6 = u
        .phi2
        .second_derivative()
        .scale(re(-1.0 / h))
        .add(&u.psi2.scale(-transport))
        .add(&Profile::constant(-w * (c / beta)))
        .add(&u.phi2.scale(re(h * stretch)));
    let bc = [
        u.phi1.d1(0.0),
        -u.phi1.d1(1.0) * rho - ik * u.eta * (rho * e) + w * (rho * c / beta),
        u.phi2.d1(0.0),
        -u.phi2.d1(1.0) / h + ik * u.eta * e - w * (c / beta),
    ];
    Applied {
        field: Field {
            k: u.k,
            eta: l1,
            omega: l2,
            phi1: l3,
            psi1: l4,
            phi2: l5,
            psi2: l6,
        },
        bc,
    }
}

/// Uniform grid y_i = i/(n-1).
pub fn y_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Largest modulus of any component of `f` over the grid.
pub fn sup_norm(f: &Field, ys: &[f64]) -> f64 {
    let mut m = f.eta.norm().max(f.omega.norm());
    for &y in ys {
        for prof in [&f.phi1, &f.psi1, &f.phi2, &f.psi2] {
            m = m.max(prof.value(y).norm());
        }
    }
    m
}

/// (||(L - i s) u - rhs||, max boundary residual) on a 64-point grid.
pub fn chain_residual(p: &ModelParams, s: f64, u: &Field, rhs: Option<&Field>) -> (f64, f64) {
    let a = apply_l(p, u);
    let mut r = a.field.sub(&u.scale(I * s));
    if let Some(v) = rhs {
        r = r.sub(v);
    }
    let bc = a.bc.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (sup_norm(&r, &y_grid(64)), bc)
}

/// Symplectic product of exp(i kA z) u and exp(i kB z) v.
pub fn symplectic_product(u: &Field, v: &Field) -> C64 {
    symplectic_product_with(u, v, &Quadrature::new(QUAD_NODES))
}

pub fn symplectic_product_with(u: &Field, v: &Field, quad: &Quadrature) -> C64 {
    if u.k + v.k != 0 {
        return re(0.0);
    }
    let layer1 =
        quad.integrate(|y| v.psi1.value(y) * u.phi1.value(y) - v.phi1.value(y) * u.psi1.value(y));
    let layer2 =
        quad.integrate(|y| v.psi2.value(y) * u.phi2.value(y) - v.phi2.value(y) * u.psi2.value(y));
    (v.omega * u.eta - v.eta * u.omega + layer1 + layer2) * (2.0 * PI)
}

/// Unit-normalised representative of a simple eigenvector with
/// Omega(V, conj V) = i: `v / sqrt(c)` when c > 0, otherwise the conjugate
/// eigenvector `conj(v) / sqrt(|c|)`.
pub fn symplectic_unit(v: &Field, c: f64) -> Field {
    let scale = re(1.0 / c.abs().sqrt());
    if c > 0.0 {
        v.scale(scale)
    } else {
        v.conj().scale(scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub closed: f64,
    pub quadrature: f64,
}

impl Pairing {
    pub fn rel_err(&self) -> f64 {
        (self.closed - self.quadrature).abs() / self.quadrature.abs().max(1e-300)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceConstants {
    pub kappa0: f64,
    pub s: f64,
    pub c1: Pairing,
    pub c2: Pairing,
    /// The closed form for c2 is not trusted when cos(theta1 - theta2) = 0;
    /// `c2.closed` then holds the literal printed expression.
    pub c2_closed_flagged: bool,
    pub c3: Pairing,
    pub c4: Pairing,
    pub sign_violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfConstants {
    pub s: f64,
    pub tau1: Pairing,
    pub tau2: f64,
    pub tau3: f64,
    pub sign_violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    Resonance(ResonanceConstants),
    Hopf(HopfConstants),
}

impl Normalization {
    pub fn sign_violations(&self) -> &[String] {
        match self {
            Normalization::Resonance(r) => &r.sign_violations,
            Normalization::Hopf(h) => &h.sign_violations,
        }
    }

    /// Err when any of the definiteness conventions fails.
    pub fn require_sign_conventions(&self) -> Result<()> {
        let v = self.sign_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::SignConventionViolated(v.join("; ")))
        }
    }
}

/// Closed form of Omega(exp(iz) v, exp(-iz) conj(u)) at a mode-1 double root.
pub fn tau1_closed(p: &ModelParams, s: f64) -> Result<f64> {
    let Geometry { g, l1, q, .. } = geometry(p, 1, s)?;
    Ok(-2.0 * PI * q * g * g / (l1 * l1) * dbeta_star_ds(p, 1, s)?)
}

pub fn tau1_quadrature(p: &ModelParams, s: f64) -> Result<f64> {
    let v = eigenvector(p, 1, s)?;
    let u = generalized_eigenvector(p, 1, s)?;
    Ok(symplectic_product(&v, &u.conj()).re)
}

/// -i Omega(exp(iz) u, exp(-iz) conj(u))
pub fn tau2(p: &ModelParams, s: f64) -> Result<f64> {
    let u = generalized_eigenvector(p, 1, s)?;
    Ok((-I * symplectic_product(&u, &u.conj())).re)
}

pub fn c4_closed(p: &ModelParams) -> f64 {
    let c_sq = p.cos1().powi(2);
    2.0 * PI * p.h / c_sq * (c_sq * (p.rho + 1.0 / p.h) - p.alpha)
}

/// Omega(v, conj v)/i for a simple eigenvalue i s of mode k.
pub fn pairing_quadrature(p: &ModelParams, k: i32, s: f64) -> Result<f64> {
    let v = eigenvector(p, k, s)?;
    Ok((symplectic_product(&v, &v.conj()) / I).re)
}

/// Closed form of Omega(v, conj v)/i for a simple eigenvalue of mode k >= 0.
pub fn pairing_closed(p: &ModelParams, k: i32, s: f64) -> Result<f64> {
    let Geometry { g, l1, q, c } = geometry(p, k, s)?;
    if q.abs() < 1e-14 * (1.0 + s.abs()) {
        return Ok(4.0 * PI * g * c / l1 * t_fun(p, g));
    }
    let (_, b) = alpha_beta_star(p, k, s)?;
    Ok(4.0 * PI * g * g * q / (l1 * l1) * (b - p.beta))
}

pub fn normalization_constants(p: &ModelParams, report: &ScenarioReport) -> Result<Normalization> {
    match report.scenario {
        Scenario::HamiltonianHopfMode1 => {
            let s = report
                .witnesses
                .iter()
                .find(|w| w.k == 1)
                .map(|w| w.s)
                .ok_or_else(|| Error::OutsideScenario("missing mode-1 witness".into()))?;
            let tau1 = Pairing {
                closed: tau1_closed(p, s)?,
                quadrature: tau1_quadrature(p, s)?,
            };
            let mut sign_violations = Vec::new();
            if tau1.closed <= 0.0 {
                sign_violations.push(format!("tau1 = {} is not positive", tau1.closed));
            }
            Ok(Normalization::Hopf(HopfConstants {
                s,
                tau1,
                tau2: tau2(p, s)?,
                tau3: -c4_closed(p),
                sign_violations,
            }))
        }
        Scenario::Resonance00IsIkappa0 => {
            let kappa0 = report
                .kappa0()
                .ok_or_else(|| Error::OutsideScenario("missing mode-0 witness".into()))?;
            let s = report
                .mode1_s()
                .ok_or_else(|| Error::OutsideScenario("missing mode-1 witness".into()))?;
            resonance_constants(p, kappa0, s).map(Normalization::Resonance)
        }
        other => Err(Error::OutsideScenario(format!(
            "no normalisation for scenario {}",
            other.as_str()
        ))),
    }
}

/// c1..c4 for the 00(is)(i kappa0) resonance, closed form and quadrature.
pub fn resonance_constants(p: &ModelParams, kappa0: f64, s: f64) -> Result<ResonanceConstants> {
    let c1 = Pairing {
        closed: pairing_closed(p, 0, kappa0)?,
        quadrature: pairing_quadrature(p, 0, kappa0)?,
    };
    let flagged = p.cd().abs() < 1e-12;
    let c2_closed = if flagged {
        4.0 * PI * p.nu0 * t_fun(p, p.nu0)
    } else {
        let (_, b) = alpha_beta_star(p, 1, 0.0)?;
        4.0 * PI * p.cd() * p.nu0 / p.cos2().powi(2) * (b - p.beta)
    };
    let c2 = Pairing {
        closed: c2_closed,
        quadrature: pairing_quadrature(p, 1, 0.0)?,
    };
    let c3 = Pairing {
        closed: pairing_closed(p, 1, s)?,
        quadrature: pairing_quadrature(p, 1, s)?,
    };
    let chain = zero_mode_chain(p);
    let c4 = Pairing {
        closed: c4_closed(p),
        quadrature: symplectic_product(&chain.e1_hat(p), &chain.f1).re,
    };
    let mut sign_violations = Vec::new();
    for (name, v) in [
        ("c1", c1.quadrature),
        ("c2", c2.quadrature),
        ("c3", c3.quadrature),
    ] {
        if v <= 0.0 {
            sign_violations.push(format!("{name} = {v} is not positive"));
        }
    }
    if c4.closed <= 0.0 {
        sign_violations.push(format!("c4 = {} is not positive", c4.closed));
    }
    Ok(ResonanceConstants {
        kappa0,
        s,
        c1,
        c2,
        c2_closed_flagged: flagged,
        c3,
        c4,
        sign_violations,
    })
}
