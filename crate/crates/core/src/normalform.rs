//! Coefficients of the reduced Hamiltonian for the mode-1
//! Hamiltonian-Hopf bifurcation and for the doubly periodic resonance.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{evaluate_mode_residual, is_tangent, t_fun};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::params::{wavevector_of, ModelParams};
use crate::regions::tilde_curves;
use crate::special::csch2;
use crate::spectral::{
    eigenvector, pairing_closed, pairing_quadrature, symplectic_product, symplectic_unit,
    tau1_closed,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionFamily {
    Bright,
    Dark,
    None,
}

impl SolutionFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolutionFamily::Bright => "bright",
            SolutionFamily::Dark => "dark",
            SolutionFamily::None => "none",
        }
    }
}

/// Coefficients of the truncated reduced system. `c3_1`, `d2_0` and `d3_0`
/// have no closed form and are supplied by the caller (default 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfCoefficients {
    #[serde(default)]
    pub s: f64,
    #[serde(default = "one")]
    pub tau1: f64,
    pub c2_1: f64,
    pub d1_0: f64,
    #[serde(default)]
    pub c3_1: f64,
    #[serde(default)]
    pub d2_0: f64,
    #[serde(default)]
    pub d3_0: f64,
}

fn one() -> f64 {
    1.0
}

impl HopfCoefficients {
    /// Coefficients with only the detuning and cubic terms set.
    pub fn simple(s: f64, c2_1: f64, d1_0: f64) -> Self {
        HopfCoefficients {
            s,
            tau1: 1.0,
            c2_1,
            d1_0,
            c3_1: 0.0,
            d2_0: 0.0,
            d3_0: 0.0,
        }
    }

    /// Family label from the signs of c2_1 and d1_0 alone.
    pub fn classification(&self) -> SolutionFamily {
        if self.c2_1 < 0.0 && self.d1_0 > 0.0 {
            SolutionFamily::Bright
        } else if self.c2_1 < 0.0 && self.d1_0 < 0.0 {
            SolutionFamily::Dark
        } else {
            SolutionFamily::None
        }
    }
}

/// c2_1 and d1_0 at a mode-1 double eigenvalue i s.
pub fn hopf_coefficients(p: &ModelParams, s: f64) -> Result<HopfCoefficients> {
    let (sn, c) = p.theta1.sin_cos();
    if sn.abs() < 1e-12 || c.abs() < 1e-12 {
        return Err(Error::OutsideScenario(
            "theta1 must differ from 0 and +-pi/2".into(),
        ));
    }
    let q = s + p.nu0 * p.cd();
    if q.abs() < 1e-12 * (1.0 + s.abs()) {
        return Err(Error::OutsideScenario(
            "s + nu0 cos(theta1 - theta2) vanishes".into(),
        ));
    }
    let w = wavevector_of(p, 1, s);
    let g = w.norm();
    let scale = 1.0 + (p.alpha + p.beta * g * g) * g;
    if evaluate_mode_residual(p, 1, s).abs() > 1e-8 * scale || !is_tangent(p, 1, s) {
        return Err(Error::OutsideScenario(format!(
            "i s = {s} i is not a double mode-1 eigenvalue"
        )));
    }
    let tau1 = tau1_closed(p, s)?;
    if tau1 == 0.0 || !tau1.is_finite() {
        return Err(Error::OutsideScenario("tau1 vanishes".into()));
    }
    let (l1, l2) = (w.l1, w.l2);
    let t = t_fun(p, g);
    let c2_1 = 2.0 * g * l2 * p.sd() * t / (l1 * q * tau1);
    Ok(HopfCoefficients {
        s,
        tau1,
        c2_1,
        d1_0: d1_0(p, g, l1, q, tau1),
        c3_1: 0.0,
        d2_0: 0.0,
        d3_0: 0.0,
    })
}

fn d1_0(p: &ModelParams, g: f64, l1: f64, q: f64, tau1: f64) -> f64 {
    let (rho, h, alpha, beta) = (p.rho, p.h, p.alpha, p.beta);
    let c = p.cos1();
    let th = f64::tanh;
    let hg = h * g;
    let l1_2 = l1 * l1;
    let l1_4 = l1_2 * l1_2;
    let g4 = g.powi(4);

    let first = l1_2
        * (rho * (-4.0 * g / (th(2.0 * g) * th(g).powi(2)) + 6.0 * g / th(g))
            - 4.0 * g / (th(2.0 * hg) * th(hg).powi(2))
            + 6.0 * g / th(hg));
    let second = 4.0 * l1_2 * q * q / (g * g) * (rho / th(g).powi(2) + 1.0 / (h * th(hg).powi(2)));
    let third = 1.5 * g4 * beta;
    let mode2_bracket = 4.0 / (th(2.0 * hg) * th(hg)) + csch2(hg)
        - 2.0
        - rho * (4.0 / (th(2.0 * g) * th(g)) + csch2(g) - 2.0);
    let mode2_den =
        alpha + 4.0 * beta * g * g - 2.0 * l1_2 / g * (rho / th(2.0 * g) + 1.0 / th(2.0 * hg));
    let fourth = 0.5 * l1_4 * mode2_bracket * mode2_bracket / mode2_den;
    let mean_bracket = rho * (l1 * csch2(g) + 2.0 * c * q / (g * th(g)))
        - (l1 * csch2(hg) + 2.0 * c * q / (hg * th(hg)));
    let mean_den = alpha - c * c * (rho + 1.0 / h);
    let fifth = l1_2 * mean_bracket * mean_bracket / mean_den;

    -g4 / (l1_4 * tau1 * tau1) * (first - second - third - fourth - fifth)
}

/// Family predicted for the sign of mu.
pub fn classify_solution_family(c: &HopfCoefficients, mu: f64) -> SolutionFamily {
    if c.c2_1 >= 0.0 {
        return SolutionFamily::None;
    }
    if c.d1_0 > 0.0 && mu > 0.0 {
        SolutionFamily::Bright
    } else if c.d1_0 < 0.0 && mu < 0.0 {
        SolutionFamily::Dark
    } else {
        SolutionFamily::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublyPeriodicCoefficients {
    pub kappa0: f64,
    pub nu0: f64,
    pub d1_01: f64,
    pub d2_01: f64,
    pub d2_10: f64,
    /// Not available in closed form; an input defaulting to 0. It does not
    /// enter the Jacobian determinant.
    pub d1_10: f64,
    pub d1_01_quadrature: f64,
    pub d2_01_quadrature: f64,
    pub beta_tilde: f64,
    /// Normalisation constant of the zero mode-1 eigenvector.
    pub c2: f64,
}

impl DoublyPeriodicCoefficients {
    /// [[d1_10, d1_01], [d2_10, d2_01]]
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        [[self.d1_10, self.d1_01], [self.d2_10, self.d2_01]]
    }

    pub fn determinant(&self) -> f64 {
        let j = self.jacobian();
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }
}

/// Normalisation constant of exp(iz) v_0^1: the closed form when
/// cos(theta1 - theta2) != 0, the quadrature value otherwise.
pub fn zero_mode1_normalisation(p: &ModelParams) -> Result<f64> {
    if p.cd().abs() < 1e-12 {
        pairing_quadrature(p, 1, 0.0)
    } else {
        pairing_closed(p, 1, 0.0)
    }
}

/// d2_10 from its closed form, without the degeneracy check.
pub fn d2_10_value(p: &ModelParams) -> Result<f64> {
    let c2 = zero_mode1_normalisation(p)?;
    if c2 == 0.0 {
        return Err(Error::SolvabilityDegenerate(0.0));
    }
    let (bt, _) = tilde_curves(p.rho, p.h, p.theta1, p.theta2, p.nu0);
    Ok(4.0 * PI * p.nu0 / (c2.abs() * p.cos2().powi(2)) * (bt - p.beta))
}

/// -i m int_0^{2 pi} Omega(e^{imx} W, e^{-imx} conj W) dx by the
/// trapezoidal rule in x.
fn x_pairing(w: &Field, m: f64) -> f64 {
    let n = 64;
    let dx = 2.0 * PI / n as f64;
    let wc = w.conj();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let ph = C64::from_polar(1.0, m * j as f64 * dx);
        acc += symplectic_product(&w.scale(ph), &wc.scale(ph.conj())) * dx;
    }
    (C64::new(0.0, -m) * acc).re
}

pub fn doubly_periodic_coefficients(
    p: &ModelParams,
    kappa0: f64,
    nu0: f64,
) -> Result<DoublyPeriodicCoefficients> {
    let p = p.with_nu0(nu0);
    let scale = 1.0 + p.alpha + p.beta;
    if evaluate_mode_residual(&p, 1, 0.0).abs() > 1e-8 * scale * (1.0 + nu0.powi(3)) {
        return Err(Error::OutsideScenario(
            "0 is not a mode-1 eigenvalue at this nu0".into(),
        ));
    }
    if evaluate_mode_residual(&p, 0, kappa0).abs() > 1e-8 * scale * (1.0 + kappa0.powi(3)) {
        return Err(Error::OutsideScenario(
            "kappa0 is not a mode-0 eigenvalue".into(),
        ));
    }
    let c1 = pairing_closed(&p, 0, kappa0)?;
    let c2 = zero_mode1_normalisation(&p)?;
    let va = symplectic_unit(&eigenvector(&p, 0, kappa0)?, c1);
    let vb = symplectic_unit(&eigenvector(&p, 1, 0.0)?, c2);
    let d2_10 = d2_10_value(&p)?;
    if d2_10.abs() < 1e-10 {
        return Err(Error::SolvabilityDegenerate(d2_10));
    }
    let (beta_tilde, _) = tilde_curves(p.rho, p.h, p.theta1, p.theta2, nu0);
    Ok(DoublyPeriodicCoefficients {
        kappa0,
        nu0,
        d1_01: 2.0 * PI,
        d2_01: 0.0,
        d2_10,
        d1_10: 0.0,
        d1_01_quadrature: x_pairing(&va, 1.0),
        d2_01_quadrature: x_pairing(&vb, 0.0),
        beta_tilde,
        c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::alpha_beta_star;

    #[test]
    fn family_from_signs() {
        let b = HopfCoefficients::simple(1.0, -1.0, 2.0);
        assert_eq!(classify_solution_family(&b, 1e-3), SolutionFamily::Bright);
        assert_eq!(classify_solution_family(&b, 0.0), SolutionFamily::None);
        let d = HopfCoefficients::simple(1.0, -1.0, -2.0);
        assert_eq!(classify_solution_family(&d, -1e-3), SolutionFamily::Dark);
        assert_eq!(classify_solution_family(&d, 1e-3), SolutionFamily::None);
        assert_eq!(b.classification(), SolutionFamily::Bright);
    }

    #[test]
    fn detuning_vanishes_for_equal_angles() {
        let base = ModelParams::new(0.2, 0.5, 1.0, 0.1, 0.7, 0.7, 1.2).unwrap();
        let (a, b) = alpha_beta_star(&base, 1, 0.5).unwrap();
        let p = base.with_alpha_beta(a, b);
        let c = hopf_coefficients(&p, 0.5).unwrap();
        assert_eq!(c.c2_1, 0.0);
    }

    #[test]
    fn rejects_simple_root() {
        let p = ModelParams::new(0.2, 0.5, 1.5, 0.3, 0.7, 0.1, 1.2).unwrap();
        assert!(matches!(
            hopf_coefficients(&p, 0.5),
            Err(Error::OutsideScenario(_))
        ));
    }

    #[test]
    fn coefficient_json_defaults() {
        let c: HopfCoefficients = serde_json::from_str(r#"{"c2_1":-1,"d1_0":0.5}"#).unwrap();
        assert_eq!(c.d2_0, 0.0);
        assert_eq!(c.tau1, 1.0);
    }
}
