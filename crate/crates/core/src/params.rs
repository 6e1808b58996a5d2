use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nondimensional model parameters.
///
/// `rho` is the density ratio of the upper to the lower layer, `h` the depth
/// ratio of the lower to the upper layer, `alpha` and `beta` the gravity and
/// surface-tension parameters, `theta1`/`theta2` the propagation and
/// periodicity directions and `nu0` the transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub nu0: f64,
}

impl ModelParams {
    pub fn new(
        rho: f64,
        h: f64,
        alpha: f64,
        beta: f64,
        theta1: f64,
        theta2: f64,
        nu0: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            rho,
            h,
            alpha,
            beta,
            theta1,
            theta2,
            nu0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: &str) -> Error {
            Error::InvalidParam {
                name,
                reason: reason.to_string(),
            }
        }
        let all = [
            self.rho,
            self.h,
            self.alpha,
            self.beta,
            self.theta1,
            self.theta2,
            self.nu0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(bad("params", "all fields must be finite"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(bad("rho", "must lie in (0, 1)"));
        }
        if self.h <= 0.0 {
            return Err(bad("h", "must be positive"));
        }
        if self.alpha <= 0.0 {
            return Err(bad("alpha", "must be positive"));
        }
        if self.beta < 0.0 {
            return Err(bad("beta", "must be non-negative"));
        }
        if self.nu0 <= 0.0 {
            return Err(bad("nu0", "must be positive"));
        }
        if self.theta1.abs() >= PI {
            return Err(bad("theta1", "must lie in (-pi, pi)"));
        }
        if self.theta2.abs() >= PI {
            return Err(bad("theta2", "must lie in (-pi, pi)"));
        }
        Ok(())
    }

    pub fn with_alpha_beta(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn with_nu0(mut self, nu0: f64) -> Self {
        self.nu0 = nu0;
        self
    }

    pub fn cos1(&self) -> f64 {
        self.theta1.cos()
    }

    pub fn cos2(&self) -> f64 {
        self.theta2.cos()
    }

    /// cos(theta1 - theta2)
    pub fn cd(&self) -> f64 {
        (self.theta1 - self.theta2).cos()
    }

    /// sin(theta1 - theta2)
    pub fn sd(&self) -> f64 {
        (self.theta1 - self.theta2).sin()
    }

    /// Position of the horizontal line alpha = cos^2(theta1)(rho + 1/h).
    pub fn line_alpha(&self) -> f64 {
        self.cos1().powi(2) * (self.rho + 1.0 / self.h)
    }

    /// Abscissa beta = cos^2(theta1)(rho + h)/3 where the line splits.
    pub fn star_beta(&self) -> f64 {
        self.cos1().powi(2) * (self.rho + self.h) / 3.0
    }
}

/// Offsets of the transverse and streamwise wavenumbers from criticality.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BifurcationOffsets {
    pub mu1: f64,
    pub mu2: f64,
}

impl BifurcationOffsets {
    pub const DEFAULT_BOUND: f64 = 0.1;

    /// Checks `|mu_i| <= bound * nu0`.
    pub fn validate(&self, nu0: f64, bound: f64) -> Result<()> {
        for (name, v) in [("mu1", self.mu1), ("mu2", self.mu2)] {
            if !v.is_finite() || v.abs() > bound * nu0 {
                return Err(Error::InvalidParam {
                    name,
                    reason: format!("|{name}| must not exceed {bound} * nu0"),
                });
            }
        }
        Ok(())
    }
}

/// The JSON parameter document: model parameters plus optional offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub nu0: f64,
    #[serde(default)]
    pub mu1: f64,
    #[serde(default)]
    pub mu2: f64,
}

impl ParamsFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }

    pub fn split(&self) -> Result<(ModelParams, BifurcationOffsets)> {
        let p = ModelParams::new(
            self.rho,
            self.h,
            self.alpha,
            self.beta,
            self.theta1,
            self.theta2,
            self.nu0,
        )?;
        Ok((
            p,
            BifurcationOffsets {
                mu1: self.mu1,
                mu2: self.mu2,
            },
        ))
    }

    pub fn from_parts(p: &ModelParams, off: BifurcationOffsets) -> Self {
        ParamsFile {
            rho: p.rho,
            h: p.h,
            alpha: p.alpha,
            beta: p.beta,
            theta1: p.theta1,
            theta2: p.theta2,
            nu0: p.nu0,
            mu1: off.mu1,
            mu2: off.mu2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveVector {
    pub l1: f64,
    pub l2: f64,
}

impl WaveVector {
    pub fn norm(&self) -> f64 {
        self.l1.hypot(self.l2)
    }
}

/// Maps an angle to (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// s (cos theta1, sin theta1) + k nu0 (cos theta2, sin theta2)
pub fn wavevector_of(p: &ModelParams, k: i32, s: f64) -> WaveVector {
    let kn = k as f64 * p.nu0;
    WaveVector {
        l1: kn * p.theta2.cos() + s * p.theta1.cos(),
        l2: kn * p.theta2.sin() + s * p.theta1.sin(),
    }
}

pub fn gamma_tilde(p: &ModelParams, k: i32, s: f64) -> f64 {
    wavevector_of(p, k, s).norm()
}
