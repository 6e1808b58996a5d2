//! Interface elevation fields at linear order.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DoublyPeriodicBranch, OrbitKind, ReducedOrbit};
use crate::error::{Error, Result};
use crate::normalform::DoublyPeriodicCoefficients;
use crate::params::{wavevector_of, ModelParams};
use crate::spectral::pairing_closed;

/// eta sampled on a tensor grid; row `i` holds eta(x[i], z[..]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub eta: Vec<f64>,
}

impl FieldGrid {
    pub fn get(&self, ix: usize, iz: usize) -> f64 {
        self.eta[ix * self.z.len() + iz]
    }

    fn fill<F>(x: Vec<f64>, z: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let nz = z.len();
        let mut eta = vec![0.0; x.len() * nz];
        eta.par_chunks_mut(nz.max(1))
            .zip(x.par_iter())
            .for_each(|(row, &xv)| {
                for (v, &zv) in row.iter_mut().zip(z.iter()) {
                    *v = f(xv, zv);
                }
            });
        FieldGrid { x, z, eta }
    }

    /// Matrix CSV: `#` comment lines, a header row of z values, then one
    /// row per x value.
    pub fn to_csv_matrix(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str("x\\z");
        for z in &self.z {
            let _ = write!(out, ",{z}");
        }
        out.push('\n');
        for (i, x) in self.x.iter().enumerate() {
            let _ = write!(out, "{x}");
            for j in 0..self.z.len() {
                let _ = write!(out, ",{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    /// Long CSV with columns x, z, eta.
    pub fn to_csv_long(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str("x,z,eta\n");
        for (i, x) in self.x.iter().enumerate() {
            for (j, z) in self.z.iter().enumerate() {
                let _ = writeln!(out, "{x},{z},{}", self.get(i, j));
            }
        }
        out
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Elevation of the normalised mode-1 eigenvector at i s.
pub fn envelope_eta_coefficient(p: &ModelParams, s: f64, tau1: f64) -> Result<f64> {
    let w = wavevector_of(p, 1, s);
    if w.l1 == 0.0 || tau1 == 0.0 {
        return Err(Error::DivisionDegenerate);
    }
    Ok(w.norm() / (w.l1 * tau1.abs().sqrt()))
}

/// eta(x, z) = 2 Re[A(x) exp(i (nu0 + mu) z) eta_V] over the orbit window
/// and one z-period (endpoint included).
pub fn synthesize_envelope_wave(
    p: &ModelParams,
    orbit: &ReducedOrbit,
    s: f64,
    nx: usize,
    nz: usize,
) -> Result<FieldGrid> {
    if !matches!(orbit.kind, OrbitKind::Bright | OrbitKind::Dark) {
        return Err(Error::OutsideScenario(format!(
            "envelope synthesis needs a bright or dark orbit, got {}",
            orbit.kind.as_str()
        )));
    }
    let eta_v = envelope_eta_coefficient(p, s, orbit.coeffs.tau1)?;
    let nu = p.nu0 + orbit.mu;
    let (xa, xb) = orbit.x_range();
    let x = linspace(xa, xb, nx);
    let z = linspace(0.0, 2.0 * PI / nu, nz);
    let amps: Vec<C64> = x.iter().map(|&xv| orbit.interpolate(xv).a).collect();
    let nzl = z.len();
    let mut eta = vec![0.0; x.len() * nzl];
    eta.par_chunks_mut(nzl)
        .zip(amps.par_iter())
        .for_each(|(row, &a)| {
            for (v, &zv) in row.iter_mut().zip(z.iter()) {
                *v = 2.0 * (a * C64::from_polar(eta_v, nu * zv)).re;
            }
        });
    Ok(FieldGrid { x, z, eta })
}

/// Two superposed linear waves: A along x with wavenumber kappa0 + mu2 and
/// B along z with wavenumber nu0 + mu1, over `x_periods` x-periods and one
/// z-period.
pub fn synthesize_doubly_periodic(
    p: &ModelParams,
    dp: &DoublyPeriodicCoefficients,
    branch: &DoublyPeriodicBranch,
    nx: usize,
    nz: usize,
    x_periods: f64,
) -> Result<FieldGrid> {
    let p = p.with_nu0(dp.nu0);
    let c1 = pairing_closed(&p, 0, dp.kappa0)?;
    let eta_a = 1.0 / (p.cos1() * c1.abs().sqrt());
    let eta_b = 1.0 / (p.cos2() * dp.c2.abs().sqrt());
    let kx = branch.kappa0 + branch.mu2;
    let kz = branch.nu0 + branch.mu1;
    let x = linspace(0.0, x_periods * 2.0 * PI / kx, nx);
    let z = linspace(0.0, 2.0 * PI / kz, nz);
    let (a, b) = (branch.amp_a, branch.amp_b);
    Ok(FieldGrid::fill(x, z, move |xv, zv| {
        2.0 * a * eta_a * (kx * xv).cos() + 2.0 * b * eta_b * (kz * zv).cos()
    }))
}
