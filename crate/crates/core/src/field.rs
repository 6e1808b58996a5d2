//! Single-mode fields (eta, omega, phi1, psi1, phi2, psi2) whose y-dependent
//! components are finite sums of cosh/sinh profiles with exact derivatives.

use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::special::ratio_cs;

/// One hyperbolic term: `a cosh(k y)/sinh(k) + b y sinh(k y)/sinh(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub kappa: f64,
    pub a: C64,
    pub b: C64,
}

/// Constant plus a sum of [`Term`]s on y in [0, 1].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Profile {
    pub c0: C64,
    pub terms: Vec<Term>,
}

impl Profile {
    pub fn zero() -> Self {
        Profile::default()
    }

    pub fn constant(c: C64) -> Self {
        Profile {
            c0: c,
            terms: Vec::new(),
        }
    }

    /// `a cosh(k y)/sinh(k)`
    pub fn chat(kappa: f64, a: C64) -> Self {
        Profile {
            c0: C64::new(0.0, 0.0),
            terms: vec![Term {
                kappa,
                a,
                b: C64::new(0.0, 0.0),
            }],
        }
    }

    /// `b y sinh(k y)/sinh(k)`
    pub fn shat(kappa: f64, b: C64) -> Self {
        Profile {
            c0: C64::new(0.0, 0.0),
            terms: vec![Term {
                kappa,
                a: C64::new(0.0, 0.0),
                b,
            }],
        }
    }

    pub fn value(&self, y: f64) -> C64 {
        self.terms.iter().fold(self.c0, |acc, t| {
            let (cn, sn) = ratio_cs(t.kappa, y);
            acc + t.a * cn + t.b * (y * sn)
        })
    }

    pub fn d1(&self, y: f64) -> C64 {
        self.terms.iter().fold(C64::new(0.0, 0.0), |acc, t| {
            let (cn, sn) = ratio_cs(t.kappa, y);
            acc + t.a * (t.kappa * sn) + t.b * (sn + t.kappa * y * cn)
        })
    }

    pub fn d2(&self, y: f64) -> C64 {
        self.terms.iter().fold(C64::new(0.0, 0.0), |acc, t| {
            let (cn, sn) = ratio_cs(t.kappa, y);
            let k = t.kappa;
            acc + t.a * (k * k * cn) + t.b * (2.0 * k * cn + k * k * y * sn)
        })
    }

    /// Exact second derivative as a profile.
    pub fn second_derivative(&self) -> Profile {
        Profile {
            c0: C64::new(0.0, 0.0),
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let k = t.kappa;
                    Term {
                        kappa: k,
                        a: t.a * (k * k) + t.b * (2.0 * k),
                        b: t.b * (k * k),
                    }
                })
                .collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Profile {
        Profile {
            c0: self.c0 * z,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    kappa: t.kappa,
                    a: t.a * z,
                    b: t.b * z,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Profile) -> Profile {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().copied());
        Profile {
            c0: self.c0 + other.c0,
            terms,
        }
    }

    pub fn conj(&self) -> Profile {
        Profile {
            c0: self.c0.conj(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    kappa: t.kappa,
                    a: t.a.conj(),
                    b: t.b.conj(),
                })
                .collect(),
        }
    }
}

/// Coefficient vector of a single Fourier mode `exp(i k z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub k: i32,
    pub eta: C64,
    pub omega: C64,
    pub phi1: Profile,
    pub psi1: Profile,
    pub phi2: Profile,
    pub psi2: Profile,
}

impl Field {
    pub fn zero(k: i32) -> Self {
        Field {
            k,
            eta: C64::new(0.0, 0.0),
            omega: C64::new(0.0, 0.0),
            phi1: Profile::zero(),
            psi1: Profile::zero(),
            phi2: Profile::zero(),
            psi2: Profile::zero(),
        }
    }

    pub fn scale(&self, z: C64) -> Field {
        Field {
            k: self.k,
            eta: self.eta * z,
            omega: self.omega * z,
            phi1: self.phi1.scale(z),
            psi1: self.psi1.scale(z),
            phi2: self.phi2.scale(z),
            psi2: self.psi2.scale(z),
        }
    }

    /// Sum of two fields of the same mode.
    pub fn add(&self, other: &Field) -> Field {
        assert_eq!(self.k, other.k, "adding fields of different modes");
        Field {
            k: self.k,
            eta: self.eta + other.eta,
            omega: self.omega + other.omega,
            phi1: self.phi1.add(&other.phi1),
            psi1: self.psi1.add(&other.psi1),
            phi2: self.phi2.add(&other.phi2),
            psi2: self.psi2.add(&other.psi2),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Complex conjugate of `exp(i k z) u`, a field of mode -k.
    pub fn conj(&self) -> Field {
        Field {
            k: -self.k,
            eta: self.eta.conj(),
            omega: self.omega.conj(),
            phi1: self.phi1.conj(),
            psi1: self.psi1.conj(),
            phi2: self.phi2.conj(),
            psi2: self.psi2.conj(),
        }
    }

    /// Reverser image: (eta, -omega, -phi1, psi1, -phi2, psi2) with z -> -z.
    pub fn reverser(&self) -> Field {
        let m = C64::new(-1.0, 0.0);
        Field {
            k: -self.k,
            eta: self.eta,
            omega: -self.omega,
            phi1: self.phi1.scale(m),
            psi1: self.psi1.clone(),
            phi2: self.phi2.scale(m),
            psi2: self.psi2.clone(),
        }
    }
}

/// Gauss-Legendre rule mapped to [0, 1].
#[derive(Debug, Clone)]
pub struct Quadrature {
    nodes: Vec<(f64, f64)>,
}

impl Quadrature {
    pub fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(n.try_into().expect("at least two nodes"));
        let nodes = rule
            .iter()
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Quadrature { nodes }
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.nodes
            .iter()
            .fold(C64::new(0.0, 0.0), |acc, &(y, w)| acc + f(y) * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Profile {
        Profile::chat(1.3, C64::new(0.5, -0.2))
            .add(&Profile::shat(2.1, C64::new(-0.3, 0.7)))
            .add(&Profile::constant(C64::new(0.1, 0.0)))
    }

    #[test]
    fn derivatives_match_differences() {
        let p = sample();
        let h = 1e-5;
        for y in [0.1, 0.5, 0.9] {
            let fd1 = (p.value(y + h) - p.value(y - h)) / (2.0 * h);
            let fd2 = (p.d1(y + h) - p.d1(y - h)) / (2.0 * h);
            assert!((fd1 - p.d1(y)).norm() < 1e-9);
            assert!((fd2 - p.d2(y)).norm() < 1e-8);
            assert!((p.second_derivative().value(y) - p.d2(y)).norm() < 1e-13);
        }
    }

    #[test]
    fn even_profiles_have_zero_slope_at_bottom() {
        assert!(sample().d1(0.0).norm() < 1e-15);
    }

    #[test]
    fn quadrature_exact_on_polynomials() {
        let q = Quadrature::new(64);
        let v = q.integrate(|y| C64::new(y.powi(5), 0.0));
        assert!((v.re - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn reverser_is_involution() {
        let f = Field {
            k: 2,
            eta: C64::new(1.0, 2.0),
            omega: C64::new(0.0, 1.0),
            phi1: sample(),
            psi1: sample(),
            phi2: sample(),
            psi2: sample(),
        };
        let g = f.reverser().reverser();
        assert_eq!(g, f);
        assert_eq!(f.conj().conj(), f);
    }
}
