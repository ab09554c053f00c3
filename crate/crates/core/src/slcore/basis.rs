use std::sync::Arc;

use num_complex::Complex64;

use super::limit::{bracket_limit, LimitConfig};
use super::problem::{Endpoint, SLProblem};
use super::trajectory::{closed_form, Solution, SolutionEval};
use super::QuasiState;
use crate::error::{Error, Result};

type C = Complex64;

fn re(v: f64) -> C {
    C::new(v, 0.0)
}

/// Real functions {φ, ψ} near an endpoint with [ψ, φ] = 1 there, used to
/// express boundary conditions through endpoint brackets.
#[derive(Clone)]
pub struct BoundaryBasis {
    endpoint: Endpoint,
    phi: Solution,
    psi: Solution,
}

impl std::fmt::Debug for BoundaryBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BoundaryBasis(endpoint {})", self.endpoint)
    }
}

impl BoundaryBasis {
    /// Checks the normalization [ψ, φ] = 1 at the endpoint to 1e−8.
    pub fn new(problem: &SLProblem, endpoint: Endpoint, phi: Solution, psi: Solution) -> Result<Self> {
        let at = problem.endpoint(endpoint);
        let cfg = LimitConfig { rel_tol: 1e-8, ..LimitConfig::default() };
        let est = bracket_limit(psi.as_ref(), phi.as_ref(), at, endpoint, &cfg)?;
        if (est.value - re(1.0)).norm() > 1e-8 {
            return Err(Error::Parameter(format!("basis normalization [ψ, φ] = {} ≠ 1", est.value)));
        }
        Ok(BoundaryBasis { endpoint, phi, psi })
    }

    /// φ = x^{1/2+ν}, ψ = x^{1/2−ν}/(2ν) for ν ∈ (0, 1); φ = x^{1/2},
    /// ψ = −x^{1/2} ln x for ν = 0.
    pub fn bessel_origin(nu: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&nu) {
            return Err(Error::Regime(format!("no boundary basis at 0 for nu = {nu}")));
        }
        let dom = (0.0, f64::INFINITY);
        let (phi, psi) = if nu == 0.0 {
            (
                closed_form(dom, |x: f64| Ok((re(x.sqrt()), re(0.5 / x.sqrt())))),
                closed_form(dom, |x: f64| {
                    let l = x.ln();
                    Ok((re(-x.sqrt() * l), re(-(0.5 * l + 1.0) / x.sqrt())))
                }),
            )
        } else {
            (
                closed_form(dom, move |x: f64| {
                    Ok((re(x.powf(0.5 + nu)), re((0.5 + nu) * x.powf(nu - 0.5))))
                }),
                closed_form(dom, move |x: f64| {
                    Ok((re(x.powf(0.5 - nu) / (2.0 * nu)), re((0.5 - nu) * x.powf(-0.5 - nu) / (2.0 * nu))))
                }),
            )
        };
        let problem = SLProblem::bessel(nu)?;
        Self::new(&problem, Endpoint::A, phi, psi)
    }

    /// φ_c(c) = 0, (pφ_c′)(c) = 1 and ψ_c(c) = 1, (pψ_c′)(c) = 0 at a regular
    /// endpoint c of −y″; brackets then read [g, φ_c](c) = g(c) and
    /// [g, ψ_c](c) = −(p g′)(c).
    pub fn regular_free(problem: &SLProblem, endpoint: Endpoint) -> Result<Self> {
        if !problem.regular_at(endpoint) {
            return Err(Error::Regime(format!("endpoint {endpoint} is not regular")));
        }
        let c = problem.endpoint(endpoint);
        let dom = (problem.a(), problem.b());
        let phi = closed_form(dom, move |x: f64| Ok((re(x - c), re(1.0))));
        let psi = closed_form(dom, |_x: f64| Ok((re(1.0), re(0.0))));
        Self::new(problem, endpoint, phi, psi)
    }

    pub fn endpoint(&self) -> Endpoint {
        self.endpoint
    }

    pub fn phi(&self) -> &Solution {
        &self.phi
    }

    pub fn psi(&self) -> &Solution {
        &self.psi
    }

    /// Multiplies φ and ψ by a smooth cutoff equal to 1 within `inner` of
    /// the endpoint and 0 beyond `outer`, which places them in the maximal
    /// domain without changing any endpoint bracket.
    pub fn with_cutoff(&self, problem: &SLProblem, inner: f64, outer: f64) -> Result<Self> {
        if !(0.0 < inner && inner < outer) {
            return Err(Error::Parameter("cutoff needs 0 < inner < outer".into()));
        }
        let at = problem.endpoint(self.endpoint);
        if !at.is_finite() {
            return Err(Error::Regime("cutoff toward an infinite endpoint".into()));
        }
        let wrap = |f: Solution| -> Solution {
            Arc::new(Cutoff { inner: f, at, r0: inner, r1: outer, problem: problem.clone() })
        };
        Ok(BoundaryBasis { endpoint: self.endpoint, phi: wrap(self.phi.clone()), psi: wrap(self.psi.clone()) })
    }
}

struct Cutoff {
    inner: Solution,
    at: f64,
    r0: f64,
    r1: f64,
    problem: SLProblem,
}

fn smooth_step(t: f64) -> (f64, f64) {
    // 1 for t ≤ 0, 0 for t ≥ 1, C^∞ in between; returns (value, derivative)
    if t <= 0.0 {
        return (1.0, 0.0);
    }
    if t >= 1.0 {
        return (0.0, 0.0);
    }
    let e = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let de = |s: f64| if s > 0.0 { (-1.0 / s).exp() / (s * s) } else { 0.0 };
    let (a, b) = (e(1.0 - t), e(t));
    let (da, db) = (-de(1.0 - t), de(t));
    let v = a / (a + b);
    let dv = (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
    (v, dv)
}

impl SolutionEval for Cutoff {
    fn state(&self, x: f64) -> Result<QuasiState> {
        let d = (x - self.at).abs();
        let (chi, dchi_dd) = smooth_step((d - self.r0) / (self.r1 - self.r0));
        if chi == 0.0 {
            return Ok(QuasiState::new(x, re(0.0), re(0.0)));
        }
        let s = self.inner.state(x)?;
        let dchi = dchi_dd / (self.r1 - self.r0) * (x - self.at).signum();
        let p = self.problem.p(x)?;
        Ok(QuasiState::new(x, s.y * chi, s.py * chi + s.y * (p * dchi)))
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_bases_are_normalized() {
        for &nu in &[0.0, 0.2, 0.5, 0.9] {
            BoundaryBasis::bessel_origin(nu).unwrap();
        }
        assert!(BoundaryBasis::bessel_origin(1.0).is_err());
    }

    #[test]
    fn regular_dictionary() {
        let p = SLProblem::regular_free(0.0, 1.0).unwrap();
        for e in [Endpoint::A, Endpoint::B] {
            let basis = BoundaryBasis::regular_free(&p, e).unwrap();
            let c = p.endpoint(e);
            let g = QuasiState::new(c, C::new(0.3, -0.2), C::new(1.5, 0.25));
            let phi = basis.phi().state(c).unwrap();
            let psi = basis.psi().state(c).unwrap();
            assert_eq!(super::super::bracket(&g, &phi).unwrap(), g.y);
            assert_eq!(super::super::bracket(&g, &psi).unwrap(), -g.py);
        }
    }

    #[test]
    fn cutoff_keeps_brackets() {
        let basis = BoundaryBasis::bessel_origin(0.4).unwrap();
        let p = SLProblem::bessel(0.4).unwrap();
        let cut = basis.with_cutoff(&p, 1.0, 2.0).unwrap();
        let x = 0.3;
        let (a, b) = (cut.psi().state(x).unwrap(), cut.phi().state(x).unwrap());
        assert!((super::super::bracket(&a, &b).unwrap() - re(1.0)).norm() < 1e-14);
        assert_eq!(cut.phi().state(2.5).unwrap().y, re(0.0));
        let mid = cut.phi().state(1.5).unwrap().y.re;
        assert!(mid > 0.0 && mid < 1.5f64.powf(0.9));
    }
}
