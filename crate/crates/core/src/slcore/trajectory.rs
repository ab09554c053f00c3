use std::sync::Arc;

use num_complex::Complex64;

use super::problem::SLProblem;
use super::state::QuasiState;
use crate::error::{Error, Result};
use crate::ode::{dopri5, DenseSolution, OdeConfig, State};
use crate::specialfn::SpectralPoint;

type C = Complex64;

/// Anything that yields (y, p y′) on an interval: integrated trajectories,
/// closed forms, and combinations of them.
pub trait SolutionEval: Send + Sync {
    fn state(&self, x: f64) -> Result<QuasiState>;
    /// Closed interval on which `state` may be called.
    fn domain(&self) -> (f64, f64);
}

pub type Solution = Arc<dyn SolutionEval>;

/// A numerical solution of τy = z y with dense output.
#[derive(Clone)]
pub struct Trajectory {
    problem: SLProblem,
    z: SpectralPoint,
    pieces: Vec<Arc<DenseSolution>>,
}

impl std::fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (lo, hi) = self.domain();
        write!(f, "Trajectory(z = {}, [{lo}, {hi}])", self.z.value())
    }
}

fn rhs(problem: &SLProblem, z: C) -> impl Fn(f64, &State) -> Result<State> + '_ {
    move |x, s| {
        let p = problem.p(x)?;
        let pot = problem.q(x)? - z * problem.r(x)?;
        Ok([s[1] / p, pot * s[0]])
    }
}

/// Integrates from `from` to `to` with the first-order system
/// y′ = (p y′)/p, (p y′)′ = (q − z r) y.
pub fn integrate(problem: &SLProblem, z: SpectralPoint, from: QuasiState, to: f64, cfg: &OdeConfig) -> Result<Trajectory> {
    integrate_span(problem, z, from, from.x.min(to), from.x.max(to), cfg)
}

/// Integrates from `from` outward in both directions to cover [lo, hi].
pub fn integrate_span(
    problem: &SLProblem,
    z: SpectralPoint,
    from: QuasiState,
    lo: f64,
    hi: f64,
    cfg: &OdeConfig,
) -> Result<Trajectory> {
    for x in [from.x, lo, hi] {
        if !problem.contains(x) {
            return Err(Error::Domain(format!("x = {x} outside ({}, {})", problem.a(), problem.b())));
        }
    }
    if !(lo <= from.x && from.x <= hi) || lo == hi {
        return Err(Error::Usage(format!("start {} not inside [{lo}, {hi}]", from.x)));
    }
    let f = rhs(problem, z.value());
    let y0 = [from.y, from.py];
    let mut pieces = Vec::new();
    if lo < from.x {
        pieces.push(Arc::new(dopri5(&f, from.x, y0, lo, cfg)?));
    }
    if hi > from.x {
        pieces.push(Arc::new(dopri5(&f, from.x, y0, hi, cfg)?));
    }
    Ok(Trajectory { problem: problem.clone(), z, pieces })
}

impl Trajectory {
    pub fn z(&self) -> SpectralPoint {
        self.z
    }

    pub fn problem(&self) -> &SLProblem {
        &self.problem
    }

    pub fn eval(&self, x: f64) -> Result<QuasiState> {
        for piece in &self.pieces {
            if let Some(s) = piece.eval(x) {
                return Ok(QuasiState::new(x, s[0], s[1]));
            }
        }
        let (lo, hi) = self.domain();
        Err(Error::Domain(format!("x = {x} outside trajectory range [{lo}, {hi}]")))
    }

    /// Accepted integration nodes in increasing x.
    pub fn samples(&self) -> Vec<QuasiState> {
        let mut out: Vec<QuasiState> = Vec::new();
        for piece in &self.pieces {
            for (x, s) in piece.nodes().iter().zip(piece.values()) {
                if out.last().is_none_or(|l| *x > l.x) {
                    out.push(QuasiState::new(*x, s[0], s[1]));
                }
            }
        }
        out
    }
}

impl SolutionEval for Trajectory {
    fn state(&self, x: f64) -> Result<QuasiState> {
        self.eval(x)
    }

    fn domain(&self) -> (f64, f64) {
        let lo = self.pieces.iter().map(|p| p.x_min()).fold(f64::INFINITY, f64::min);
        let hi = self.pieces.iter().map(|p| p.x_max()).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// A solution given by a closure returning (y, p y′).
pub struct ClosedForm<F> {
    f: F,
    domain: (f64, f64),
}

impl<F> ClosedForm<F>
where
    F: Fn(f64) -> Result<(C, C)> + Send + Sync,
{
    pub fn new(domain: (f64, f64), f: F) -> Self {
        ClosedForm { f, domain }
    }
}

impl<F> SolutionEval for ClosedForm<F>
where
    F: Fn(f64) -> Result<(C, C)> + Send + Sync,
{
    fn state(&self, x: f64) -> Result<QuasiState> {
        let (y, py) = (self.f)(x)?;
        Ok(QuasiState::new(x, y, py))
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

pub fn closed_form<F>(domain: (f64, f64), f: F) -> Solution
where
    F: Fn(f64) -> Result<(C, C)> + Send + Sync + 'static,
{
    Arc::new(ClosedForm::new(domain, f))
}

/// Σ c_j f_j.
pub struct Combination {
    terms: Vec<(C, Solution)>,
}

impl Combination {
    pub fn new(terms: Vec<(C, Solution)>) -> Self {
        Combination { terms }
    }
}

impl SolutionEval for Combination {
    fn state(&self, x: f64) -> Result<QuasiState> {
        let mut out = QuasiState::new(x, C::new(0.0, 0.0), C::new(0.0, 0.0));
        for (c, f) in &self.terms {
            let s = f.state(x)?;
            out.y += *c * s.y;
            out.py += *c * s.py;
        }
        Ok(out)
    }

    fn domain(&self) -> (f64, f64) {
        self.terms.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), (_, f)| {
            let (l, h) = f.domain();
            (lo.max(l), hi.min(h))
        })
    }
}

pub fn combination(terms: Vec<(C, Solution)>) -> Solution {
    Arc::new(Combination::new(terms))
}

/// Pointwise complex conjugate; for real coefficients this maps a solution
/// at z to one at z̄.
pub struct Conjugate(pub Solution);

impl SolutionEval for Conjugate {
    fn state(&self, x: f64) -> Result<QuasiState> {
        Ok(self.0.state(x)?.conj())
    }

    fn domain(&self) -> (f64, f64) {
        self.0.domain()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::{bessel_j, bessel_j_derivative, gamma_real};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn constant_solution() {
        let p = SLProblem::regular_free(0.0, 3.0).unwrap();
        let t = integrate(&p, SpectralPoint::from_parts(0.0, 0.0), QuasiState::real(1.0, 1.0, 0.0), 2.0, &OdeConfig::default()).unwrap();
        let s = t.eval(2.0).unwrap();
        assert!((s.y - c(1.0, 0.0)).norm() < 1e-14 && s.py.norm() < 1e-14);
    }

    #[test]
    fn decaying_exponential() {
        let p = SLProblem::bessel(0.5).unwrap();
        let e = (-1.0f64).exp();
        let t = integrate(&p, SpectralPoint::from_parts(-1.0, 0.0), QuasiState::real(1.0, e, -e), 3.0, &OdeConfig::default()).unwrap();
        let y = t.eval(3.0).unwrap().y;
        assert!((y.re - (-3.0f64).exp()).abs() < 1e-10 * (-3.0f64).exp());
        for s in t.samples() {
            let v = t.eval(s.x).unwrap();
            assert_eq!(v.y, s.y);
        }
    }

    #[test]
    fn bessel_from_series_start() {
        // s = −2^ν Γ(1+ν) z^{−ν/2} x^{1/2} J_ν(z^{1/2} x) at z = 1
        let nu = 0.3;
        let pref = -(2f64.powf(nu)) * gamma_real(1.0 + nu).unwrap();
        let s = |x: f64| {
            let zeta = c(x, 0.0);
            let j = bessel_j(nu, zeta).unwrap();
            let dj = bessel_j_derivative(nu, zeta).unwrap();
            (pref * x.sqrt() * j, pref * (0.5 / x.sqrt() * j + x.sqrt() * dj))
        };
        let x0 = 1e-4;
        let (y0, py0) = s(x0);
        let p = SLProblem::bessel(nu).unwrap();
        let cfg = OdeConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..OdeConfig::default() };
        let t = integrate(&p, SpectralPoint::from_parts(1.0, 0.0), QuasiState::new(x0, y0, py0), 1.0, &cfg).unwrap();
        let got = t.eval(1.0).unwrap().y;
        assert!((got - s(1.0).0).norm() < 1e-8 * s(1.0).0.norm());
    }

    #[test]
    fn brackets_of_solutions_are_constant() {
        let p = SLProblem::bessel(0.3).unwrap();
        let z = SpectralPoint::from_parts(-1.0, 0.7);
        let cfg = OdeConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..OdeConfig::default() };
        let f = integrate_span(&p, z, QuasiState::real(1.0, 1.0, 0.0), 0.01, 10.0, &cfg).unwrap();
        let g = integrate_span(&p, z.conj(), QuasiState::new(1.0, c(0.3, 1.0), c(-1.0, 0.2)), 0.01, 10.0, &cfg).unwrap();
        let reference = super::super::state::bracket(&f.eval(1.0).unwrap(), &g.eval(1.0).unwrap()).unwrap();
        for &x in &[0.01, 0.1, 0.5, 2.0, 7.0, 10.0] {
            let b = super::super::state::bracket(&f.eval(x).unwrap(), &g.eval(x).unwrap()).unwrap();
            let scale = super::super::state::bracket_scale(&f.eval(x).unwrap(), &g.eval(x).unwrap());
            assert!((b - reference).norm() <= 1e-9 * scale.max(reference.norm()), "x = {x}");
        }
    }
}
