use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::BoundaryBasis;
use super::problem::{Endpoint, SLProblem};
use super::state::{bracket_scale, raw_bracket};
use super::trajectory::{integrate_span, SolutionEval, Trajectory};
use crate::error::{Error, Result};
use crate::extrap::wynn_epsilon;
use crate::ode::OdeConfig;
use crate::specialfn::SpectralPoint;

type C = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct LimitConfig {
    /// Number of points x_k = e ± d·2^{−k}.
    pub levels: usize,
    /// Farthest sample point; by default chosen so the nearest sample sits
    /// at the edge of the common domain.
    pub start: Option<f64>,
    pub rel_tol: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig { levels: 13, start: None, rel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: C,
    pub error: f64,
    /// Size of the bracket's constituent products at the farthest sample.
    pub scale: f64,
}

fn sample_points(lo: f64, hi: f64, at: f64, endpoint: Endpoint, cfg: &LimitConfig) -> Result<Vec<f64>> {
    let n = cfg.levels.max(3);
    let span = 2f64.powi(n as i32 - 1);
    if !at.is_finite() {
        // geometric growth toward an infinite endpoint
        let s = match endpoint {
            Endpoint::B => cfg.start.unwrap_or(lo.max(1.0)),
            Endpoint::A => cfg.start.unwrap_or(hi.min(-1.0)),
        };
        let pts: Vec<f64> = (0..n).map(|k| s * 2f64.powi(k as i32)).collect();
        if pts.iter().any(|&x| x < lo || x > hi) {
            return Err(Error::Domain("samples toward the infinite endpoint leave the domain".into()));
        }
        return Ok(pts);
    }
    let (near, far) = match endpoint {
        Endpoint::A => (lo - at, hi - at),
        Endpoint::B => (at - hi, at - lo),
    };
    if near < 0.0 || far <= 0.0 {
        return Err(Error::Domain(format!("domain [{lo}, {hi}] does not approach {at}")));
    }
    let d0 = match cfg.start {
        Some(s) => (s - at).abs(),
        None if near > 0.0 => (near * span).min(0.5 * far),
        None => (0.25 * far).min(1.0),
    };
    let sign = if endpoint == Endpoint::A { 1.0 } else { -1.0 };
    let pts: Vec<f64> = (0..n).map(|k| at + sign * d0 / 2f64.powi(k as i32)).collect();
    if pts.iter().any(|&x| x < lo || x > hi) {
        return Err(Error::Domain(format!(
            "bracket samples [{}, {}] leave the domain [{lo}, {hi}]",
            pts[n - 1].min(pts[0]),
            pts[n - 1].max(pts[0])
        )));
    }
    Ok(pts)
}

/// Extrapolated value of lim [f, g](x) as x approaches the endpoint `at`.
///
/// Brackets are sampled on a geometric sequence toward the endpoint and the
/// limit is accelerated with Wynn's epsilon algorithm.
pub fn bracket_limit(
    f: &dyn SolutionEval,
    g: &dyn SolutionEval,
    at: f64,
    endpoint: Endpoint,
    cfg: &LimitConfig,
) -> Result<LimitEstimate> {
    let est = bracket_limit_estimate(f, g, at, endpoint, cfg)?;
    if !(est.error <= cfg.rel_tol * est.scale.max(est.value.norm())) {
        return Err(Error::LimitDivergence { value: est.value, estimate: est.error });
    }
    Ok(est)
}

/// As [`bracket_limit`], returning the estimate without judging it.
pub fn bracket_limit_estimate(
    f: &dyn SolutionEval,
    g: &dyn SolutionEval,
    at: f64,
    endpoint: Endpoint,
    cfg: &LimitConfig,
) -> Result<LimitEstimate> {
    let (fl, fh) = f.domain();
    let (gl, gh) = g.domain();
    let (lo, hi) = (fl.max(gl), fh.min(gh));
    let pts = sample_points(lo, hi, at, endpoint, cfg)?;
    let mut seq = Vec::with_capacity(pts.len());
    let mut scale = 0.0;
    for (k, &x) in pts.iter().enumerate() {
        let (sf, sg) = (f.state(x)?, g.state(x)?);
        if k == 0 {
            scale = bracket_scale(&sf, &sg);
        }
        seq.push(raw_bracket(&sf, &sg));
    }
    let ex = wynn_epsilon(&seq);
    Ok(LimitEstimate { value: ex.value, error: ex.error, scale })
}

/// Where the two-solution construction integrates.
#[derive(Debug, Clone, Copy)]
pub struct IcConfig {
    /// Interior point where the two independent solutions start.
    pub x_ref: f64,
    pub lo: f64,
    pub hi: f64,
    pub ode: OdeConfig,
    pub limit: LimitConfig,
    pub max_condition: f64,
}

impl IcConfig {
    /// Defaults per problem family: the Bessel family works on [1e−6, 10]
    /// with reference point 1, regular problems on the closed interval.
    pub fn for_problem(problem: &SLProblem) -> Self {
        let ode = OdeConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..OdeConfig::default() };
        let limit = LimitConfig { rel_tol: 1e-8, ..LimitConfig::default() };
        let (a, b) = (problem.a(), problem.b());
        let lo = if problem.regular_at(Endpoint::A) { a } else if a.is_finite() { a + 1e-6 } else { -10.0 };
        let hi = if problem.regular_at(Endpoint::B) { b } else if b.is_finite() { b - 1e-6 } else { 10.0 };
        let x_ref = if a.is_finite() && !b.is_finite() {
            (a + 1.0).min(hi)
        } else if !a.is_finite() && b.is_finite() {
            (b - 1.0).max(lo)
        } else {
            0.5 * (lo + hi)
        };
        IcConfig { x_ref, lo, hi, ode, limit, max_condition: 1e12 }
    }
}

/// Solves τu = z u with prescribed endpoint brackets [u, φ] = c_phi and
/// [u, ψ] = c_psi: two independent solutions are integrated from `x_ref`,
/// their endpoint brackets measured, and the 2×2 system solved.
pub fn solve_with_bracket_ic(
    problem: &SLProblem,
    z: SpectralPoint,
    basis: &BoundaryBasis,
    c_phi: C,
    c_psi: C,
    cfg: &IcConfig,
) -> Result<Trajectory> {
    let x = cfg.x_ref;
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let y1 = integrate_span(problem, z, super::QuasiState::new(x, one, zero), cfg.lo, cfg.hi, &cfg.ode)?;
    let y2 = integrate_span(problem, z, super::QuasiState::new(x, zero, one), cfg.lo, cfg.hi, &cfg.ode)?;
    let at = problem.endpoint(basis.endpoint());
    let e = basis.endpoint();
    let m11 = bracket_limit(&y1, basis.phi().as_ref(), at, e, &cfg.limit)?.value;
    let m12 = bracket_limit(&y2, basis.phi().as_ref(), at, e, &cfg.limit)?.value;
    let m21 = bracket_limit(&y1, basis.psi().as_ref(), at, e, &cfg.limit)?.value;
    let m22 = bracket_limit(&y2, basis.psi().as_ref(), at, e, &cfg.limit)?.value;
    let det = m11 * m22 - m12 * m21;
    let norm = (m11.norm_sqr() + m12.norm_sqr() + m21.norm_sqr() + m22.norm_sqr()).sqrt();
    let condition = norm * norm / det.norm();
    if !(condition <= cfg.max_condition) {
        return Err(Error::Construction { condition });
    }
    let c1 = (m22 * c_phi - m12 * c_psi) / det;
    let c2 = (m11 * c_psi - m21 * c_phi) / det;
    integrate_span(problem, z, super::QuasiState::new(x, c1, c2), cfg.lo, cfg.hi, &cfg.ode)
}
