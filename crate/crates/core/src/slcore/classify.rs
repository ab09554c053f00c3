use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::problem::{Endpoint, SLProblem};
use super::state::QuasiState;
use super::trajectory::integrate;
use crate::error::Result;
use crate::ode::OdeConfig;
use crate::quad::{integrate_real, QuadConfig};
use crate::specialfn::SpectralPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeylClass {
    LimitCircle,
    LimitPoint,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointClass {
    pub endpoint: Endpoint,
    pub class: WeylClass,
    /// Window-to-window L² mass ratios, one list per test solution.
    pub evidence: Vec<Vec<f64>>,
    /// Set when integration stopped before a verdict.
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    pub ratio_threshold: f64,
    pub violations_for_divergence: usize,
    pub run_for_convergence: usize,
    pub max_windows_finite: usize,
    pub max_windows_infinite: usize,
    /// Leading windows toward a finite endpoint whose ratios are not judged,
    /// since solutions there are not yet in their endpoint regime.
    pub burn_in: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            ratio_threshold: 0.9,
            violations_for_divergence: 3,
            run_for_convergence: 8,
            max_windows_finite: 40,
            max_windows_infinite: 11,
            burn_in: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tail {
    Converges,
    Diverges,
    Unknown,
}

/// Weyl classification at an endpoint from the L² tail behaviour of two
/// independent solutions at z = i over geometric windows.
pub fn classify_endpoint(problem: &SLProblem, endpoint: Endpoint) -> EndpointClass {
    classify_endpoint_with(problem, endpoint, &ClassifyConfig::default())
}

pub fn classify_endpoint_with(problem: &SLProblem, endpoint: Endpoint, cfg: &ClassifyConfig) -> EndpointClass {
    let (a, b) = (problem.a(), problem.b());
    let x0 = match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    };
    let at = problem.endpoint(endpoint);
    let boundaries: Vec<f64> = if at.is_finite() {
        (0..=cfg.max_windows_finite).map(|k| at + (x0 - at) * 0.5f64.powi(k as i32)).collect()
    } else {
        let sign = if endpoint == Endpoint::B { 1.0 } else { -1.0 };
        (0..=cfg.max_windows_infinite).map(|k| x0 + sign * (2f64.powi(k as i32) - 1.0)).collect()
    };
    let mut evidence = Vec::new();
    let mut tails = Vec::new();
    let mut note = None;
    for start in [(1.0, 0.0), (0.0, 1.0)] {
        let burn_in = if at.is_finite() { cfg.burn_in } else { 0 };
        let (tail, ratios, failure) = test_solution(problem, &boundaries, start, burn_in, cfg);
        if failure.is_some() && note.is_none() {
            note = failure;
        }
        evidence.push(ratios);
        tails.push(tail);
    }
    let class = if tails.contains(&Tail::Diverges) {
        WeylClass::LimitPoint
    } else if tails.iter().all(|t| *t == Tail::Converges) {
        WeylClass::LimitCircle
    } else {
        WeylClass::Inconclusive
    };
    EndpointClass { endpoint, class, evidence, note }
}

fn test_solution(
    problem: &SLProblem,
    boundaries: &[f64],
    start: (f64, f64),
    burn_in: usize,
    cfg: &ClassifyConfig,
) -> (Tail, Vec<f64>, Option<String>) {
    let z = SpectralPoint::from_parts(0.0, 1.0);
    let ode = OdeConfig::default();
    let quad = QuadConfig { abs_tol: 0.0, rel_tol: 1e-8, max_intervals: 400 };
    let mut state = QuasiState::real(boundaries[0], start.0, start.1);
    let mut masses: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let mut bad = 0;
    let mut good = 0;
    for w in boundaries.windows(2) {
        let step = || -> Result<(f64, QuasiState)> {
            let t = integrate(problem, z, state, w[1], &ode)?;
            let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
            let (m, _) = integrate_real(
                |x| {
                    let y: Complex64 = t.eval(x).map(|s| s.y).unwrap_or(Complex64::new(f64::NAN, 0.0));
                    y.norm_sqr() * problem.r(x).unwrap_or(f64::NAN)
                },
                lo,
                hi,
                &quad,
            )?;
            Ok((m, t.eval(w[1])?))
        };
        let (m, next) = match step() {
            Ok(v) => v,
            Err(e) => return (Tail::Unknown, ratios, Some(e.to_string())),
        };
        if !m.is_finite() {
            return (Tail::Unknown, ratios, Some("non-finite window mass".into()));
        }
        state = next;
        if let Some(&prev) = masses.last() {
            let ratio = m / prev;
            ratios.push(ratio);
            if ratios.len() <= burn_in {
                masses.push(m);
                continue;
            }
            if ratio < cfg.ratio_threshold {
                good += 1;
                bad = 0;
            } else {
                bad += 1;
                good = 0;
            }
            if bad >= cfg.violations_for_divergence {
                return (Tail::Diverges, ratios, None);
            }
            if good >= cfg.run_for_convergence {
                return (Tail::Converges, ratios, None);
            }
        }
        masses.push(m);
    }
    (Tail::Unknown, ratios, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_table() {
        for &nu in &[0.0, 0.3, 0.5, 0.9] {
            let p = SLProblem::bessel(nu).unwrap();
            assert_eq!(classify_endpoint(&p, Endpoint::A).class, WeylClass::LimitCircle, "nu = {nu}");
        }
        for &nu in &[1.0, 1.5] {
            let p = SLProblem::bessel(nu).unwrap();
            assert_eq!(classify_endpoint(&p, Endpoint::A).class, WeylClass::LimitPoint, "nu = {nu}");
        }
        for &nu in &[0.0, 0.5, 1.5] {
            let p = SLProblem::bessel(nu).unwrap();
            assert_eq!(classify_endpoint(&p, Endpoint::B).class, WeylClass::LimitPoint, "nu = {nu}");
        }
    }

    #[test]
    fn regular_endpoints_are_limit_circle() {
        let p = SLProblem::regular_free(0.0, 1.0).unwrap();
        assert_eq!(classify_endpoint(&p, Endpoint::A).class, WeylClass::LimitCircle);
        assert_eq!(classify_endpoint(&p, Endpoint::B).class, WeylClass::LimitCircle);
    }
}
