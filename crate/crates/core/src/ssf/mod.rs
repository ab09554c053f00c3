//! Spectral shift functions: Stieltjes inversion of boundary values of
//! Herglotz-type functions, traces computed from ξ, and jump detection.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{self, BesselParams};
use crate::error::{Error, Result};
use crate::extrap::richardson;
use crate::quad::{integrate, integrate_real, QuadConfig};
use crate::specialfn::arg_0_2pi;

type C = Complex64;

pub type BoundaryFn = Arc<dyn Fn(C) -> Result<C> + Send + Sync>;

/// A function of z off the real axis whose boundary values on ℝ carry ξ.
#[derive(Clone)]
pub struct HerglotzBoundary {
    description: String,
    m: BoundaryFn,
}

impl std::fmt::Debug for HerglotzBoundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HerglotzBoundary({})", self.description)
    }
}

impl HerglotzBoundary {
    pub fn new(description: impl Into<String>, m: BoundaryFn) -> Self {
        HerglotzBoundary { description: description.into(), m }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn eval(&self, z: C) -> Result<C> {
        (self.m)(z)
    }
}

/// ε_k = 10^{−k} for these k.
pub const EPS_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=8;

/// Accepted disagreement of the last two extrapolants, in units of ξ.
pub const INVERSION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inversion {
    pub value: f64,
    pub error: f64,
    /// (1/π) arg m(λ + iε_k), tracked continuously in k.
    pub trace: Vec<f64>,
    /// Sign of Im m on the samples; 0 if it was not constant.
    pub im_sign: f64,
}

/// (1/π) lim_{ε↓0} arg m(λ + iε) + normalization.
pub fn stieltjes_invert(m: &HerglotzBoundary, lambda: f64, normalization: f64) -> Result<f64> {
    Ok(stieltjes_invert_detailed(m, lambda, normalization)?.value)
}

pub fn stieltjes_invert_detailed(m: &HerglotzBoundary, lambda: f64, normalization: f64) -> Result<Inversion> {
    let mut args: Vec<f64> = Vec::new();
    let mut signs = Vec::new();
    for k in EPS_EXPONENTS {
        let v = m.eval(C::new(lambda, 10f64.powi(-k)))?;
        if !v.is_finite() {
            return Err(Error::Inversion { lambda, trace: args.iter().map(|a| a / PI).collect() });
        }
        signs.push(v.im.signum());
        let mut a = arg_0_2pi(v);
        if let Some(&prev) = args.last() {
            // stay on the branch continuous with the previous ε
            a += (((prev - a) / (2.0 * PI)).round()) * 2.0 * PI;
        }
        args.push(a);
    }
    let trace: Vec<f64> = args.iter().map(|a| a / PI).collect();
    let seq: Vec<C> = trace.iter().map(|&t| C::new(t, 0.0)).collect();
    let ex = richardson(&seq, 0.1, &[1.0, 2.0, 3.0]);
    if !(ex.error <= INVERSION_TOL) {
        return Err(Error::Inversion { lambda, trace });
    }
    let im_sign = if signs.iter().all(|s| *s == signs[0]) { signs[0] } else { 0.0 };
    Ok(Inversion { value: ex.value.re + normalization, error: ex.error, trace, im_sign })
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// weight·χ_{[lo, hi)}; `hi` may be +∞ (null in JSON).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub lo: f64,
    #[serde(with = "inf_as_null")]
    pub hi: f64,
    pub weight: f64,
}

impl Indicator {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lo && lambda < self.hi
    }
}

/// The part of ξ on (0, ∞) that is not piecewise constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum SmoothTerm {
    Zero,
    /// −(1/π) arctan(B sin(νπ)λ^ν/(A cot θ + B cos(νπ)λ^ν)).
    BesselArctan { nu: f64, theta: f64 },
    /// −(1/π) arctan(π/(2 cot θ − 2 ln 2 + 2γ + ln λ)).
    BesselLog { theta: f64 },
}

impl SmoothTerm {
    pub fn eval(&self, lambda: f64) -> f64 {
        if lambda < 0.0 {
            return 0.0;
        }
        match *self {
            SmoothTerm::Zero => 0.0,
            SmoothTerm::BesselArctan { nu, theta } => bessel::xi_right_limit(nu, theta, lambda),
            SmoothTerm::BesselLog { theta } => bessel::log_term(theta, lambda),
        }
    }

    /// Points in (0, ∞) where the term itself jumps by a branch switch of
    /// the arctangent.
    pub fn breakpoints(&self) -> Vec<f64> {
        let v = match *self {
            SmoothTerm::Zero => None,
            SmoothTerm::BesselArctan { nu, theta } => {
                let p = BesselParams { nu, theta };
                bessel::ssf_constants(&p).ok().and_then(|k| k.lambda_theta_nu)
            }
            SmoothTerm::BesselLog { theta } => {
                let p = BesselParams { nu: 0.0, theta };
                bessel::ssf_constants(&p).ok().and_then(|k| k.e_theta_0).map(|e| -e)
            }
        };
        v.into_iter().filter(|x| *x > 0.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SmoothTerm::Zero)
    }
}

/// ξ(λ) = Σ weight·χ_{[lo,hi)}(λ) + χ_{[0,∞)}(λ)·smooth(λ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralShiftFn {
    jumps: Vec<f64>,
    indicators: Vec<Indicator>,
    smooth: SmoothTerm,
    support_min: f64,
}

impl SpectralShiftFn {
    /// Builds ξ, locating its jumps and checking ∫|ξ|/(1+λ²) < ∞.
    pub fn new(indicators: Vec<Indicator>, smooth: SmoothTerm) -> Result<Self> {
        for ind in &indicators {
            if !(ind.lo.is_finite() && ind.lo < ind.hi) || !ind.weight.is_finite() {
                return Err(Error::Parameter(format!("bad indicator {ind:?}")));
            }
        }
        let mut support_min = indicators.iter().map(|i| i.lo).fold(f64::INFINITY, f64::min);
        if !smooth.is_zero() {
            support_min = support_min.min(0.0);
        }
        if !support_min.is_finite() {
            support_min = 0.0;
        }
        let mut xi = SpectralShiftFn { jumps: vec![], indicators, smooth, support_min };
        let mut candidates: Vec<f64> = vec![0.0];
        for ind in &xi.indicators {
            candidates.push(ind.lo);
            if ind.hi.is_finite() {
                candidates.push(ind.hi);
            }
        }
        candidates.extend(xi.smooth.breakpoints());
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        xi.jumps = candidates.into_iter().filter(|&p| xi.jump_at(p).abs() > 1e-6).collect();
        xi.weighted_l1()?;
        Ok(xi)
    }

    /// ξ(p+) − ξ(p−). The smooth term starts from 0 at λ = 0 and is
    /// otherwise continuous away from its own branch switches.
    fn jump_at(&self, p: f64) -> f64 {
        let right: f64 = self.indicators.iter().filter(|i| i.contains(p)).map(|i| i.weight).sum();
        let left: f64 = self.indicators.iter().filter(|i| i.lo < p && p <= i.hi).map(|i| i.weight).sum();
        let smooth = if p == 0.0 {
            self.smooth.eval(0.0)
        } else if p > 0.0 && self.smooth.breakpoints().contains(&p) {
            self.smooth.eval(p * (1.0 + 1e-10)) - self.smooth.eval(p * (1.0 - 1e-10))
        } else {
            0.0
        };
        right - left + smooth
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn indicators(&self) -> &[Indicator] {
        &self.indicators
    }

    pub fn smooth(&self) -> SmoothTerm {
        self.smooth
    }

    pub fn support_min(&self) -> f64 {
        self.support_min
    }

    /// ξ(λ); at jump points the right limit.
    pub fn evaluate(&self, lambda: f64) -> f64 {
        let mut v: f64 = self.indicators.iter().filter(|i| i.contains(lambda)).map(|i| i.weight).sum();
        if lambda >= 0.0 {
            v += self.smooth.eval(lambda);
        }
        v
    }

    /// ∫|ξ|(1+λ²)^{−1} dλ.
    pub fn weighted_l1(&self) -> Result<f64> {
        let cfg = QuadConfig { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 4000 };
        let mut total = 0.0;
        let mut cuts: Vec<f64> = self.jumps.clone();
        cuts.extend(self.smooth.breakpoints());
        cuts.push(self.support_min);
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        // on λ = tan t the weight becomes dt
        let ts: Vec<f64> = std::iter::once(-PI / 2.0)
            .chain(cuts.iter().map(|c| c.atan()))
            .chain(std::iter::once(PI / 2.0))
            .collect();
        for w in ts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let (v, _) = integrate_real(|t| self.evaluate(t.tan()).abs(), w[0], w[1], &cfg)?;
            total += v;
        }
        if !total.is_finite() {
            return Err(Error::Truncation { bound: total });
        }
        Ok(total)
    }
}

/// Truncation of the ln λ range used for the smooth term.
const T_RANGE: f64 = 40.0;
const TAIL_TOL: f64 = 1e-10;

/// ∫_0^∞ g(λ)·smooth(λ) dλ on the variable t = ln λ, split where the term
/// switches branch. `tail` bounds |g| for the pieces of (0, ∞) left out.
fn smooth_integral<G: Fn(f64) -> C>(xi: &SpectralShiftFn, g: G, tail: f64) -> Result<(C, f64)> {
    if xi.smooth.is_zero() {
        return Ok((C::new(0.0, 0.0), 0.0));
    }
    if tail > TAIL_TOL {
        return Err(Error::Truncation { bound: tail });
    }
    let mut ts: Vec<f64> = vec![-T_RANGE];
    ts.extend(xi.smooth.breakpoints().into_iter().map(f64::ln).filter(|t| t.abs() < T_RANGE));
    ts.push(T_RANGE);
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 };
    let mut total = C::new(0.0, 0.0);
    let mut err = tail;
    for w in ts.windows(2) {
        let r = integrate(
            |t: f64| {
                let l = t.exp();
                g(l) * (xi.smooth.eval(l) * l)
            },
            w[0],
            w[1],
            &cfg,
        )?;
        total += r.value;
        err += r.error;
    }
    Ok((total, err))
}

/// tr(R(z) − R_0(z)) = −∫ ξ(λ)/(λ − z)² dλ. Indicator terms are integrated
/// exactly.
pub fn trace_from_ssf(xi: &SpectralShiftFn, z: C) -> Result<C> {
    if z.im == 0.0 {
        return Err(Error::Domain(format!("z = {z} must be off the real axis")));
    }
    let mut total = C::new(0.0, 0.0);
    for ind in &xi.indicators {
        let upper = if ind.hi.is_finite() { (ind.hi - z).inv() } else { C::new(0.0, 0.0) };
        total += ((ind.lo - z).inv() - upper) * ind.weight;
    }
    // |smooth| ≤ 1/2 on the uncovered ends (0, e^{−T}) and (e^{T}, ∞)
    let tail = 0.5 * (-T_RANGE).exp() * (1.0 / (z.im * z.im) + 1.0);
    let (s, _) = smooth_integral(xi, |l| (l - z).powi(-2), tail)?;
    Ok(-(total + s))
}

/// Caller-supplied statement that f belongs to the admissible class:
/// two locally bounded derivatives and |(λ²f′(λ))′| ≤ C λ^{−1−ε} at
/// infinity. Recorded, not checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FClassAttestation {
    pub description: String,
    pub bound_constant: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FTrace {
    pub value: f64,
    pub error: f64,
    pub attestation: FClassAttestation,
}

/// tr(f(S) − f(S_0)) = ∫ f′(λ) ξ(λ) dλ.
pub fn f_trace_from_ssf<F: Fn(f64) -> f64>(
    xi: &SpectralShiftFn,
    f_prime: F,
    attestation: &FClassAttestation,
) -> Result<FTrace> {
    if !(attestation.epsilon > 0.0) || !attestation.bound_constant.is_finite() {
        return Err(Error::Parameter("attested decay bound must have ε > 0 and a finite constant".into()));
    }
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 };
    let mut total = 0.0;
    let mut err = 0.0;
    for ind in &xi.indicators {
        let (v, e) = if ind.hi.is_finite() {
            integrate_real(&f_prime, ind.lo, ind.hi, &cfg)?
        } else {
            integrate_real(|t: f64| f_prime(ind.lo + t.exp()) * t.exp(), -T_RANGE, T_RANGE, &cfg)?
        };
        total += ind.weight * v;
        err += ind.weight.abs() * e;
    }
    let (s, e) = smooth_integral(xi, |l| C::new(f_prime(l), 0.0), 0.0)?;
    Ok(FTrace { value: total + s.re, error: err + e, attestation: attestation.clone() })
}

/// ξ(λ₁ + δ) − ξ(λ₁ − δ); at an isolated eigenvalue of multiplicity k of S
/// (k₀ of S_0) this is k₀ − k.
pub fn detect_jump(xi: &SpectralShiftFn, lambda1: f64, delta: f64) -> f64 {
    xi.evaluate(lambda1 + delta) - xi.evaluate(lambda1 - delta)
}

/// ξ for the Bessel family recovered from boundary values of m_{θ,ν}, with
/// the additive constant fixed by vanishing far below the spectrum.
pub struct BesselInversion {
    m: HerglotzBoundary,
}

impl BesselInversion {
    pub fn new(params: &BesselParams) -> Result<Self> {
        let m = bessel::m_function(params)?;
        let floor = bessel::ssf_constants(params)?.eigenvalue().unwrap_or(0.0).min(0.0);
        let probe = 4.0 * floor - 10.0;
        let at_probe = stieltjes_invert(&m, probe, bessel::M_NORMALIZATION)?;
        if at_probe.abs() > 1e-6 {
            return Err(Error::Inversion { lambda: probe, trace: vec![at_probe] });
        }
        Ok(BesselInversion { m })
    }

    pub fn at(&self, lambda: f64) -> Result<f64> {
        stieltjes_invert(&self.m, lambda, bessel::M_NORMALIZATION)
    }

    pub fn boundary(&self) -> &HerglotzBoundary {
        &self.m
    }
}
