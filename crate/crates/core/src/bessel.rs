//! The Bessel family τ_ν = −d²/dx² + (ν² − 1/4)/x² on (0, ∞) for ν ∈ [0, 1):
//! closed-form solutions, Krein scalars, traces, spectral shift functions
//! and eigenvalues of the extensions T_θ.
//!
//! θ = 0 is the Friedrichs extension. For ν ∈ (0, 1) the boundary basis at 0
//! is φ = x^{1/2+ν}, ψ = x^{1/2−ν}/(2ν); for ν = 0 it is φ = x^{1/2},
//! ψ = −x^{1/2} ln x.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krein::{DefectBrackets, DefectSolutions, Setting};
use crate::quad::{integrate_to_infinity, integrate_toward_edge, QuadConfig, QuadResult};
use crate::slcore::{closed_form, BoundaryBasis, SLProblem, Solution};
use crate::specialfn::{
    bessel_j, bessel_j_derivative, bessel_y, complex_log, complex_pow, gamma_real, hankel1, hankel1_derivative,
    SpectralPoint, EULER_GAMMA,
};
use crate::ssf::{HerglotzBoundary, Indicator, SmoothTerm, SpectralShiftFn};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselParams {
    pub nu: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselRegime {
    NuPositive,
    NuZero,
}

impl BesselParams {
    pub fn new(nu: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&nu) {
            return Err(Error::Regime(format!(
                "nu = {nu}: extensions exist only for nu in [0, 1)"
            )));
        }
        if !(0.0..PI).contains(&theta) {
            return Err(Error::Parameter(format!("theta = {theta} must lie in [0, π)")));
        }
        Ok(BesselParams { nu, theta })
    }

    pub fn regime(&self) -> BesselRegime {
        if self.nu == 0.0 {
            BesselRegime::NuZero
        } else {
            BesselRegime::NuPositive
        }
    }

    pub fn problem(&self) -> Result<SLProblem> {
        SLProblem::bessel(self.nu)
    }

    pub fn basis(&self) -> Result<BoundaryBasis> {
        BoundaryBasis::bessel_origin(self.nu)
    }

    /// cot θ, exactly 0 at θ = π/2.
    pub fn cot_theta(&self) -> f64 {
        cot(self.theta)
    }

    fn require_extension(&self) -> Result<()> {
        if self.theta == 0.0 {
            return Err(Error::Parameter("theta = 0 is the reference (Friedrichs) extension".into()));
        }
        Ok(())
    }
}

fn cot(theta: f64) -> f64 {
    if theta == FRAC_PI_2 {
        0.0
    } else {
        theta.cos() / theta.sin()
    }
}

fn check_order(nu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::Regime(format!("nu = {nu} outside [0, 1)")));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    Ok(())
}

fn off_spectrum(z: SpectralPoint) -> Result<()> {
    if z.on_nonnegative_axis() {
        return Err(Error::SpectralPoint { z: z.value(), reason: "z lies on [0, ∞)".into() });
    }
    Ok(())
}

fn nonzero(z: SpectralPoint) -> Result<()> {
    if z.is_zero() {
        return Err(Error::Domain("z = 0".into()));
    }
    Ok(())
}

/// (x^{1/2}F(kx), d/dx[x^{1/2}F(kx)]) from F(kx) and F′(kx).
fn sqrt_x_times(x: f64, k: C, f: C, df: C) -> (C, C) {
    let sx = x.sqrt();
    (f * sx, f * (0.5 / sx) + df * k * sx)
}

fn log_shift(z: SpectralPoint) -> Result<C> {
    // ln(z^{1/2}/2) + γ; arg z^{1/2} ∈ [0, π) so the principal log agrees
    Ok(complex_log(SpectralPoint::new(z.sqrt() * 0.5))? + EULER_GAMMA)
}

/// (s, s′) with s_{z,ν} the solution in the domain of the Friedrichs
/// extension, normalized by [s, φ](0) = 0, [s, ψ](0) = 1.
pub fn s_state(nu: f64, z: SpectralPoint, x: f64) -> Result<(C, C)> {
    check_order(nu)?;
    nonzero(z)?;
    check_x(x)?;
    let k = z.sqrt();
    let (j, dj) = (bessel_j(nu, k * x)?, bessel_j_derivative(nu, k * x)?);
    let (y, dy) = sqrt_x_times(x, k, j, dj);
    let pre = if nu == 0.0 {
        C::new(-1.0, 0.0)
    } else {
        -complex_pow(z, -0.5 * nu)? * (2f64.powf(nu) * gamma_real(1.0 + nu)?)
    };
    Ok((pre * y, pre * dy))
}

/// (c, c′) with [c, φ](0) = 1, [c, ψ](0) = 0.
pub fn c_state(nu: f64, z: SpectralPoint, x: f64) -> Result<(C, C)> {
    check_order(nu)?;
    nonzero(z)?;
    check_x(x)?;
    let k = z.sqrt();
    if nu == 0.0 {
        let (j, dj) = (bessel_j(0.0, k * x)?, -bessel_j(1.0, k * x)?);
        let (y0, dy0) = (bessel_y(0.0, k * x)?, -bessel_y(1.0, k * x)?);
        let (sj, dsj) = sqrt_x_times(x, k, j, dj);
        let (sy, dsy) = sqrt_x_times(x, k, y0, dy0);
        let l = log_shift(z)?;
        return Ok((sy * (-FRAC_PI_2) + sj * l, dsy * (-FRAC_PI_2) + dsj * l));
    }
    let (j, dj) = (bessel_j(-nu, k * x)?, bessel_j_derivative(-nu, k * x)?);
    let (y, dy) = sqrt_x_times(x, k, j, dj);
    let pre = complex_pow(z, 0.5 * nu)? * (gamma_real(1.0 - nu)? / (2f64.powf(nu + 1.0) * nu));
    Ok((pre * y, pre * dy))
}

/// ϖ_ν(z) = iΓ(1−ν) sin(νπ) z^{ν/2}/(2^{ν+1}ν), or iπ/2 for ν = 0.
pub fn hankel_prefactor(nu: f64, z: SpectralPoint) -> Result<C> {
    check_order(nu)?;
    if nu == 0.0 {
        return Ok(I * FRAC_PI_2);
    }
    Ok(I * complex_pow(z, 0.5 * nu)? * (gamma_real(1.0 - nu)? * (nu * PI).sin() / (2f64.powf(nu + 1.0) * nu)))
}

/// (w, w′) with w_{z,ν} = ϖ_ν(z) x^{1/2} H_ν^{(1)}(z^{1/2}x), square
/// integrable at ∞ and normalized by [w, φ](0) = 1.
pub fn w_state(nu: f64, z: SpectralPoint, x: f64) -> Result<(C, C)> {
    check_order(nu)?;
    off_spectrum(z)?;
    check_x(x)?;
    let k = z.sqrt();
    let (h, dh) = (hankel1(nu, k * x)?, hankel1_derivative(nu, k * x)?);
    let (y, dy) = sqrt_x_times(x, k, h, dh);
    let pre = hankel_prefactor(nu, z)?;
    Ok((pre * y, pre * dy))
}

pub fn solution_s(params: &BesselParams, z: SpectralPoint, x: f64) -> Result<C> {
    Ok(s_state(params.nu, z, x)?.0)
}

pub fn solution_c(params: &BesselParams, z: SpectralPoint, x: f64) -> Result<C> {
    Ok(c_state(params.nu, z, x)?.0)
}

pub fn solution_w(params: &BesselParams, z: SpectralPoint, x: f64) -> Result<C> {
    Ok(w_state(params.nu, z, x)?.0)
}

pub fn s_solution(nu: f64, z: SpectralPoint) -> Result<Solution> {
    check_order(nu)?;
    nonzero(z)?;
    Ok(closed_form((0.0, f64::INFINITY), move |x| s_state(nu, z, x)))
}

pub fn c_solution(nu: f64, z: SpectralPoint) -> Result<Solution> {
    check_order(nu)?;
    nonzero(z)?;
    Ok(closed_form((0.0, f64::INFINITY), move |x| c_state(nu, z, x)))
}

pub fn w_solution(nu: f64, z: SpectralPoint) -> Result<Solution> {
    check_order(nu)?;
    off_spectrum(z)?;
    Ok(closed_form((0.0, f64::INFINITY), move |x| w_state(nu, z, x)))
}

/// [w_z, ψ](0): the coefficient of s in w = c + [w, ψ](0)·s.
pub fn w_psi_bracket(nu: f64, z: SpectralPoint) -> Result<C> {
    check_order(nu)?;
    off_spectrum(z)?;
    if nu == 0.0 {
        return Ok(log_shift(z)? - I * FRAC_PI_2);
    }
    let c = gamma_real(1.0 - nu)? / (gamma_real(1.0 + nu)? * 2f64.powf(2.0 * nu + 1.0) * nu);
    Ok(C::from_polar(1.0, -nu * PI) * complex_pow(z, nu)? * c)
}

/// k_θ(z) = cot θ + [w_z, ψ](0).
pub fn k_theta(params: &BesselParams, z: SpectralPoint) -> Result<C> {
    params.require_extension()?;
    Ok(w_psi_bracket(params.nu, z)? + params.cot_theta())
}

/// ⟨w_{z̄}, w_z⟩ = ∫_0^∞ w_z² dx in closed form.
pub fn inner_product_w(nu: f64, z: SpectralPoint) -> Result<C> {
    check_order(nu)?;
    off_spectrum(z)?;
    if nu == 0.0 {
        return Ok(-(z.value() * 2.0).inv());
    }
    let c = gamma_real(1.0 - nu)? / (gamma_real(nu)? * 2f64.powf(2.0 * nu + 1.0) * nu);
    Ok(-C::from_polar(1.0, -nu * PI) * complex_pow(z, nu)? / z.value() * c)
}

/// ∫_0^∞ w_z² dx by direct quadrature of ϖ²·x·[H_ν^{(1)}(z^{1/2}x)]².
pub fn inner_product_w_quadrature(nu: f64, z: SpectralPoint, cfg: &QuadConfig) -> Result<QuadResult> {
    check_order(nu)?;
    off_spectrum(z)?;
    let k = z.sqrt();
    let pre = hankel_prefactor(nu, z)?;
    let f = |x: f64| -> C {
        match hankel1(nu, k * x) {
            Ok(h) => pre * pre * h * h * x,
            Err(_) => C::new(f64::NAN, f64::NAN),
        }
    };
    let split = (1.0 / k.norm()).min(1.0);
    let near = integrate_toward_edge(f, split, 0.0, 0.0, cfg)?;
    let far = integrate_to_infinity(f, split, split, cfg)?;
    Ok(QuadResult { value: near.value + far.value, error: near.error + far.error })
}

/// tr(R_θ(z) − R_0(z)) = ⟨w_{z̄}, w_z⟩ / k_θ(z).
pub fn trace_diff(params: &BesselParams, z: SpectralPoint) -> Result<C> {
    let k = k_theta(params, z)?;
    let ip = inner_product_w(params.nu, z)?;
    let scale = params.cot_theta().abs() + w_psi_bracket(params.nu, z)?.norm();
    if k.norm() <= 1e-14 * scale {
        return Err(Error::SpectralPoint { z: z.value(), reason: format!("z is an eigenvalue of T_θ (k = {k})") });
    }
    Ok(ip / k)
}

/// Closed-form defect solutions u = s, w and their brackets, with
/// [w_z, u_{z̄}] = −1.
pub fn bessel_defect(nu: f64, z: SpectralPoint) -> Result<DefectSolutions> {
    let problem = SLProblem::bessel(nu)?;
    let basis = BoundaryBasis::bessel_origin(nu)?;
    let brackets = DefectBrackets { psi_a: vec![w_psi_bracket(nu, z)?], psi_b: vec![], green: C::new(-1.0, 0.0) };
    DefectSolutions::with_brackets(
        &problem,
        Setting::OneLc { basis },
        z,
        vec![s_solution(nu, z)?],
        Some(w_solution(nu, z)?),
        brackets,
    )
}

/// A = Γ(1+ν)2^{2ν+1}ν and B = Γ(1−ν), the two constants in k_θ.
fn ab(nu: f64) -> Result<(f64, f64)> {
    Ok((gamma_real(1.0 + nu)? * 2f64.powf(2.0 * nu + 1.0) * nu, gamma_real(1.0 - nu)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SSFConstants {
    /// The negative eigenvalue of T_θ for ν ∈ (0, 1).
    pub e_theta_nu: Option<f64>,
    /// Where the denominator of Ξ changes sign.
    pub lambda_theta_nu: Option<f64>,
    /// The negative eigenvalue of T_θ for ν = 0.
    pub e_theta_0: Option<f64>,
    pub gamma_const: f64,
}

impl SSFConstants {
    pub fn eigenvalue(&self) -> Option<f64> {
        self.e_theta_nu.or(self.e_theta_0)
    }
}

/// Which of the five parameter regions (θ, ν) falls into for ν > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SsfCase {
    /// θ ≤ π/2, ν ≤ 1/2 except (π/2, 1/2).
    I,
    /// θ ≤ π/2, ν > 1/2.
    II,
    /// θ > π/2, ν < 1/2.
    III,
    /// θ > π/2, ν ≥ 1/2.
    IV,
    /// θ = π/2, ν = 1/2.
    V,
    /// ν = 0.
    Log,
}

pub fn ssf_case(params: &BesselParams) -> Result<SsfCase> {
    params.require_extension()?;
    let (nu, th) = (params.nu, params.theta);
    Ok(if nu == 0.0 {
        SsfCase::Log
    } else if th == FRAC_PI_2 && nu == 0.5 {
        SsfCase::V
    } else if th <= FRAC_PI_2 {
        if nu <= 0.5 {
            SsfCase::I
        } else {
            SsfCase::II
        }
    } else if nu < 0.5 {
        SsfCase::III
    } else {
        SsfCase::IV
    })
}

pub fn ssf_constants(params: &BesselParams) -> Result<SSFConstants> {
    let case = ssf_case(params)?;
    let cot = params.cot_theta();
    let mut out = SSFConstants { e_theta_nu: None, lambda_theta_nu: None, e_theta_0: None, gamma_const: EULER_GAMMA };
    if case == SsfCase::Log {
        out.e_theta_0 = Some(-4.0 * (-2.0 * (cot + EULER_GAMMA)).exp());
        return Ok(out);
    }
    let nu = params.nu;
    let (a, b) = ab(nu)?;
    if params.theta > FRAC_PI_2 {
        out.e_theta_nu = Some(-(a * cot.abs() / b).powf(1.0 / nu));
    }
    if matches!(case, SsfCase::II | SsfCase::III) {
        let l = (a * cot.abs() / (b * (nu * PI).cos().abs())).powf(1.0 / nu);
        if l > 0.0 {
            out.lambda_theta_nu = Some(l);
        }
    }
    Ok(out)
}

/// Ξ_{θ,ν}(λ) for λ ≥ 0, taken literally: 0 where its denominator vanishes.
pub fn xi_term(params: &BesselParams, lambda: f64) -> Result<f64> {
    let nu = params.nu;
    check_order(nu)?;
    let (a, b) = ab(nu)?;
    let lp = lambda.abs().powf(nu);
    let den = a * params.cot_theta() + b * (nu * PI).cos() * lp;
    let scale = a * params.cot_theta().abs() + b * lp;
    if den.abs() <= 1e-13 * scale || scale == 0.0 {
        return Ok(0.0);
    }
    Ok(-(b * (nu * PI).sin() * lp / den).atan() / PI)
}

/// Ξ_{θ,ν}(λ) with right limits at the points where its denominator
/// vanishes.
pub(crate) fn xi_right_limit(nu: f64, theta: f64, lambda: f64) -> f64 {
    let (a, b) = ab(nu).expect("order checked by the caller");
    let c = cot(theta);
    let (cs, sn) = ((nu * PI).cos(), (nu * PI).sin());
    let lp = lambda.abs().powf(nu);
    let scale = a * c.abs() + b * lp;
    if scale == 0.0 {
        // λ = 0 with cot θ = 0: the ratio is the constant tan νπ
        return -(sn / cs).atan() / PI;
    }
    let den = a * c + b * cs * lp;
    if den.abs() <= 1e-13 * scale {
        return -0.5 * cs.signum();
    }
    -(b * sn * lp / den).atan() / PI
}

/// −(1/π) arctan(π/(2 cot θ − 2 ln 2 + 2γ + ln λ)) for λ > 0, right limits
/// at the pole.
pub(crate) fn log_term(theta: f64, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let den = 2.0 * cot(theta) - 2.0 * 2f64.ln() + 2.0 * EULER_GAMMA + lambda.ln();
    if den.abs() <= 1e-13 * (1.0 + lambda.ln().abs()) {
        return -0.5;
    }
    -(PI / den).atan() / PI
}

/// The spectral shift function ξ(·; T_θ, T_0) as indicator terms plus a
/// smooth term on (0, ∞).
pub fn spectral_shift(params: &BesselParams) -> Result<SpectralShiftFn> {
    let case = ssf_case(params)?;
    let k = ssf_constants(params)?;
    let (nu, theta) = (params.nu, params.theta);
    let arctan = SmoothTerm::BesselArctan { nu, theta };
    let ind = |lo: f64, hi: f64, weight: f64| Indicator { lo, hi, weight };
    let (indicators, smooth) = match case {
        SsfCase::V => (vec![ind(0.0, f64::INFINITY, -0.5)], SmoothTerm::Zero),
        SsfCase::I => (vec![], arctan),
        SsfCase::II => (vec![ind(k.lambda_theta_nu.unwrap_or(0.0), f64::INFINITY, -1.0)], arctan),
        SsfCase::III => {
            let e = k.e_theta_nu.expect("θ > π/2 has an eigenvalue");
            (vec![ind(e, k.lambda_theta_nu.unwrap_or(0.0), -1.0)], arctan)
        }
        SsfCase::IV => {
            let e = k.e_theta_nu.expect("θ > π/2 has an eigenvalue");
            (vec![ind(e, f64::INFINITY, -1.0)], arctan)
        }
        SsfCase::Log => {
            let e = k.e_theta_0.expect("ν = 0 has an eigenvalue");
            (vec![ind(e, -e, -1.0)], SmoothTerm::BesselLog { theta })
        }
    };
    SpectralShiftFn::new(indicators, smooth)
}

/// ξ(λ; T_θ, T_0), with right limits at jump points.
pub fn ssf_evaluate(params: &BesselParams, lambda: f64) -> Result<f64> {
    Ok(spectral_shift(params)?.evaluate(lambda))
}

/// m_{θ,ν}(z) = A cot θ + Γ(1−ν)e^{−iνπ}z^ν, or for ν = 0
/// 2 cot θ − 2 ln 2 + ln z + 2γ − iπ. Both have negative imaginary part in
/// the upper half plane and ξ = (1/π) arg m(λ + i0) − 2.
pub fn m_function(params: &BesselParams) -> Result<HerglotzBoundary> {
    params.require_extension()?;
    let (nu, c) = (params.nu, params.cot_theta());
    if nu == 0.0 {
        let shift = 2.0 * c - 2.0 * 2f64.ln() + 2.0 * EULER_GAMMA;
        return Ok(HerglotzBoundary::new(
            format!("bessel m-function, nu = 0, theta = {}", params.theta),
            Arc::new(move |z: C| Ok(complex_log(SpectralPoint::new(z))? + shift - I * PI)),
        ));
    }
    let (a, b) = ab(nu)?;
    let rot = C::from_polar(b, -nu * PI);
    Ok(HerglotzBoundary::new(
        format!("bessel m-function, nu = {nu}, theta = {}", params.theta),
        Arc::new(move |z: C| Ok(rot * complex_pow(SpectralPoint::new(z), nu)? + a * c)),
    ))
}

/// The additive constant turning (1/π) arg m into ξ for the Bessel
/// m-functions.
pub const M_NORMALIZATION: f64 = -2.0;

/// tr(f(T_{π/2}) − f(T_0)) = (f(0) − f(∞))/2 at ν = 1/2.
pub fn dirichlet_neumann_trace(f0: f64, finf: f64) -> f64 {
    0.5 * (f0 - finf)
}

/// Eigenvalues of T_θ below 0 as real roots of k_θ, found by bisection on a
/// bracketing interval. The Bessel k_θ is monotone in λ < 0.
pub fn negative_eigenvalue_by_root(params: &BesselParams) -> Result<Option<f64>> {
    params.require_extension()?;
    let f = |l: f64| -> Result<f64> { Ok(k_theta(params, SpectralPoint::from_parts(l, 0.0))?.re) };
    // k_θ(λ) for λ < 0 is real and increases toward +∞ as λ → −∞
    let mut hi = -1e-12f64;
    let mut lo = -1.0;
    if f(hi)? >= 0.0 {
        return Ok(None);
    }
    let mut steps = 0;
    while f(lo)? < 0.0 {
        lo *= 4.0;
        steps += 1;
        if steps > 200 {
            return Err(Error::Convergence("no sign change of k_θ on (−∞, 0)".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo).abs() <= 1e-15 * lo.abs() {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::{defect_solutions, krein_scalar_one_lc, DefectConfig};
    use crate::slcore::bracket;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn zp(re: f64, im: f64) -> SpectralPoint {
        SpectralPoint::from_parts(re, im)
    }

    fn p(nu: f64, theta: f64) -> BesselParams {
        BesselParams::new(nu, theta).unwrap()
    }

    #[test]
    fn half_order_closed_forms() {
        let z = zp(-1.5, 0.7);
        let k = z.sqrt();
        for x in [0.1, 1.0, 3.7] {
            let s = s_state(0.5, z, x).unwrap().0;
            let c = c_state(0.5, z, x).unwrap().0;
            let w = w_state(0.5, z, x).unwrap().0;
            assert!((s + (k * x).sin() / k).norm() < 1e-12);
            assert!((c - (k * x).cos()).norm() < 1e-12);
            assert!((w - (I * k * x).exp()).norm() < 1e-12);
        }
        let km = k_theta(&p(0.5, 1.0), z).unwrap();
        assert!((km - (cot(1.0) - I * k)).norm() < 1e-13);
    }

    #[test]
    fn ode_residual_and_wronskians() {
        // −y″ + (ν²−1/4)y/x² = z y via central differences of y′
        for nu in [0.0, 0.3, 0.75] {
            let z = zp(-0.4, 1.3);
            for state in [s_state, c_state] {
                for x in [0.05, 0.9, 7.5] {
                    let h = 1e-5 * x;
                    let d2 = (state(nu, z, x + h).unwrap().1 - state(nu, z, x - h).unwrap().1) / (2.0 * h);
                    let y = state(nu, z, x).unwrap().0;
                    let res = -d2 + y * ((nu * nu - 0.25) / (x * x)) - z.value() * y;
                    assert!(res.norm() < 1e-6 * (1.0 + y.norm() / (x * x)), "nu {nu} x {x}: {res}");
                }
            }
        }
    }

    #[test]
    fn normalizations_at_origin() {
        for nu in [0.0, 0.2, 0.5, 0.8] {
            let z = zp(-2.0, 0.5);
            let basis = BoundaryBasis::bessel_origin(nu).unwrap();
            let x = 1e-7;
            let st = |f: (C, C)| crate::slcore::QuasiState::new(x, f.0, f.1);
            let phi = basis.phi().state(x).unwrap();
            let psi = basis.psi().state(x).unwrap();
            let s = st(s_state(nu, z, x).unwrap());
            let c = st(c_state(nu, z, x).unwrap());
            let w = st(w_state(nu, z, x).unwrap());
            // the next series terms contribute O(x^{2−2ν}) to the brackets
            let tol = 1e-4 + 10.0 * x.powf(2.0 - 2.0 * nu) * z.norm();
            assert!(bracket(&s, &phi).unwrap().norm() < tol);
            assert!((bracket(&s, &psi).unwrap() - 1.0).norm() < tol);
            assert!((bracket(&c, &phi).unwrap() - 1.0).norm() < tol);
            assert!(bracket(&c, &psi).unwrap().norm() < tol, "nu {nu}");
            assert!((bracket(&w, &phi).unwrap() - 1.0).norm() < tol);
            // w = c + [w, ψ] s
            let x = 0.8;
            let m = w_psi_bracket(nu, z).unwrap();
            let lhs = w_state(nu, z, x).unwrap().0;
            let rhs = c_state(nu, z, x).unwrap().0 + m * s_state(nu, z, x).unwrap().0;
            assert!((lhs - rhs).norm() < 1e-11 * lhs.norm(), "nu {nu}");
        }
    }

    #[test]
    fn documented_values() {
        let v = trace_diff(&p(0.5, FRAC_PI_4), zp(-2.0, 0.0)).unwrap();
        let exact = 1.0 / (2.0 * SQRT_2 * (1.0 + SQRT_2));
        assert!((v.re - exact).abs() < 1e-13 && v.im.abs() < 1e-13);
        let k = k_theta(&p(0.0, FRAC_PI_2), zp(-1.0, 0.0)).unwrap();
        assert!((k.re - (EULER_GAMMA - 2f64.ln())).abs() < 1e-14 && k.im.abs() < 1e-14);
        let t = trace_diff(&p(0.0, FRAC_PI_2), zp(-1.0, 0.0)).unwrap();
        assert!((t.re + 4.31287).abs() < 1e-4);
        let ip = inner_product_w(0.5, zp(-2.0, 0.0)).unwrap();
        assert!((ip.re - 1.0 / (2.0 * SQRT_2)).abs() < 1e-13);
        assert!((inner_product_w(0.0, zp(-1.0, 0.0)).unwrap().re - 0.5).abs() < 1e-15);
        let e0 = ssf_constants(&p(0.0, FRAC_PI_2)).unwrap().e_theta_0.unwrap();
        // −4e^{−2γ} evaluated independently in double precision
        assert!((e0 + 1.260_947_006_748_773_6).abs() < 1e-12);
        let e = ssf_constants(&p(0.5, 3.0 * FRAC_PI_4)).unwrap().e_theta_nu.unwrap();
        assert!((e + 1.0).abs() < 1e-12);
        assert!(matches!(
            k_theta(&p(0.5, 0.0), zp(-1.0, 0.0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(BesselParams::new(1.0, 0.5), Err(Error::Regime(_))));
        assert!(matches!(solution_w(&p(0.3, 0.5), zp(2.0, 0.0), 1.0), Err(Error::SpectralPoint { .. })));
    }

    #[test]
    fn eigenvalue_is_root_of_scalar() {
        for (nu, th) in [(0.3, 2.0), (0.5, 3.0 * FRAC_PI_4), (0.8, 2.5), (0.0, 1.0), (0.0, 2.6)] {
            let prm = p(nu, th);
            let e = ssf_constants(&prm).unwrap().eigenvalue().unwrap();
            let k = k_theta(&prm, zp(e, 0.0)).unwrap();
            assert!(k.norm() < 1e-12, "({nu}, {th}): {k}");
            let root = negative_eigenvalue_by_root(&prm).unwrap().unwrap();
            assert!((root - e).abs() < 1e-10 * e.abs());
        }
        assert!(ssf_constants(&p(0.3, 1.0)).unwrap().eigenvalue().is_none());
        assert!(negative_eigenvalue_by_root(&p(0.7, 1.0)).unwrap().is_none());
    }

    #[test]
    fn ssf_documented_values() {
        assert_eq!(ssf_evaluate(&p(0.5, FRAC_PI_2), 3.0).unwrap(), -0.5);
        assert_eq!(ssf_evaluate(&p(0.5, FRAC_PI_2), 0.0).unwrap(), -0.5);
        for nu in [0.1, 0.3, 0.45] {
            assert!((ssf_evaluate(&p(nu, FRAC_PI_2), 2.0).unwrap() + nu).abs() < 1e-14);
        }
        for (nu, th) in [(0.3, 1.0), (0.7, 0.5), (0.3, 2.0), (0.7, 2.5), (0.5, FRAC_PI_2), (0.0, 1.0)] {
            let prm = p(nu, th);
            let below = ssf_constants(&prm).unwrap().eigenvalue().unwrap_or(0.0).min(0.0) - 1e-3;
            assert_eq!(ssf_evaluate(&prm, below).unwrap(), 0.0);
            assert_eq!(ssf_evaluate(&prm, below * 100.0 - 5.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn ssf_jump_at_eigenvalue_only() {
        for (nu, th) in [(0.3, 2.0), (0.5, 2.4), (0.8, 2.2), (0.0, 1.3)] {
            let prm = p(nu, th);
            let xi = spectral_shift(&prm).unwrap();
            let e = ssf_constants(&prm).unwrap().eigenvalue().unwrap();
            let d = 1e-9 * e.abs();
            let jump = ssf_evaluate(&prm, e - d).unwrap() - ssf_evaluate(&prm, e + d).unwrap();
            assert!((jump - 1.0).abs() < 1e-6, "({nu}, {th}) jump {jump}");
            assert_eq!(xi.jumps(), &[e]);
        }
        // continuous where the arctan branch and the indicator switch together
        for (nu, th) in [(0.3, 2.0), (0.7, 1.0)] {
            let prm = p(nu, th);
            let l = ssf_constants(&prm).unwrap().lambda_theta_nu.unwrap();
            let d = 1e-9 * l;
            let gap = ssf_evaluate(&prm, l + d).unwrap() - ssf_evaluate(&prm, l - d).unwrap();
            assert!(gap.abs() < 1e-6, "({nu}, {th}) gap {gap}");
            let at = ssf_evaluate(&prm, l).unwrap();
            assert!((at - ssf_evaluate(&prm, l + d).unwrap()).abs() < 1e-6);
        }
        let prm = p(0.0, 1.3);
        let e = ssf_constants(&prm).unwrap().e_theta_0.unwrap();
        let gap = ssf_evaluate(&prm, -e * (1.0 + 1e-10)).unwrap() - ssf_evaluate(&prm, -e * (1.0 - 1e-10)).unwrap();
        assert!(gap.abs() < 1e-6);
    }

    #[test]
    fn ssf_continuous_in_order() {
        let th = 1.1;
        for lambda in [0.3, 2.0, 40.0] {
            let mut prev = ssf_evaluate(&p(0.01, th), lambda).unwrap();
            let mut nu = 0.01;
            while nu < 0.99 {
                nu += 0.001;
                if (nu - 0.5f64).abs() < 1e-6 {
                    continue;
                }
                let v = ssf_evaluate(&p(nu, th), lambda).unwrap();
                assert!((v - prev).abs() < 0.02, "λ {lambda} ν {nu}: {prev} → {v}");
                prev = v;
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_inner_product() {
        let cfg = QuadConfig::default();
        for nu in [0.0, 0.25, 0.9] {
            for z in [zp(-1.0, 0.0), zp(0.0, 1.0), zp(-1.0, 2.0)] {
                let q = inner_product_w_quadrature(nu, z, &cfg).unwrap().value;
                let e = inner_product_w(nu, z).unwrap();
                assert!((q - e).norm() < 1e-6 * e.norm(), "nu {nu} z {}: {q} vs {e}", z.value());
            }
        }
    }

    #[test]
    fn agrees_with_numerical_krein_construction() {
        for (nu, th, z) in [(0.5, 1.0, zp(-1.0, 0.5)), (0.3, 2.0, zp(-0.5, 1.0)), (0.0, 0.8, zp(-2.0, 0.3))] {
            let prm = p(nu, th);
            let problem = prm.problem().unwrap();
            let setting = Setting::OneLc { basis: prm.basis().unwrap() };
            let cfg = DefectConfig::for_problem(&problem);
            let numeric = defect_solutions(&problem, &setting, z, &cfg).unwrap();
            let kn = match krein_scalar_one_lc(th, &numeric).unwrap().form() {
                crate::krein::CorrectionForm::Scalar { k } => k,
                _ => unreachable!(),
            };
            let kc = k_theta(&prm, z).unwrap();
            assert!((kn - kc).norm() < 1e-7 * kc.norm(), "({nu}, {th}): {kn} vs {kc}");
            let w = numeric.w().unwrap().state(1.3).unwrap().y;
            let wc = w_state(nu, z, 1.3).unwrap().0;
            assert!((w - wc).norm() < 1e-7 * wc.norm(), "({nu}, {th}): w {w} vs {wc}");
        }
    }
}
