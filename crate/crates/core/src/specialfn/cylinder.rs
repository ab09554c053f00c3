//! Bessel functions J_ν, Y_ν and the Hankel function H_ν^{(1)} of real order
//! and complex argument, on the principal branch. For Im ζ ≥ 0 the principal
//! branch coincides with the arg ∈ [0, 2π) convention, and every argument of
//! the form z^{1/2}·x with x > 0 lies there.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{recip_gamma, EULER_GAMMA};
use crate::error::{Error, Result};

/// Below this modulus the power series is used, above it the Hankel
/// asymptotic expansion.
pub const CROSSOVER_RADIUS: f64 = 12.0;

const SERIES_CAP: usize = 200;
const SERIES_REL: f64 = 1e-18;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn is_integer(nu: f64) -> bool {
    nu == nu.round()
}

fn check_order(nu: f64) -> Result<()> {
    if !nu.is_finite() || nu.abs() >= 3.0 {
        return Err(Error::Domain(format!("order {nu} outside the supported range")));
    }
    Ok(())
}

fn check_arg(zeta: C) -> Result<()> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {zeta}")));
    }
    Ok(())
}

/// Σ_k (−ζ²/4)^k / (k! Γ(k+ν+1)) without the (ζ/2)^ν prefactor.
fn j_series_sum(nu: f64, zeta: C) -> Result<C> {
    let x = -zeta * zeta / 4.0;
    let mut term = c(recip_gamma(nu + 1.0), 0.0);
    let mut sum = term;
    for k in 1..SERIES_CAP {
        let kf = k as f64;
        term = term * x / (kf * (kf + nu));
        sum += term;
        if term.norm() <= SERIES_REL * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::Accuracy {
        achieved: term.norm() / sum.norm(),
        context: format!("J series for nu = {nu}, zeta = {zeta}"),
    })
}

fn j_series(nu: f64, zeta: C) -> Result<C> {
    if is_integer(nu) && nu < 0.0 {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(j_series(n, zeta)? * sign);
    }
    if zeta.norm() == 0.0 {
        return if nu == 0.0 {
            Ok(c(1.0, 0.0))
        } else if nu > 0.0 {
            Ok(c(0.0, 0.0))
        } else {
            Err(Error::Domain(format!("J_{nu} is singular at 0")))
        };
    }
    let prefactor = (nu * (zeta / 2.0).ln()).exp();
    Ok(prefactor * j_series_sum(nu, zeta)?)
}

/// Σ_k i^k a_k(ν) ζ^{−k} for H^{(1)} (sign = +1) or H^{(2)} (sign = −1).
fn hankel_tail(nu: f64, zeta: C, sign: f64) -> Result<C> {
    let mu = 4.0 * nu * nu;
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..SERIES_CAP {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term = term * c(0.0, sign) * (mu - odd * odd) / (8.0 * kf * zeta);
        let size = term.norm();
        if size == 0.0 || size <= SERIES_REL * sum.norm() {
            return Ok(sum + term);
        }
        if size > last {
            // divergent tail: the smallest term bounds the error
            if last <= 1e-10 * sum.norm() {
                return Ok(sum);
            }
            return Err(Error::Accuracy {
                achieved: last / sum.norm(),
                context: format!("Hankel expansion for nu = {nu}, zeta = {zeta}"),
            });
        }
        sum += term;
        last = size;
    }
    Ok(sum)
}

fn h1_expansion(nu: f64, zeta: C) -> Result<C> {
    let omega = zeta - c(nu * PI / 2.0 + PI / 4.0, 0.0);
    let amp = (c(2.0 / PI, 0.0) / zeta).sqrt();
    Ok(amp * (c(0.0, 1.0) * omega).exp() * hankel_tail(nu, zeta, 1.0)?)
}

fn h2_expansion(nu: f64, zeta: C) -> Result<C> {
    let omega = zeta - c(nu * PI / 2.0 + PI / 4.0, 0.0);
    let amp = (c(2.0 / PI, 0.0) / zeta).sqrt();
    Ok(amp * (c(0.0, -1.0) * omega).exp() * hankel_tail(nu, zeta, -1.0)?)
}

fn j_large(nu: f64, zeta: C) -> Result<C> {
    if zeta.re >= 0.0 {
        return Ok((h1_expansion(nu, zeta)? + h2_expansion(nu, zeta)?) / 2.0);
    }
    // J_ν(ζ' e^{±iπ}) = e^{±iνπ} J_ν(ζ')
    let s = if zeta.im >= 0.0 { 1.0 } else { -1.0 };
    Ok(c(0.0, s * nu * PI).exp() * j_large(nu, -zeta)?)
}

fn h1_large(nu: f64, zeta: C) -> Result<C> {
    if zeta.im >= 0.0 || zeta.re >= 0.0 {
        return h1_expansion(nu, zeta);
    }
    // third quadrant: ζ = ζ' e^{−iπ} with ζ' in the first quadrant
    let zp = -zeta;
    Ok(2.0 * (nu * PI).cos() * h1_expansion(nu, zp)?
        + c(0.0, -nu * PI).exp() * h2_expansion(nu, zp)?)
}

fn digamma_int(m: usize) -> f64 {
    // ψ(m) for integer m ≥ 1
    -EULER_GAMMA + (1..m).map(|k| 1.0 / k as f64).sum::<f64>()
}

/// Y_n for integer n ≥ 0 by the logarithmic series.
fn y_integer_series(n: usize, zeta: C) -> Result<C> {
    let half = zeta / 2.0;
    let x = half * half;
    let mut finite = c(0.0, 0.0);
    if n > 0 {
        let mut fact_k = 1.0;
        for k in 0..n {
            if k > 0 {
                fact_k *= k as f64;
            }
            let fact_rest: f64 = (1..(n - k)).map(|j| j as f64).product();
            finite += x.powu(k as u32) * (fact_rest / fact_k);
        }
        finite = -finite * half.powi(-(n as i32)) / PI;
    }
    let log_term = (2.0 / PI) * half.ln() * j_series(n as f64, zeta)?;
    let nx = -x;
    let n_fact: f64 = (1..=n).map(|j| j as f64).product();
    let mut term = c(1.0 / n_fact, 0.0);
    let mut sum = term * (digamma_int(1) + digamma_int(n + 1));
    let mut converged = false;
    for k in 1..SERIES_CAP {
        let kf = k as f64;
        term = term * nx / (kf * (kf + n as f64));
        let piece = term * (digamma_int(k + 1) + digamma_int(n + k + 1));
        sum += piece;
        if piece.norm() <= SERIES_REL * sum.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy {
            achieved: term.norm(),
            context: format!("Y_{n} series at {zeta}"),
        });
    }
    let tail = -half.powu(n as u32) * sum / PI;
    Ok(finite + log_term + tail)
}

/// K_ν(w) = ∫_0^∞ e^{−w cosh t} cosh(νt) dt for Re w > 0, by the trapezoid
/// rule, which converges geometrically for this analytic integrand.
fn k_integral(nu: f64, w: C) -> Result<C> {
    let f = |t: f64| (-w * t.cosh()).exp() * (nu * t).cosh();
    let decay = w.re;
    // e^{−Re w cosh T} below 1e−20 of the t = 0 value
    let t_max = (46.0 / decay + 1.0).acosh() + 1.0;
    let mut h = 0.5;
    let mut n = (t_max / h).ceil() as usize;
    let mut total = f(0.0) / 2.0 + (1..=n).map(|j| f(j as f64 * h)).sum::<C>();
    let mut estimate = total * h;
    for _ in 0..10 {
        let odd: C = (0..n).map(|j| f((2 * j + 1) as f64 * h / 2.0)).sum();
        total += odd;
        h /= 2.0;
        n *= 2;
        let next = total * h;
        if (next - estimate).norm() <= 1e-15 * next.norm() {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::Accuracy {
        achieved: 1e-15,
        context: format!("K integral for nu = {nu}, w = {w}"),
    })
}

fn use_k_integral(zeta: C) -> bool {
    zeta.im > 1.5 && zeta.arg() >= PI / 6.0 && zeta.arg() <= 5.0 * PI / 6.0
}

fn h1_principal(nu: f64, zeta: C) -> Result<C> {
    if nu < 0.0 {
        // H^{(1)}_{−μ} = e^{iμπ} H^{(1)}_μ
        return Ok(c(0.0, -nu * PI).exp() * h1_principal(-nu, zeta)?);
    }
    if zeta.norm() == 0.0 {
        return Err(Error::Domain("Hankel function is singular at 0".into()));
    }
    if zeta.norm() > CROSSOVER_RADIUS {
        return h1_large(nu, zeta);
    }
    if use_k_integral(zeta) {
        let w = c(0.0, -1.0) * zeta;
        return Ok(c(0.0, -2.0 / PI) * c(0.0, -nu * PI / 2.0).exp() * k_integral(nu, w)?);
    }
    if is_integer(nu) {
        let j = j_series(nu, zeta)?;
        return Ok(j + c(0.0, 1.0) * y_integer(nu as usize, zeta)?);
    }
    let s = (nu * PI).sin();
    let jp = j_series(nu, zeta)?;
    let jm = j_series(-nu, zeta)?;
    Ok(c(0.0, 1.0 / s) * (c(0.0, -nu * PI).exp() * jp - jm))
}

fn y_integer(n: usize, zeta: C) -> Result<C> {
    if n <= 1 {
        return y_integer_series(n, zeta);
    }
    let mut prev = y_integer_series(0, zeta)?;
    let mut cur = y_integer_series(1, zeta)?;
    for m in 1..n {
        let next = cur * (2.0 * m as f64) / zeta - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// J_ν(ζ).
pub fn bessel_j(nu: f64, zeta: C) -> Result<C> {
    check_order(nu)?;
    check_arg(zeta)?;
    if zeta.norm() > CROSSOVER_RADIUS {
        j_large(nu, zeta)
    } else {
        j_series(nu, zeta)
    }
}

/// Y_ν(ζ); integer orders use the logarithmic series.
pub fn bessel_y(nu: f64, zeta: C) -> Result<C> {
    check_order(nu)?;
    check_arg(zeta)?;
    if zeta.norm() == 0.0 {
        return Err(Error::Domain("Y is singular at 0".into()));
    }
    if zeta.norm() <= CROSSOVER_RADIUS && !use_k_integral(zeta) {
        if is_integer(nu) {
            let n = nu.abs() as usize;
            let sign = if nu < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            return Ok(y_integer(n, zeta)? * sign);
        }
        let s = (nu * PI).sin();
        return Ok(
            (j_series(nu, zeta)? * (nu * PI).cos() - j_series(-nu, zeta)?) / s,
        );
    }
    let h = h1_principal(nu, zeta)?;
    let j = bessel_j(nu, zeta)?;
    Ok((h - j) / c(0.0, 1.0))
}

/// H_ν^{(1)}(ζ) = J_ν(ζ) + i Y_ν(ζ).
pub fn hankel1(nu: f64, zeta: C) -> Result<C> {
    check_order(nu)?;
    check_arg(zeta)?;
    h1_principal(nu, zeta)
}

/// dJ_ν/dζ = J_{ν−1} − (ν/ζ) J_ν.
pub fn bessel_j_derivative(nu: f64, zeta: C) -> Result<C> {
    if zeta.norm() == 0.0 {
        return match nu {
            n if n == 1.0 => Ok(c(0.5, 0.0)),
            n if n == 0.0 || n > 1.0 => Ok(c(0.0, 0.0)),
            _ => Err(Error::Domain(format!("J'_{nu} is singular at 0"))),
        };
    }
    Ok(bessel_j(nu - 1.0, zeta)? - bessel_j(nu, zeta)? * nu / zeta)
}

/// dH_ν^{(1)}/dζ = H_{ν−1}^{(1)} − (ν/ζ) H_ν^{(1)}.
pub fn hankel1_derivative(nu: f64, zeta: C) -> Result<C> {
    Ok(hankel1(nu - 1.0, zeta)? - hankel1(nu, zeta)? * nu / zeta)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use complex_bessel::{besselj as cb_j, bessely as cb_y, hankel1 as cb_h1};

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn elementary_values() {
        assert_eq!(bessel_j(0.0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let v = bessel_j(0.5, c(PI / 2.0, 0.0)).unwrap();
        assert!(rel(v, c(2.0 / PI, 0.0)) < 1e-14);
        for &x in &[0.3, 2.0, 7.5, 15.0, 40.0] {
            let expected = c(0.0, -1.0) * (2.0 / (PI * x)).sqrt() * c(0.0, x).exp();
            let h = hankel1(0.5, c(x, 0.0)).unwrap();
            assert!(rel(h, expected) < 1e-13, "x = {x}: {h} vs {expected}");
        }
        // leading term of the series
        let z = c(1e-6, 0.0);
        let lead = (z / 2.0).powf(0.3) * recip_gamma(1.3);
        assert!(rel(bessel_j(0.3, z).unwrap(), lead) < 1e-11);
    }

    #[test]
    fn h0_log_singularity() {
        let z = c(1e-8, 0.0);
        let h = hankel1(0.0, z).unwrap();
        let lead = c(0.0, 2.0 / PI) * z.ln();
        assert!((h - lead).norm() < 1.5);
    }

    fn sample_points() -> Vec<C> {
        let mut pts = Vec::new();
        for &r in &[0.05, 0.7, 2.5, 6.0, 11.0, 13.5, 25.0, 60.0] {
            for &t in &[0.0, 0.3, 0.8, 1.3, 1.5707963, 2.0, 2.6, 3.0] {
                pts.push(C::from_polar(r, t));
            }
        }
        pts
    }

    #[test]
    fn agrees_with_reference_library() {
        for &nu in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0, 1.25, 1.9, -0.3, -0.75] {
            for z in sample_points() {
                let scale_j = cb_j(nu, z).unwrap().norm() + cb_y(nu, z).unwrap().norm();
                let j = bessel_j(nu, z).unwrap();
                assert!(
                    (j - cb_j(nu, z).unwrap()).norm() <= 1e-10 * scale_j,
                    "J nu={nu} z={z}: {j} vs {}",
                    cb_j(nu, z).unwrap()
                );
                let h_ref = cb_h1(nu, z).unwrap();
                let h = hankel1(nu, z).unwrap();
                // the J_{±ν} combination cancels where H is small next to J
                let scale_h = h_ref.norm() + 1e-2 * bessel_j(nu, z).unwrap().norm();
                assert!(
                    (h - h_ref).norm() <= 1e-10 * scale_h,
                    "H nu={nu} z={z}: {h} vs {h_ref}"
                );
            }
        }
    }

    #[test]
    fn series_and_asymptotic_overlap() {
        for &nu in &[0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5] {
            for &r in &[11.0, 12.0, 13.0] {
                for k in 0..9 {
                    let z = C::from_polar(r, k as f64 * PI / 8.0 * 0.999);
                    let envelope = h1_expansion(nu, z).unwrap().norm()
                        + j_large(nu, z).unwrap().norm();
                    let js = j_series(nu, z).unwrap();
                    let ja = j_large(nu, z).unwrap();
                    assert!((js - ja).norm() <= 1e-9 * envelope, "nu={nu} z={z}");
                    if !is_integer(nu) {
                        let s = (nu * PI).sin();
                        let hs = c(0.0, 1.0 / s)
                            * (c(0.0, -nu * PI).exp() * js - j_series(-nu, z).unwrap());
                        let ha = h1_large(nu, z).unwrap();
                        let scale = ha.norm() + js.norm();
                        assert!((hs - ha).norm() <= 1e-9 * scale, "H nu={nu} z={z}");
                    }
                }
            }
        }
    }

    #[test]
    fn wronskian_of_j_pair() {
        for k in 1..10 {
            let nu = 0.1 * k as f64;
            for &t in &[0.0, 0.4, 0.9, 1.4, 2.2, 2.9] {
                for &r in &[0.2, 1.0, 4.0, 9.0, 16.0] {
                    let z = C::from_polar(r, t);
                    let w = bessel_j(nu, z).unwrap() * bessel_j_derivative(-nu, z).unwrap()
                        - bessel_j(-nu, z).unwrap() * bessel_j_derivative(nu, z).unwrap();
                    let expected = -2.0 * (nu * PI).sin() / (PI * z);
                    let scale = bessel_j(nu, z).unwrap().norm()
                        * bessel_j_derivative(-nu, z).unwrap().norm();
                    assert!(
                        (w - expected).norm() <= 1e-9 * expected.norm().max(scale),
                        "nu={nu} z={z}: {w} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &nu in &[0.0, 0.3, 0.5, 0.8] {
            for z in [c(0.7, 0.2), c(3.0, 1.0), c(-2.0, 4.0), c(20.0, 0.5)] {
                let fd_j = (bessel_j(nu, z + h).unwrap() - bessel_j(nu, z - h).unwrap()) / (2.0 * h);
                assert!(rel(bessel_j_derivative(nu, z).unwrap(), fd_j) < 1e-7);
                let fd_h = (hankel1(nu, z + h).unwrap() - hankel1(nu, z - h).unwrap()) / (2.0 * h);
                assert!(rel(hankel1_derivative(nu, z).unwrap(), fd_h) < 1e-7);
            }
        }
    }

    #[test]
    fn y_matches_reference() {
        for &nu in &[0.0, 0.4, 1.0] {
            for z in sample_points() {
                let y_ref = cb_y(nu, z).unwrap();
                let y = bessel_y(nu, z).unwrap();
                let scale = y_ref.norm() + cb_j(nu, z).unwrap().norm();
                assert!((y - y_ref).norm() <= 1e-10 * scale, "nu={nu} z={z}");
            }
        }
    }

    #[test]
    fn hankel_decay_in_upper_half_plane() {
        for &nu in &[0.2, 0.6] {
            let z = c(30.0, 30.0);
            let h = hankel1(nu, z).unwrap();
            let env = c(0.0, 1.0) * z;
            let bound = env.exp().norm() * (2.0 / (PI * z.norm())).sqrt();
            assert!((h.norm() / bound - 1.0).abs() < 0.05);
        }
    }
}
