//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, with
//! helpers for semi-infinite ranges and integrable endpoint singularities.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 2000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C,
    pub error: f64,
}

/// One G7/K15 panel: (Kronrod value, |Kronrod − Gauss|).
fn gk15<F: Fn(f64) -> C>(f: &F, a: f64, b: f64) -> (C, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

/// ∫_a^b f by globally adaptive bisection.
pub fn integrate<F: Fn(f64) -> C>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: C::new(0.0, 0.0), error: 0.0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Accuracy { achieved: f64::INFINITY, context: "non-finite integrand".into() });
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
            return Ok(QuadResult { value: total, error: err });
        }
        if panels.len() >= cfg.max_intervals {
            return Err(Error::Accuracy {
                achieved: err,
                context: format!("quadrature on [{a}, {b}] hit the subdivision limit"),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, v, e) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Accuracy { achieved: err, context: "interval too small to bisect".into() });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - v;
        err += e1 + e2 - e;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let r = integrate(|x| C::new(f(x), 0.0), a, b, cfg)?;
    Ok((r.value.re, r.error))
}

/// ∫_a^∞ f over panels of doubling length, stopped when three consecutive
/// panels contribute less than 1e−14 of the accumulated mass.
pub fn integrate_to_infinity<F: Fn(f64) -> C>(
    f: F,
    a: f64,
    first_width: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut lo = a;
    let mut width = first_width;
    let mut total = C::new(0.0, 0.0);
    let mut err = 0.0;
    let mut small = 0;
    for _ in 0..200 {
        let piece = integrate(&f, lo, lo + width, cfg)?;
        total += piece.value;
        err += piece.error;
        if piece.value.norm() <= 1e-14 * total.norm() || piece.value.norm() <= 1e-3 * cfg.abs_tol {
            small += 1;
            if small >= 3 {
                return Ok(QuadResult { value: total, error: err + piece.value.norm() });
            }
        } else {
            small = 0;
        }
        lo += width;
        width *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::Truncation { bound: err })
}

/// ∫_a^b f where f may have an integrable power-type singularity at `a`:
/// panels shrink geometrically toward `a`, and the remainder is estimated
/// from the observed geometric decay of panel contributions.
pub fn integrate_singular_left<F: Fn(f64) -> C>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_toward_edge(f, b, a, a, cfg)
}

/// ∫ f from `from` to the endpoint `edge` (either side of `from`) by
/// panels halving their distance to `edge`. The integrand is only sampled
/// between `from` and `stop`; if `stop` lies short of `edge`, the part
/// beyond it is filled in by the geometric tail of the panel sums, which is
/// exact for power-law behaviour at the edge. The result is the integral
/// over the region between the two points in increasing-x orientation.
pub fn integrate_toward_edge<F: Fn(f64) -> C>(
    f: F,
    from: f64,
    edge: f64,
    stop: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut far = from;
    let mut total = C::new(0.0, 0.0);
    let mut err = 0.0;
    let mut prev: Option<C> = None;
    let mut ratio_prev: Option<f64> = None;
    for _ in 0..400 {
        let near = edge + 0.5 * (far - edge);
        let beyond = (near - stop) * (far - edge).signum() < 0.0;
        if beyond {
            // extrapolate the remaining panels geometrically
            let (Some(p), Some(rho)) = (prev, ratio_prev) else {
                return Err(Error::Truncation { bound: f64::INFINITY });
            };
            if rho >= 0.99 {
                return Err(Error::Truncation { bound: p.norm() });
            }
            let rest = p * (rho / (1.0 - rho));
            return Ok(QuadResult { value: total + rest, error: err + 0.1 * rest.norm() });
        }
        let piece = integrate(&f, near.min(far), near.max(far), cfg)?;
        let v = piece.value;
        total += v;
        err += piece.error;
        if let Some(p) = prev {
            let ratio = v.norm() / p.norm().max(1e-300);
            if ratio < 0.95 {
                let rest = v * (ratio / (1.0 - ratio));
                if rest.norm() <= cfg.rel_tol * total.norm() + cfg.abs_tol {
                    return Ok(QuadResult { value: total + rest, error: err + rest.norm() });
                }
            }
            ratio_prev = Some(ratio);
        }
        prev = Some(v);
        far = near;
        if (far - edge).abs() <= f64::EPSILON * edge.abs().max(1e-300) {
            break;
        }
    }
    Err(Error::Truncation { bound: err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory() {
        let cfg = QuadConfig::default();
        let r = integrate(|x| C::new(x * x, 0.0), 0.0, 3.0, &cfg).unwrap();
        assert!((r.value.re - 9.0).abs() < 1e-13);
        let r = integrate(|x| C::new(0.0, x).exp(), 0.0, 50.0, &cfg).unwrap();
        let exact = (C::new(0.0, 50.0).exp() - 1.0) / C::new(0.0, 1.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn half_line() {
        let cfg = QuadConfig::default();
        let r = integrate_to_infinity(|x| C::new((-x).exp(), 0.0), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        let r = integrate_to_infinity(|x| C::new(1.0 / (1.0 + x * x), 0.0), 0.0, 1.0, &cfg);
        // algebraic tails are not truncated silently
        assert!(r.is_err() || (r.unwrap().value.re - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn power_singularity() {
        let cfg = QuadConfig::default();
        let r = integrate_singular_left(|x: f64| C::new(x.powf(-0.8), 0.0), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value.re - 5.0).abs() < 1e-9, "{}", r.value.re);
        let r = integrate_singular_left(|x: f64| C::new(x.ln() * x.sqrt(), 0.0), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value.re + 4.0 / 9.0).abs() < 1e-10);
    }

    #[test]
    fn edge_tail_is_extrapolated() {
        let cfg = QuadConfig::default();
        // sampled only down to 1e-6, the rest filled in from the power law
        let r = integrate_toward_edge(|x: f64| C::new(x.powf(-0.8), 0.0), 1.0, 0.0, 1e-6, &cfg).unwrap();
        assert!((r.value.re - 5.0).abs() < 1e-8, "{}", r.value.re);
        // toward a right edge: ∫_0^1 (1 − x)^{-1/2} = 2
        let r = integrate_toward_edge(|x: f64| C::new((1.0 - x).powf(-0.5), 0.0), 0.0, 1.0, 1.0 - 1e-9, &cfg).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-8, "{}", r.value.re);
    }
}
