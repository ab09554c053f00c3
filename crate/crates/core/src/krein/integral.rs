use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, integrate_toward_edge, QuadConfig, QuadResult};
use crate::slcore::{Endpoint, SLProblem, SolutionEval};

type C = Complex64;

/// ∫_a^b f·g·r dx over the whole interval, with no conjugation. Inner
/// products ⟨u_{z̄}, v⟩ reduce to this form because conj(u_{z̄}) = u_z.
///
/// The integrand is sampled on the common domain of `f` and `g`. Where that
/// domain stops short of a finite endpoint, the missing piece is filled in
/// from the geometric decay of panel sums; where it stops short of ∞, the
/// integrand must already have decayed there.
pub fn bilinear_integral(
    problem: &SLProblem,
    f: &dyn SolutionEval,
    g: &dyn SolutionEval,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let (fl, fh) = f.domain();
    let (gl, gh) = g.domain();
    let (lo, hi) = (fl.max(gl).max(problem.a()), fh.min(gh).min(problem.b()));
    if lo >= hi {
        return Err(Error::Domain("solutions share no domain".into()));
    }
    let integrand = |x: f64| -> C {
        match (f.state(x), g.state(x), problem.r(x)) {
            (Ok(sf), Ok(sg), Ok(r)) => sf.y * sg.y * r,
            _ => C::new(f64::NAN, f64::NAN),
        }
    };
    let mid = split_point(problem, lo, hi);
    let left = side(problem, Endpoint::A, &integrand, mid, lo, cfg)?;
    let right = side(problem, Endpoint::B, &integrand, mid, hi, cfg)?;
    Ok(QuadResult { value: left.value + right.value, error: left.error + right.error })
}

fn split_point(problem: &SLProblem, lo: f64, hi: f64) -> f64 {
    let (a, b) = (problem.a(), problem.b());
    let m = match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    };
    m.clamp(lo, hi)
}

fn side<F: Fn(f64) -> C>(
    problem: &SLProblem,
    e: Endpoint,
    f: &F,
    mid: f64,
    stop: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let edge = problem.endpoint(e);
    if mid == stop {
        return Ok(QuadResult { value: C::new(0.0, 0.0), error: 0.0 });
    }
    if edge.is_finite() {
        if problem.regular_at(e) && stop == edge {
            let (x0, x1) = if mid < stop { (mid, stop) } else { (stop, mid) };
            return integrate(f, x0, x1, cfg);
        }
        return integrate_toward_edge(f, mid, edge, stop, cfg);
    }
    if stop.is_finite() {
        // the domain ends before the infinite endpoint: everything past
        // `stop` is treated as negligible, which must be visible in the
        // integrand itself
        let (x0, x1) = if mid < stop { (mid, stop) } else { (stop, mid) };
        let mut total = C::new(0.0, 0.0);
        let mut err = 0.0;
        let n = ((x1 - x0) / 2.0).ceil().max(1.0) as usize;
        let w = (x1 - x0) / n as f64;
        for k in 0..n {
            let piece = integrate(f, x0 + k as f64 * w, x0 + (k + 1) as f64 * w, cfg)?;
            total += piece.value;
            err += piece.error;
        }
        let end = f(stop).norm() * 10.0;
        if end > 1e-10 * total.norm().max(1e-300) {
            return Err(Error::Truncation { bound: end });
        }
        return Ok(QuadResult { value: total, error: err + end });
    }
    match e {
        Endpoint::B => integrate_to_infinity(f, mid, 1.0, cfg),
        Endpoint::A => integrate_to_infinity(|t| f(-t), -mid, 1.0, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slcore::closed_form;

    #[test]
    fn half_line_exponential() {
        let p = SLProblem::bessel(0.5).unwrap();
        let w = closed_form((0.0, f64::INFINITY), |x: f64| Ok((C::new((-x).exp(), 0.0), C::new(-(-x).exp(), 0.0))));
        let r = bilinear_integral(&p, w.as_ref(), w.as_ref(), &QuadConfig::default()).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-11);
    }

    #[test]
    fn truncated_domain_near_singular_endpoint() {
        let p = SLProblem::bessel(0.3).unwrap();
        // x^{0.2} e^{−x} on [1e−6, 40]: ∫_0^∞ x^{0.4} e^{−2x} = Γ(1.4)/2^{1.4}
        let f = closed_form((1e-6, 40.0), |x: f64| Ok((C::new(x.powf(0.2) * (-x).exp(), 0.0), C::new(0.0, 0.0))));
        let r = bilinear_integral(&p, f.as_ref(), f.as_ref(), &QuadConfig::default()).unwrap();
        let exact = crate::specialfn::gamma_real(1.4).unwrap() / 2f64.powf(1.4);
        assert!((r.value.re - exact).abs() < 1e-9, "{} vs {exact}", r.value.re);
    }
}
