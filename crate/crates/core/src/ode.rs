//! Dormand–Prince 5(4) integration of complex two-component systems with
//! continuous (dense) output.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;
pub type State = [C; 2];

#[derive(Debug, Clone, Copy)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Largest step as a fraction of the integration span.
    pub max_step_fraction: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 200_000, max_step_fraction: 0.05 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

/// Accepted steps with their continuous-extension coefficients, stored in
/// increasing x regardless of the direction of integration.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    xs: Vec<f64>,
    ys: Vec<State>,
    // per step: [y0, y1−y0, h k1 − (y1−y0), (y1−y0) − h k7 − rc3, rc5], for the
    // step taken left to right
    conts: Vec<[State; 5]>,
}

impl DenseSolution {
    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[State] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> Option<State> {
        let (lo, hi) = (self.x_min(), self.x_max());
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return Some(self.ys[i]),
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let th = (x - self.xs[i]) / h;
        let th1 = 1.0 - th;
        let r = &self.conts[i];
        let mut out = [C::new(0.0, 0.0); 2];
        for j in 0..2 {
            out[j] = r[0][j] + (r[1][j] + (r[2][j] + (r[3][j] + r[4][j] * th1) * th) * th1) * th;
        }
        Some(out)
    }
}

/// Integrates y′ = f(x, y) from x0 to x1 (either direction).
pub fn dopri5<F>(f: F, x0: f64, y0: State, x1: f64, cfg: &OdeConfig) -> Result<DenseSolution>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let span = x1 - x0;
    if span == 0.0 {
        return Err(Error::Usage("empty integration span".into()));
    }
    let dir = span.signum();
    let h_max = span.abs() * cfg.max_step_fraction;
    let mut xs = vec![x0];
    let mut ys = vec![y0];
    let mut conts: Vec<[State; 5]> = Vec::new();

    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y)?;
    let mut h = initial_step(&f, x, &y, &k1, dir, cfg)?.min(h_max);
    let mut steps = 0;
    while (x1 - x) * dir > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::Integration { x, reason: "step budget exhausted".into() });
        }
        let mut last = false;
        if (x + dir * h * 1.01 - x1) * dir >= 0.0 {
            h = (x1 - x).abs();
            last = true;
        }
        let hs = dir * h;
        let k2 = f(x + C2 * hs, &axpy(&y, &[(A21, &k1)], hs))?;
        let k3 = f(x + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs))?;
        let k4 = f(x + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs))?;
        let k5 = f(
            x + C5 * hs,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
        )?;
        let x_new = if last { x1 } else { x + hs };
        let k6 = f(
            x_new,
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs),
        )?;
        let y_new = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], hs);
        let k7 = f(x_new, &y_new)?;
        let mut err = 0.0;
        for j in 0..2 {
            let e = (k1[j] * E1 + k3[j] * E3 + k4[j] * E4 + k5[j] * E5 + k6[j] * E6 + k7[j] * E7) * hs;
            let sc = cfg.abs_tol + cfg.rel_tol * y[j].norm().max(y_new[j].norm());
            err += (e.re / sc).powi(2) + (e.im / sc).powi(2);
        }
        let err = (err / 4.0).sqrt();
        if !err.is_finite() {
            h *= 0.2;
        } else if err <= 1.0 {
            let d = y_new.map(|_| C::new(0.0, 0.0));
            let mut rc = [y, d, d, d, d];
            for j in 0..2 {
                let ydiff = y_new[j] - y[j];
                let bspl = k1[j] * hs - ydiff;
                rc[0][j] = y[j];
                rc[1][j] = ydiff;
                rc[2][j] = bspl;
                rc[3][j] = ydiff - k7[j] * hs - bspl;
                rc[4][j] = (k1[j] * D1 + k3[j] * D3 + k4[j] * D4 + k5[j] * D5 + k6[j] * D6 + k7[j] * D7) * hs;
            }
            conts.push(rc);
            x = x_new;
            y = y_new;
            k1 = k7;
            xs.push(x);
            ys.push(y);
            if last {
                break;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(h_max);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h <= 1e-14 * x.abs().max(1e-300) {
            return Err(Error::Integration { x, reason: "step size underflow".into() });
        }
    }
    if dir < 0.0 {
        reverse(&mut xs, &mut ys, &mut conts);
    }
    Ok(DenseSolution { xs, ys, conts })
}

/// Re-expresses right-to-left steps as left-to-right ones via θ ↦ 1 − θ.
fn reverse(xs: &mut [f64], ys: &mut [State], conts: &mut [[State; 5]]) {
    xs.reverse();
    ys.reverse();
    conts.reverse();
    for rc in conts.iter_mut() {
        *rc = reparametrize(rc);
    }
}

fn reparametrize(old: &[State; 5]) -> [State; 5] {
    let mut out = *old;
    for j in 0..2 {
        let (a, b, c, d, e) = (old[0][j], old[1][j], old[2][j], old[3][j], old[4][j]);
        // p = a + bθ + cθ(1−θ) + dθ²(1−θ) + eθ²(1−θ)²
        let m = monomials(a, b, c, d, e);
        // q(s) = p(1−s)
        let q = shift_reflect(&m);
        let (a2, b2, c2, d2, e2) = fold(&q);
        out[0][j] = a2;
        out[1][j] = b2;
        out[2][j] = c2;
        out[3][j] = d2;
        out[4][j] = e2;
    }
    out
}

fn monomials(a: C, b: C, c: C, d: C, e: C) -> [C; 5] {
    // θ(1−θ) = θ − θ²; θ²(1−θ) = θ² − θ³; θ²(1−θ)² = θ² − 2θ³ + θ⁴
    [a, b + c, -c + d + e, -d - e * 2.0, e]
}

fn shift_reflect(m: &[C; 5]) -> [C; 5] {
    // coefficients of p(1 − s) in powers of s
    let binom = [[1.0, 0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0, 0.0], [1.0, 3.0, 3.0, 1.0, 0.0], [1.0, 4.0, 6.0, 4.0, 1.0]];
    let mut out = [C::new(0.0, 0.0); 5];
    for (k, coeff) in m.iter().enumerate() {
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            out[i] += coeff * (binom[k][i] * sign);
        }
    }
    out
}

fn fold(q: &[C; 5]) -> (C, C, C, C, C) {
    // inverse of `monomials`
    let e = q[4];
    let d = -q[3] - e * 2.0;
    let c = -q[2] + d + e;
    let b = q[1] - c;
    (q[0], b, c, d, e)
}

fn initial_step<F>(f: &F, x: f64, y: &State, k1: &State, dir: f64, cfg: &OdeConfig) -> Result<f64>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for j in 0..2 {
        let sc = cfg.abs_tol + cfg.rel_tol * y[j].norm();
        d0 += (y[j].norm() / sc).powi(2);
        d1 += (k1[j].norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / 2.0).sqrt(), (d1 / 2.0).sqrt());
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, &[(1.0, k1)], dir * h0);
    let k2 = f(x + dir * h0, &y1)?;
    let mut d2 = 0.0;
    for j in 0..2 {
        let sc = cfg.abs_tol + cfg.rel_tol * y[j].norm();
        d2 += ((k2[j] - k1[j]).norm() / sc).powi(2);
    }
    let d2 = (d2 / 2.0).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_x: f64, y: &State) -> Result<State> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn harmonic_oscillator_forward_and_backward() {
        let cfg = OdeConfig::default();
        let y0 = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let sol = dopri5(oscillator, 0.0, y0, 10.0, &cfg).unwrap();
        for &x in &[0.0, 0.37, 3.3, 7.77, 10.0] {
            let v = sol.eval(x).unwrap();
            assert!((v[0].re - x.sin()).abs() < 1e-8, "x = {x}");
            assert!((v[1].re - x.cos()).abs() < 1e-8);
        }
        let back = dopri5(oscillator, 10.0, [C::new(10f64.sin(), 0.0), C::new(10f64.cos(), 0.0)], 0.0, &cfg).unwrap();
        assert_eq!(back.x_min(), 0.0);
        for &x in &[0.1, 2.5, 6.1, 9.99] {
            let v = back.eval(x).unwrap();
            assert!((v[0].re - x.sin()).abs() < 1e-8, "x = {x}: {}", v[0].re);
        }
    }

    #[test]
    fn dense_output_reproduces_nodes() {
        let cfg = OdeConfig::default();
        let sol = dopri5(oscillator, 3.0, [C::new(1.0, 0.5), C::new(0.0, 1.0)], -2.0, &cfg).unwrap();
        for (x, y) in sol.nodes().iter().zip(sol.values()) {
            let v = sol.eval(*x).unwrap();
            assert!((v[0] - y[0]).norm() < 1e-15 && (v[1] - y[1]).norm() < 1e-15);
        }
        // interior points between nodes of a right-to-left run
        let n = sol.nodes();
        for w in n.windows(2) {
            let xm = 0.5 * (w[0] + w[1]);
            let v = sol.eval(xm).unwrap();
            let exact0 = C::new(1.0, 0.5) * (xm - 3.0).cos() + C::new(0.0, 1.0) * (xm - 3.0).sin();
            assert!((v[0] - exact0).norm() < 1e-8);
        }
        assert!(sol.eval(3.1).is_none());
    }
}
