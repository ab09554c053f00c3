//! Brute-force checks: finite-difference discretizations on truncated
//! grids, traces of matrix resolvent differences, lowest eigenvalues, and a
//! closed-form Green's function for −y″ on a bounded interval.

mod green;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::BesselParams;
use crate::error::{Error, Result};

pub use green::{regular_green, BoundaryRow, RegularConditions};

type C = Complex64;

/// What is discretized. Bessel problems at ν = 1/2 have q ≡ 0 and accept
/// any θ through the boundary row cos θ·y(0) − sin θ·y′(0) = 0; other orders
/// only support the Dirichlet-type condition at `x_min > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleProblem {
    Bessel { params: BesselParams, x_min: f64 },
    /// −y″ on (a, b) with cos α·y(a) − sin α·y′(a) = 0 and
    /// cos β·y(b) − sin β·y′(b) = 0.
    Regular { a: f64, b: f64, alpha: f64, beta: f64 },
}

/// Three-point discretization M of τ on uniform nodes. M is symmetric in
/// the inner product Σ weight_j·u_j·v_j.
#[derive(Debug, Clone, Serialize)]
pub struct Discretization {
    pub h: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Nodes carrying unknowns; Dirichlet end nodes are dropped.
    pub nodes: Vec<f64>,
    pub diag: Vec<f64>,
    /// M_{j, j+1}.
    pub upper: Vec<f64>,
    /// M_{j+1, j}.
    pub lower: Vec<f64>,
    pub weight: Vec<f64>,
    pub warnings: Vec<String>,
}

fn cot(t: f64) -> f64 {
    if t == FRAC_PI_2 {
        0.0
    } else {
        t.cos() / t.sin()
    }
}

/// Robin slope κ with y′ = κ y at the end, or None for Dirichlet.
fn robin(angle: f64) -> Option<f64> {
    if angle == 0.0 {
        None
    } else {
        Some(cot(angle))
    }
}

pub fn discretize(problem: &OracleProblem, h: f64, l: f64) -> Result<Discretization> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Parameter(format!("grid spacing h = {h} must be positive")));
    }
    let (x0, x1, left, right, nu) = match *problem {
        OracleProblem::Bessel { params, x_min } => {
            if params.nu == 0.5 {
                (0.0, l, robin(params.theta), None, 0.5)
            } else {
                if params.theta != 0.0 {
                    return Err(Error::Regime(format!(
                        "finite differences at nu = {} support only theta = 0",
                        params.nu
                    )));
                }
                if !(x_min > 0.0) {
                    return Err(Error::Parameter("x_min must be positive away from nu = 1/2".into()));
                }
                (x_min, l, None, None, params.nu)
            }
        }
        OracleProblem::Regular { a, b, alpha, beta } => {
            for (n, v) in [("alpha", alpha), ("beta", beta)] {
                if !(0.0..PI).contains(&v) {
                    return Err(Error::Parameter(format!("{n} = {v} must lie in [0, π)")));
                }
            }
            (a, b, robin(alpha), robin(beta), 0.5)
        }
    };
    if !(x1 > x0) {
        return Err(Error::Parameter(format!("empty interval [{x0}, {x1}]")));
    }
    let n = ((x1 - x0) / h).round() as usize;
    if n < 4 || ((n as f64) * h - (x1 - x0)).abs() > 1e-9 * (x1 - x0) {
        return Err(Error::Parameter(format!("h = {h} does not divide [{x0}, {x1}]")));
    }
    let c = nu * nu - 0.25;
    let q = |x: f64| if c == 0.0 { 0.0 } else { c / (x * x) };
    let mut warnings = Vec::new();
    if c != 0.0 && (q(x0 + h) - q(x0 + 2.0 * h)).abs() * h * h > 0.1 {
        warnings.push(format!("q varies by more than 0.1/h² across the first cell at h = {h}"));
    }
    let ih2 = 1.0 / (h * h);
    let first = if left.is_some() { 0 } else { 1 };
    let last = if right.is_some() { n } else { n - 1 };
    let mut nodes = Vec::new();
    let mut diag = Vec::new();
    let mut weight = Vec::new();
    for j in first..=last {
        let x = x0 + j as f64 * h;
        nodes.push(x);
        let (d, w) = if j == 0 {
            ((2.0 + 2.0 * h * left.unwrap()) * ih2, 0.5 * h)
        } else if j == n {
            ((2.0 - 2.0 * h * right.unwrap()) * ih2, 0.5 * h)
        } else {
            (2.0 * ih2 + q(x), h)
        };
        diag.push(d);
        weight.push(w);
    }
    let m = nodes.len();
    let mut upper = vec![-ih2; m - 1];
    let mut lower = vec![-ih2; m - 1];
    if first == 0 {
        upper[0] = -2.0 * ih2;
    }
    if last == n {
        lower[m - 2] = -2.0 * ih2;
    }
    Ok(Discretization { h, x_min: x0, x_max: x1, nodes, diag, upper, lower, weight, warnings })
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Products M_{j,j+1}·M_{j+1,j}, which fix the spectrum.
    fn couplings(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u * l).collect()
    }

    /// Number of eigenvalues below σ (Sturm sequence count).
    pub fn count_below(&self, sigma: f64) -> usize {
        let b2 = self.couplings();
        let mut count = 0;
        let mut d = 0.0;
        for j in 0..self.len() {
            d = self.diag[j] - sigma - if j > 0 { b2[j - 1] / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * self.diag[j].abs().max(1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..self.len() {
            let mut r = 0.0;
            if j > 0 {
                r += self.lower[j - 1].abs();
            }
            if j + 1 < self.len() {
                r += self.upper[j].abs();
            }
            lo = lo.min(self.diag[j] - r);
            hi = hi.max(self.diag[j] + r);
        }
        (lo, hi)
    }

    /// tr (M − z)^{−1} from forward and backward pivots:
    /// [(M − z)^{−1}]_{jj} = 1/(f_j + g_j − (a_j − z)).
    pub fn resolvent_trace(&self, z: C) -> Result<C> {
        if z.im == 0.0 {
            let gap = 1e-6 * z.re.abs().max(1.0);
            if self.count_below(z.re + gap) != self.count_below(z.re - gap) {
                return Err(Error::Conditioning(format!("z = {z} is within {gap:.1e} of a matrix eigenvalue")));
            }
        }
        let m = self.len();
        let b2 = self.couplings();
        let a: Vec<C> = self.diag.iter().map(|d| d - z).collect();
        let mut f = vec![C::new(0.0, 0.0); m];
        let mut g = vec![C::new(0.0, 0.0); m];
        f[0] = a[0];
        for j in 1..m {
            f[j] = a[j] - b2[j - 1] / f[j - 1];
        }
        g[m - 1] = a[m - 1];
        for j in (0..m - 1).rev() {
            g[j] = a[j] - b2[j] / g[j + 1];
        }
        let mut tr = C::new(0.0, 0.0);
        for j in 0..m {
            tr += (f[j] + g[j] - a[j]).inv();
        }
        if !tr.is_finite() {
            return Err(Error::Conditioning(format!("singular pivot at z = {z}")));
        }
        Ok(tr)
    }

    /// Solves (M − σ)x = rhs by the Thomas algorithm.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let mut beta = self.diag[0] - sigma;
        c[0] = if m > 1 { self.upper[0] / beta } else { 0.0 };
        d[0] = rhs[0] / beta;
        for j in 1..m {
            beta = self.diag[j] - sigma - self.lower[j - 1] * c[j - 1];
            if j + 1 < m {
                c[j] = self.upper[j] / beta;
            }
            d[j] = (rhs[j] - self.lower[j - 1] * d[j - 1]) / beta;
        }
        for j in (0..m - 1).rev() {
            d[j] -= c[j] * d[j + 1];
        }
        d
    }
}

/// tr[(M₁ − z)^{−1} − (M₀ − z)^{−1}]. The trace does not depend on the
/// weighted inner product.
pub fn trace_diff_matrix(d1: &Discretization, d0: &Discretization, z: C) -> Result<C> {
    if d1.h != d0.h || d1.x_min != d0.x_min || d1.x_max != d0.x_max {
        return Err(Error::Usage("discretizations must share a grid".into()));
    }
    Ok(d1.resolvent_trace(z)? - d0.resolvent_trace(z)?)
}

/// Smallest eigenvalue: Sturm bisection to a narrow bracket, then shifted
/// inverse iteration with Rayleigh quotients in the weighted inner product.
pub fn lowest_eigenvalue(d: &Discretization) -> Result<f64> {
    let (mut lo, hi0) = d.gershgorin();
    let mut hi = hi0;
    let width = (hi0 - lo).abs().max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d.count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-9 * width.min(1.0 + mid.abs()) {
            break;
        }
    }
    if d.count_below(hi) < 1 {
        return Err(Error::Convergence("no eigenvalue found by bisection".into()));
    }
    let mut lambda = 0.5 * (lo + hi);
    let shift = lo - 1e-6 * (1.0 + lo.abs());
    let mut v = vec![1.0; d.len()];
    for _ in 0..50 {
        let mut x = d.solve_shifted(shift, &v);
        let norm = x.iter().zip(&d.weight).map(|(a, w)| w * a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Convergence("inverse iteration broke down".into()));
        }
        x.iter_mut().for_each(|a| *a /= norm);
        // Rayleigh quotient ⟨x, Mx⟩_W
        let mut rq = 0.0;
        for j in 0..d.len() {
            let mut mx = d.diag[j] * x[j];
            if j > 0 {
                mx += d.lower[j - 1] * x[j - 1];
            }
            if j + 1 < d.len() {
                mx += d.upper[j] * x[j + 1];
            }
            rq += d.weight[j] * x[j] * mx;
        }
        let done = (rq - lambda).abs() <= 1e-13 * (1.0 + rq.abs());
        lambda = rq;
        v = x;
        if done {
            return Ok(lambda);
        }
    }
    if (lambda - 0.5 * (lo + hi)).abs() <= 1e-6 * (1.0 + lambda.abs()) {
        return Ok(lambda);
    }
    Err(Error::Convergence("inverse iteration did not settle".into()))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub l: f64,
    pub value: C,
    pub error: f64,
}

/// Matrix traces tr(R_θ − R_0) at ν = 1/2 over a list of spacings, with the
/// distance to `exact`.
pub fn convergence_table(theta: f64, z: C, hs: &[f64], l: f64, exact: C) -> Result<Vec<ConvergenceRow>> {
    let p1 = OracleProblem::Bessel { params: BesselParams::new(0.5, theta)?, x_min: 0.0 };
    let p0 = OracleProblem::Bessel { params: BesselParams::new(0.5, 0.0)?, x_min: 0.0 };
    let mut rows = Vec::new();
    for &h in hs {
        let v = trace_diff_matrix(&discretize(&p1, h, l)?, &discretize(&p0, h, l)?, z)?;
        rows.push(ConvergenceRow { h, l, value: v, error: (v - exact).norm() });
    }
    Ok(rows)
}

/// Least-squares slope of log(error) against log(h).
pub fn convergence_slope(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h.ln(), r.error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("h,L,value_re,value_im,error\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.h, r.l, r.value.re, r.value.im, r.error));
    }
    out
}
