use std::sync::Arc;

use num_complex::Complex64;

use super::correction::{krein_correction, KreinCorrection};
use super::defect::DefectSolutions;
use super::integral::bilinear_integral;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};
use crate::slcore::{BracketData, Extension, QuasiState, SLProblem};
use crate::specialfn::SpectralPoint;

type C = Complex64;

/// Reference Green's function at (x, y):
/// left(min(x, y))·right(max(x, y)) / green, where (left, right) is
/// (u_z, w_z) for one limit-circle endpoint and (u_{z,1}, u_{z,2}) for two.
pub fn greens_kernel(defect: &DefectSolutions, x: f64, y: f64) -> Result<C> {
    let (left, right) = defect.green_pair();
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    Ok(left.state(lo)?.y * right.state(hi)?.y / defect.brackets().green)
}

/// Resolvent of a self-adjoint extension at z, as the reference Green's
/// function plus the Krein correction.
#[derive(Clone, Debug)]
pub struct ResolventOp {
    extension: Extension,
    defect: DefectSolutions,
    correction: Option<KreinCorrection>,
}

impl ResolventOp {
    pub fn new(extension: Extension, defect: DefectSolutions) -> Result<Self> {
        let correction = krein_correction(&extension, &defect)?;
        Ok(ResolventOp { extension, defect, correction })
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn z(&self) -> SpectralPoint {
        self.defect.z()
    }

    pub fn defect(&self) -> &DefectSolutions {
        &self.defect
    }

    pub fn correction(&self) -> Option<&KreinCorrection> {
        self.correction.as_ref()
    }

    pub fn kernel(&self, x: f64, y: f64) -> Result<C> {
        let g0 = greens_kernel(&self.defect, x, y)?;
        match &self.correction {
            Some(c) => Ok(g0 + c.kernel(x, y)?),
            None => Ok(g0),
        }
    }
}

/// Function on an interval with its support, the input of
/// [`resolvent_apply`].
#[derive(Clone)]
pub struct Supported {
    pub f: Arc<dyn Fn(f64) -> C + Send + Sync>,
    pub support: (f64, f64),
}

impl Supported {
    pub fn new<F: Fn(f64) -> C + Send + Sync + 'static>(f: F, lo: f64, hi: f64) -> Self {
        Supported { f: Arc::new(f), support: (lo, hi) }
    }
}

/// v = R(z) f, evaluated pointwise with its quasi-derivative.
///
/// With G = left(min)·right(max)/W,
/// v(x) = [right(x)·∫_{s0}^{x} left·f·r + left(x)·∫_{x}^{s1} right·f·r]/W,
/// and differentiating under the integral gives p v′ from the same
/// expression with (p left′, p right′) in place of (left, right). The
/// correction adds a fixed combination of its kets.
#[derive(Clone)]
pub struct AppliedResolvent {
    problem: SLProblem,
    op: ResolventOp,
    f: Supported,
    nodes: Vec<f64>,
    left_cum: Vec<C>,
    right_cum: Vec<C>,
    ket_coef: Vec<C>,
}

const GL8_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Fixed 8-point Gauss–Legendre rule, for short pieces of smooth integrands.
fn gauss8<G: Fn(f64) -> C>(g: &G, a: f64, b: f64) -> C {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = C::new(0.0, 0.0);
    for (x, w) in GL8_X.iter().zip(GL8_W) {
        s += (g(c - h * x) + g(c + h * x)) * w;
    }
    s * h
}

fn cumulative<G: Fn(f64) -> C>(g: &G, nodes: &[f64], cfg: &QuadConfig) -> Result<Vec<C>> {
    let mut out = vec![C::new(0.0, 0.0)];
    for w in nodes.windows(2) {
        let piece = integrate(g, w[0], w[1], cfg)?;
        out.push(out.last().copied().unwrap_or_default() + piece.value);
    }
    Ok(out)
}

/// Applies the resolvent to a compactly supported f; square integrability
/// is checked by quadrature of |f|² r over the support.
pub fn resolvent_apply(op: &ResolventOp, f: Supported) -> Result<AppliedResolvent> {
    let problem = op.defect.problem().clone();
    let (s0, s1) = f.support;
    if !(problem.contains(s0) && problem.contains(s1) && s0 < s1) {
        return Err(Error::Domain(format!("support [{s0}, {s1}] not inside the interval")));
    }
    let quad = QuadConfig { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 4000 };
    let norm = integrate(|x| C::new((f.f)(x).norm_sqr() * problem.r(x).unwrap_or(f64::NAN), 0.0), s0, s1, &quad)?;
    if !norm.value.re.is_finite() {
        return Err(Error::Domain("f is not square integrable".into()));
    }
    let n = 512;
    let nodes: Vec<f64> = (0..=n).map(|k| s0 + (s1 - s0) * k as f64 / n as f64).collect();
    let (left, right) = op.defect.green_pair();
    let weighted = |s: &crate::slcore::Solution| {
        let s = s.clone();
        let f = f.f.clone();
        let problem = problem.clone();
        move |x: f64| match (s.state(x), problem.r(x)) {
            (Ok(st), Ok(r)) => st.y * f(x) * r,
            _ => C::new(f64::NAN, f64::NAN),
        }
    };
    let left_cum = cumulative(&weighted(left), &nodes, &quad)?;
    let right_cum = cumulative(&weighted(right), &nodes, &quad)?;
    let mut ket_coef = Vec::new();
    if let Some(c) = &op.correction {
        let coef = c.coefficients();
        let mut bra_f = Vec::new();
        for b in c.bras() {
            bra_f.push(cumulative(&weighted(b), &[s0, s1], &quad)?[1]);
        }
        ket_coef = vec![C::new(0.0, 0.0); c.kets().len()];
        for (j, row) in coef.iter().enumerate() {
            for (k, cjk) in row.iter().enumerate() {
                ket_coef[k] += cjk * bra_f[j];
            }
        }
    }
    Ok(AppliedResolvent { problem, op: op.clone(), f, nodes, left_cum, right_cum, ket_coef })
}

impl AppliedResolvent {
    /// ∫_{s0}^{x} g and ∫_{x}^{s1} g from the cumulative tables.
    fn split(&self, cum: &[C], s: &crate::slcore::Solution, x: f64) -> Result<(C, C)> {
        let (s0, s1) = self.f.support;
        let total = *cum.last().unwrap_or(&C::new(0.0, 0.0));
        if x <= s0 {
            return Ok((C::new(0.0, 0.0), total));
        }
        if x >= s1 {
            return Ok((total, C::new(0.0, 0.0)));
        }
        let i = self.nodes.partition_point(|&t| t <= x).saturating_sub(1).min(self.nodes.len() - 2);
        let f = &self.f.f;
        let g = |t: f64| match (s.state(t), self.problem.r(t)) {
            (Ok(st), Ok(r)) => st.y * f(t) * r,
            _ => C::new(f64::NAN, f64::NAN),
        };
        let part = gauss8(&g, self.nodes[i], x);
        let below = cum[i] + part;
        Ok((below, total - below))
    }

    /// (R f)(x) and its quasi-derivative.
    pub fn eval(&self, x: f64) -> Result<QuasiState> {
        let (left, right) = self.op.defect.green_pair();
        let w = self.op.defect.brackets().green;
        let (l_below, _) = self.split(&self.left_cum, left, x)?;
        let (_, r_above) = self.split(&self.right_cum, right, x)?;
        let (sl, sr) = (left.state(x)?, right.state(x)?);
        let mut y = (sr.y * l_below + sl.y * r_above) / w;
        let mut py = (sr.py * l_below + sl.py * r_above) / w;
        if let Some(c) = &self.op.correction {
            for (k, ket) in c.kets().iter().enumerate() {
                let s = ket.state(x)?;
                y += self.ket_coef[k] * s.y;
                py += self.ket_coef[k] * s.py;
            }
        }
        Ok(QuasiState::new(x, y, py))
    }

    /// Relative L² norm of τv − z v − f over the grid cells of `grid`.
    ///
    /// On each cell the equation is used in integrated form,
    /// −[p v′] + ∫ (q − z r) v − f r, divided by ∫ r to give the cell
    /// average of the residual.
    pub fn residual_norm(&self, grid: &[f64]) -> Result<f64> {
        let z = self.op.z().value();
        let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 200 };
        let mut states = Vec::with_capacity(grid.len());
        for &x in grid {
            states.push(self.eval(x)?);
        }
        let (mut res2, mut f2) = (0.0, 0.0);
        for (i, w) in grid.windows(2).enumerate() {
            let (x0, x1) = (w[0], w[1]);
            let body = integrate(
                |t| {
                    let v = self.eval(t).map(|s| s.y).unwrap_or(C::new(f64::NAN, f64::NAN));
                    let q = self.problem.q(t).unwrap_or(f64::NAN);
                    let r = self.problem.r(t).unwrap_or(f64::NAN);
                    (q - z * r) * v - (self.f.f)(t) * r
                },
                x0,
                x1,
                &cfg,
            )?
            .value;
            let mass = integrate(|t| C::new(self.problem.r(t).unwrap_or(f64::NAN), 0.0), x0, x1, &cfg)?.value.re;
            let fmean = integrate(|t| (self.f.f)(t) * self.problem.r(t).unwrap_or(f64::NAN), x0, x1, &cfg)?.value / mass;
            let cell = (body - (states[i + 1].py - states[i].py)) / mass;
            res2 += cell.norm_sqr() * mass;
            f2 += fmean.norm_sqr() * mass;
        }
        Ok((res2 / f2.max(1e-300)).sqrt())
    }
}

/// tr(R_ext(z) − R_ref(z)) = sign·Σ_{j,k} [K⁻¹]_{jk} ⟨v_j, u_k⟩, with the
/// inner products by quadrature.
pub fn trace_resolvent_diff(correction: &KreinCorrection, problem: &SLProblem, cfg: &QuadConfig) -> Result<C> {
    let coef = correction.coefficients();
    let mut total = C::new(0.0, 0.0);
    for (j, row) in coef.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            let ip = bilinear_integral(problem, correction.bras()[j].as_ref(), correction.kets()[k].as_ref(), cfg)?;
            total += c * ip.value;
        }
    }
    Ok(total)
}

/// tr(R_{θ1}(z) − R_{θ2}(z)) for two separated extensions at one limit
/// circle endpoint: ⟨w_{z̄}, w_z⟩·(1/k₁ − 1/k₂), with 1/k = 0 for θ = 0.
pub fn trace_between_one_lc(defect: &DefectSolutions, theta1: f64, theta2: f64, cfg: &QuadConfig) -> Result<C> {
    let inv = |theta: f64| -> Result<C> {
        match krein_correction(&Extension::separated_one_lc(theta)?, defect)? {
            Some(c) => Ok(c.coefficients()[0][0]),
            None => Ok(C::new(0.0, 0.0)),
        }
    };
    let (i1, i2) = (inv(theta1)?, inv(theta2)?);
    if i1 == i2 {
        return Ok(C::new(0.0, 0.0));
    }
    let w = defect.w().ok_or_else(|| Error::Usage("needs one-limit-circle defect solutions".into()))?;
    let ip = bilinear_integral(defect.problem(), w.as_ref(), w.as_ref(), cfg)?;
    Ok(ip.value * (i1 - i2))
}

/// Whether boundary data lie in the maximal common part of two extensions,
/// that is, satisfy the boundary conditions of both.
pub fn common_part_membership(ext1: &Extension, ext2: &Extension, data: &BracketData, rel_tol: f64) -> bool {
    ext1.satisfied_by(data, rel_tol) && ext2.satisfied_by(data, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::{defect_solutions, krein_coupled, krein_scalar_one_lc, DefectConfig, Setting};
    use crate::slcore::{BoundaryBasis, Endpoint};
    use std::f64::consts::PI;

    fn regular() -> (SLProblem, Setting) {
        let p = SLProblem::regular_free(0.0, 1.0).unwrap();
        let basis_a = BoundaryBasis::regular_free(&p, Endpoint::A).unwrap();
        let basis_b = BoundaryBasis::regular_free(&p, Endpoint::B).unwrap();
        (p, Setting::TwoLc { basis_a, basis_b })
    }

    fn half_bessel(z: SpectralPoint) -> DefectSolutions {
        let p = SLProblem::bessel(0.5).unwrap();
        let setting = Setting::OneLc { basis: BoundaryBasis::bessel_origin(0.5).unwrap() };
        defect_solutions(&p, &setting, z, &DefectConfig::for_problem(&p)).unwrap()
    }

    #[test]
    fn regular_green_at_zero() {
        let (p, setting) = regular();
        let d = defect_solutions(&p, &setting, SpectralPoint::from_parts(0.0, 0.0), &DefectConfig::for_problem(&p)).unwrap();
        for &x in &[0.1, 0.4, 0.9] {
            assert!((d.u()[0].state(x).unwrap().y.re - x).abs() < 1e-10);
            assert!((d.u()[1].state(x).unwrap().y.re - (1.0 - x)).abs() < 1e-10);
            for &y in &[0.2, 0.7] {
                let g = greens_kernel(&d, x, y).unwrap();
                assert!((g.re - x.min(y) * (1.0 - x.max(y))).abs() < 1e-10);
            }
        }
        // −[u1, ψ_a](a) = [u2, ψ_b](b)
        let b = d.brackets();
        assert!((b.psi_a[0] + b.psi_b[1]).norm() < 1e-10);
    }

    #[test]
    fn half_order_weyl_solution_and_scalar() {
        let z = SpectralPoint::from_parts(-1.0, 0.0);
        let d = half_bessel(z);
        let w = d.w().unwrap();
        for &x in &[0.01, 0.5, 3.0] {
            assert!((w.state(x).unwrap().y - C::new((-x).exp(), 0.0)).norm() < 1e-8 * (-x).exp());
        }
        assert!((d.brackets().green + 1.0).norm() < 1e-8);
        let k = krein_scalar_one_lc(PI / 3.0, &d).unwrap();
        match k.form() {
            crate::krein::CorrectionForm::Scalar { k } => {
                assert!((k - (1.0 / (PI / 3.0).tan() + 1.0)).norm() < 1e-8, "{k}");
            }
            _ => panic!("scalar expected"),
        }
        // θ = 3π/4 makes −1 an eigenvalue
        let err = krein_scalar_one_lc(0.75 * PI, &d);
        assert!(matches!(err, Err(Error::SpectralPoint { .. })), "{err:?}");
    }

    #[test]
    fn half_order_trace_and_symmetry() {
        let z = SpectralPoint::from_parts(-2.0, 0.0);
        let d = half_bessel(z);
        let p = d.problem().clone();
        let op = ResolventOp::new(Extension::separated_one_lc(PI / 4.0).unwrap(), d).unwrap();
        let t = trace_resolvent_diff(op.correction().unwrap(), &p, &QuadConfig::default()).unwrap();
        let exact = 1.0 / (2.0 * 2f64.sqrt() * (1.0 + 2f64.sqrt()));
        assert!((t - exact).norm() < 1e-7 * exact, "{t}");
        for &(x, y) in &[(0.1, 2.0), (0.5, 0.6), (1.5, 4.0)] {
            let (g1, g2) = (op.kernel(x, y).unwrap(), op.kernel(y, x).unwrap());
            assert!((g1 - g2).norm() <= 1e-9 * g1.norm());
        }
        let same = trace_between_one_lc(op.defect(), 1.0, 1.0, &QuadConfig::default()).unwrap();
        assert_eq!(same, C::new(0.0, 0.0));
    }

    #[test]
    fn trace_conjugation_symmetry() {
        let z = SpectralPoint::from_parts(-1.0, 0.5);
        let t = |z: SpectralPoint| {
            let d = half_bessel(z);
            let p = d.problem().clone();
            let c = krein_scalar_one_lc(1.0, &d).unwrap();
            trace_resolvent_diff(&c, &p, &QuadConfig::default()).unwrap()
        };
        let (a, b) = (t(z), t(z.conj()));
        assert!((a - b.conj()).norm() < 1e-8 * a.norm());
    }

    #[test]
    fn resolvent_residual_regular() {
        let (p, setting) = regular();
        let z = SpectralPoint::from_parts(-1.0, 0.3);
        let d = defect_solutions(&p, &setting, z, &DefectConfig::for_problem(&p)).unwrap();
        let op = ResolventOp::new(Extension::separated_two_lc(1.0, 2.0).unwrap(), d).unwrap();
        let bump = |x: f64| {
            let t = (x - 0.5) / 0.3;
            if t.abs() < 1.0 { C::new((-1.0 / (1.0 - t * t)).exp(), 0.0) } else { C::new(0.0, 0.0) }
        };
        let v = resolvent_apply(&op, Supported::new(bump, 0.2, 0.8)).unwrap();
        let grid: Vec<f64> = (0..=400).map(|k| 0.05 + 0.9 * k as f64 / 400.0).collect();
        let res = v.residual_norm(&grid).unwrap();
        assert!(res < 1e-6, "{res}");
        // the result meets the boundary conditions: cos α v(0) − sin α v′(0) = 0
        let s = v.eval(0.0).unwrap();
        assert!((s.y * 1f64.cos() - s.py * 1f64.sin()).norm() < 1e-9);
        let s = v.eval(1.0).unwrap();
        assert!((s.y * 2f64.cos() - s.py * 2f64.sin()).norm() < 1e-9);
    }

    #[test]
    fn coupled_parameters_and_membership() {
        let (p, setting) = regular();
        let d = defect_solutions(&p, &setting, SpectralPoint::from_parts(-1.0, 0.0), &DefectConfig::for_problem(&p)).unwrap();
        assert!(matches!(krein_coupled([[0.5, 0.0], [0.0, 1.0]], 0.0, &d), Err(Error::Parameter(_))));
        assert!(krein_coupled([[1.0, 0.0], [0.0, 1.0]], 0.0, &d).is_ok());
        let reference = Extension::separated_two_lc(0.0, 0.0).unwrap();
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        let s1 = BracketData { phi_a: zero, psi_a: one, phi_b: zero, psi_b: zero };
        assert!(common_part_membership(&reference, &Extension::separated_two_lc(0.0, 1.0).unwrap(), &s1, 1e-12));
        let coupled = Extension::coupled([[1.0, 0.0], [0.5, 1.0]], 0.3).unwrap();
        let bad = BracketData { phi_a: zero, psi_a: one, phi_b: zero, psi_b: one };
        assert!(!common_part_membership(&reference, &coupled, &bad, 1e-12));
        let good = BracketData { psi_b: C::from_polar(1.0, 0.3), ..bad };
        assert!(common_part_membership(&reference, &coupled, &good, 1e-12));
        for e in [reference, coupled, Extension::separated_two_lc(2.0, 1.0).unwrap()] {
            assert!(common_part_membership(&e, &reference, &BracketData::zero(), 1e-12));
        }
    }
}
