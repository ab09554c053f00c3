use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::OdeConfig;
use crate::slcore::{
    bracket, bracket_limit, combination, integrate_span, solve_with_bracket_ic, BoundaryBasis, Endpoint, IcConfig,
    LimitConfig, QuasiState, SLProblem, Solution, SolutionEval,
};
use crate::specialfn::{complex_pow, SpectralPoint};

type C = Complex64;

/// Which endpoints are limit circle, with their boundary bases.
#[derive(Debug, Clone)]
pub enum Setting {
    /// Limit circle at a, limit point at b.
    OneLc { basis: BoundaryBasis },
    TwoLc { basis_a: BoundaryBasis, basis_b: BoundaryBasis },
}

impl Setting {
    pub fn basis_a(&self) -> &BoundaryBasis {
        match self {
            Setting::OneLc { basis } => basis,
            Setting::TwoLc { basis_a, .. } => basis_a,
        }
    }

    pub fn basis_b(&self) -> Option<&BoundaryBasis> {
        match self {
            Setting::OneLc { .. } => None,
            Setting::TwoLc { basis_b, .. } => Some(basis_b),
        }
    }
}

/// Endpoint brackets of the defect solutions that the Krein formulas use.
///
/// One limit-circle endpoint: `psi_a = [[w, ψ_a](a)]`, `psi_b` empty and
/// `green = [w, u_{z̄}](a)`. Two: `psi_a[j] = [u_j, ψ_a](a)`,
/// `psi_b[j] = [u_j, ψ_b](b)` and `green = [u_2, u_{z̄,1}](b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectBrackets {
    pub psi_a: Vec<C>,
    pub psi_b: Vec<C>,
    pub green: C,
}

/// Solutions of τy = z y entering the Krein identities at one z.
///
/// One limit-circle endpoint: `u = [u_z]` with [u_z, φ_a](a) = 0,
/// [u_z, ψ_a](a) = 1, and `w` the solution in L² near b with
/// [w_z, φ_a](a) = 1. Two: `u = [u_{z,1}, u_{z,2}]` with
/// [u_1, φ_a](a) = 0, [u_1, φ_b](b) = 1, [u_2, φ_a](a) = 1, [u_2, φ_b](b) = 0.
/// The z̄ partners are the complex conjugates of these.
#[derive(Clone)]
pub struct DefectSolutions {
    z: SpectralPoint,
    problem: SLProblem,
    setting: Setting,
    u: Vec<Solution>,
    w: Option<Solution>,
    brackets: DefectBrackets,
}

impl std::fmt::Debug for DefectSolutions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DefectSolutions(z = {}, {:?})", self.z.value(), self.brackets)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DefectConfig {
    pub ic: IcConfig,
    pub limit: LimitConfig,
    /// e-folds of decay between the reference point and the far start of
    /// the solution that is square integrable at an infinite endpoint.
    pub decay_efolds: f64,
    pub max_far: f64,
}

impl DefectConfig {
    pub fn for_problem(problem: &SLProblem) -> Self {
        let ic = IcConfig::for_problem(problem);
        DefectConfig { ic, limit: ic.limit, decay_efolds: 36.0, max_far: 1e4 }
    }
}

/// Endpoint bracket [f, g](e): evaluated directly at a regular endpoint,
/// extrapolated otherwise.
pub fn endpoint_bracket(
    problem: &SLProblem,
    f: &dyn SolutionEval,
    g: &dyn SolutionEval,
    e: Endpoint,
    cfg: &LimitConfig,
) -> Result<C> {
    let at = problem.endpoint(e);
    if problem.regular_at(e) {
        return bracket(&f.state(at)?, &g.state(at)?);
    }
    Ok(bracket_limit(f, g, at, e, cfg)?.value)
}

/// Bracket of two solutions at the same z against the conjugate of the
/// second, [f, conj g](x), which is constant in x; evaluated at an interior
/// point of the common domain.
fn interior_bracket_conj(problem: &SLProblem, f: &dyn SolutionEval, g: &dyn SolutionEval) -> Result<C> {
    let (fl, fh) = f.domain();
    let (gl, gh) = g.domain();
    let (lo, hi) = (fl.max(gl).max(problem.a()), fh.min(gh).min(problem.b()));
    let x = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        _ => return Err(Error::Domain("no interior point for the Wronskian".into())),
    };
    let x = if problem.a().is_finite() && problem.b().is_infinite() { (problem.a() + 1.0).clamp(lo, hi) } else { x };
    bracket(&f.state(x)?, &g.state(x)?.conj())
}

fn scaled(c: C, f: Solution) -> Solution {
    combination(vec![(c, f)])
}

impl DefectSolutions {
    /// Wraps given solutions, measuring every bracket the Krein formulas
    /// need.
    pub fn from_solutions(
        problem: &SLProblem,
        setting: Setting,
        z: SpectralPoint,
        u: Vec<Solution>,
        w: Option<Solution>,
        cfg: &LimitConfig,
    ) -> Result<Self> {
        let brackets = match &setting {
            Setting::OneLc { basis } => {
                let (Some(w), [u0]) = (&w, u.as_slice()) else {
                    return Err(Error::Usage("one limit-circle endpoint needs u and w".into()));
                };
                DefectBrackets {
                    psi_a: vec![endpoint_bracket(problem, w.as_ref(), basis.psi().as_ref(), Endpoint::A, cfg)?],
                    psi_b: vec![],
                    green: interior_bracket_conj(problem, w.as_ref(), u0.as_ref())?,
                }
            }
            Setting::TwoLc { basis_a, basis_b } => {
                let [u1, u2] = u.as_slice() else {
                    return Err(Error::Usage("two limit-circle endpoints need u1 and u2".into()));
                };
                let mut psi_a = Vec::new();
                let mut psi_b = Vec::new();
                for uj in [u1, u2] {
                    psi_a.push(endpoint_bracket(problem, uj.as_ref(), basis_a.psi().as_ref(), Endpoint::A, cfg)?);
                    psi_b.push(endpoint_bracket(problem, uj.as_ref(), basis_b.psi().as_ref(), Endpoint::B, cfg)?);
                }
                DefectBrackets { psi_a, psi_b, green: interior_bracket_conj(problem, u2.as_ref(), u1.as_ref())? }
            }
        };
        Self::with_brackets(problem, setting, z, u, w, brackets)
    }

    /// Wraps given solutions with brackets known in closed form.
    pub fn with_brackets(
        problem: &SLProblem,
        setting: Setting,
        z: SpectralPoint,
        u: Vec<Solution>,
        w: Option<Solution>,
        brackets: DefectBrackets,
    ) -> Result<Self> {
        if brackets.green.norm() < 1e-14 {
            return Err(Error::SpectralPoint { z: z.value(), reason: "Green's function denominator vanishes".into() });
        }
        Ok(DefectSolutions { z, problem: problem.clone(), setting, u, w, brackets })
    }

    pub fn z(&self) -> SpectralPoint {
        self.z
    }

    pub fn problem(&self) -> &SLProblem {
        &self.problem
    }

    pub fn setting(&self) -> &Setting {
        &self.setting
    }

    pub fn u(&self) -> &[Solution] {
        &self.u
    }

    pub fn w(&self) -> Option<&Solution> {
        self.w.as_ref()
    }

    pub fn brackets(&self) -> &DefectBrackets {
        &self.brackets
    }

    /// Solutions (left, right) of the reference Green's function
    /// G(x, y) = left(min)·right(max)/green.
    pub fn green_pair(&self) -> (&Solution, &Solution) {
        match &self.setting {
            Setting::OneLc { .. } => (&self.u[0], self.w.as_ref().expect("one-LC defect carries w")),
            Setting::TwoLc { .. } => (&self.u[0], &self.u[1]),
        }
    }
}

/// Numerically constructs the defect solutions at z.
///
/// Solutions fixed by endpoint brackets come from the two-solution
/// construction of [`solve_with_bracket_ic`]. The solution square integrable
/// at an infinite endpoint b is integrated inward from a far point where it
/// is started on its decaying WKB branch; the growing branch then dies out
/// toward the interior.
pub fn defect_solutions(problem: &SLProblem, setting: &Setting, z: SpectralPoint, cfg: &DefectConfig) -> Result<DefectSolutions> {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    match setting {
        Setting::OneLc { basis } => {
            if basis.endpoint() != Endpoint::A {
                return Err(Error::Usage("the limit-circle endpoint must be a".into()));
            }
            let u = solve_with_bracket_ic(problem, z, basis, zero, one, &cfg.ic)?;
            let w = decaying_solution(problem, z, cfg)?;
            let n = endpoint_bracket(problem, &w, basis.phi().as_ref(), Endpoint::A, &cfg.limit)?;
            if n.norm() < 1e-14 * w.state(cfg.ic.x_ref)?.y.norm().max(1e-300) {
                return Err(Error::SpectralPoint { z: z.value(), reason: "[w, φ_a](a) vanishes".into() });
            }
            let w = scaled(n.inv(), Arc::new(w));
            DefectSolutions::from_solutions(problem, setting.clone(), z, vec![Arc::new(u)], Some(w), &cfg.limit)
        }
        Setting::TwoLc { basis_a, basis_b } => {
            let ua = solve_with_bracket_ic(problem, z, basis_a, zero, one, &cfg.ic)?;
            let ub = solve_with_bracket_ic(problem, z, basis_b, zero, one, &cfg.ic)?;
            let na = endpoint_bracket(problem, &ua, basis_b.phi().as_ref(), Endpoint::B, &cfg.limit)?;
            let nb = endpoint_bracket(problem, &ub, basis_a.phi().as_ref(), Endpoint::A, &cfg.limit)?;
            if na.norm() < 1e-14 || nb.norm() < 1e-14 {
                return Err(Error::SpectralPoint { z: z.value(), reason: "z is an eigenvalue of the reference".into() });
            }
            let u1 = scaled(na.inv(), Arc::new(ua));
            let u2 = scaled(nb.inv(), Arc::new(ub));
            DefectSolutions::from_solutions(problem, setting.clone(), z, vec![u1, u2], None, &cfg.limit)
        }
    }
}

fn decaying_solution(problem: &SLProblem, z: SpectralPoint, cfg: &DefectConfig) -> Result<crate::slcore::Trajectory> {
    if problem.b().is_finite() {
        return Err(Error::Regime("limit point at a finite endpoint b is not supported".into()));
    }
    let x_ref = cfg.ic.x_ref;
    let local = |x: f64| -> Result<C> {
        let ratio = SpectralPoint::new(z.value() * problem.r(x)? / problem.p(x)?);
        complex_pow(ratio, 0.5)
    };
    let kappa = local(x_ref + 10.0)?;
    if kappa.im <= 1e-8 {
        return Err(Error::SpectralPoint { z: z.value(), reason: "no decaying solution at infinity".into() });
    }
    let far = (x_ref + cfg.decay_efolds / kappa.im).max(cfg.ic.hi).min(cfg.max_far);
    let k = local(far)?;
    let start = QuasiState::new(far, C::new(1.0, 0.0), C::new(0.0, 1.0) * k * problem.p(far)?);
    let ode = OdeConfig { ..cfg.ic.ode };
    integrate_span(problem, z, start, cfg.ic.lo, far, &ode)
}
