use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_real, QuadConfig};

pub type CoefFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    A,
    B,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::A => write!(f, "a"),
            Endpoint::B => write!(f, "b"),
        }
    }
}

/// Built-in coefficient families; `Custom` covers programmatic handles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Bessel { nu: f64 },
    RegularFree,
    Tabulated,
    Custom,
}

/// −(p y′)′ + q y = z r y on (a, b).
#[derive(Clone)]
pub struct SLProblem {
    a: f64,
    b: f64,
    p: CoefFn,
    q: CoefFn,
    r: CoefFn,
    family: Family,
}

impl fmt::Debug for SLProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("family", &self.family)
            .finish()
    }
}

impl SLProblem {
    pub fn new(a: f64, b: f64, p: CoefFn, q: CoefFn, r: CoefFn) -> Result<Self> {
        Self::with_family(a, b, p, q, r, Family::Custom)
    }

    fn with_family(a: f64, b: f64, p: CoefFn, q: CoefFn, r: CoefFn, family: Family) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::Parameter(format!("need a < b, got ({a}, {b})")));
        }
        Ok(SLProblem { a, b, p, q, r, family })
    }

    /// τ_ν = −d²/dx² + (ν² − 1/4)/x² on (0, ∞).
    pub fn bessel(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::Parameter(format!("Bessel order must be ≥ 0, got {nu}")));
        }
        let c = nu * nu - 0.25;
        Self::with_family(
            0.0,
            f64::INFINITY,
            Arc::new(|_| 1.0),
            Arc::new(move |x| c / (x * x)),
            Arc::new(|_| 1.0),
            Family::Bessel { nu },
        )
    }

    /// −y″ on (a, b) with both endpoints regular.
    pub fn regular_free(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Parameter("regular-free needs a finite interval".into()));
        }
        Self::with_family(a, b, Arc::new(|_| 1.0), Arc::new(|_| 0.0), Arc::new(|_| 1.0), Family::RegularFree)
    }

    /// Piecewise-linear interpolation of tabulated coefficients.
    pub fn tabulated(a: f64, b: f64, table: &Tabulated) -> Result<Self> {
        table.check()?;
        let p = Arc::new(Interp::new(&table.x, &table.p));
        let q = Arc::new(Interp::new(&table.x, &table.q));
        let r = Arc::new(Interp::new(&table.x, &table.r));
        Self::with_family(
            a,
            b,
            Arc::new(move |x| p.eval(x)),
            Arc::new(move |x| q.eval(x)),
            Arc::new(move |x| r.eval(x)),
            Family::Tabulated,
        )
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn endpoint(&self, e: Endpoint) -> f64 {
        match e {
            Endpoint::A => self.a,
            Endpoint::B => self.b,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn bessel_order(&self) -> Option<f64> {
        match self.family {
            Family::Bessel { nu } => Some(nu),
            _ => None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x < self.b || (x == self.a && self.a.is_finite() && self.regular_at(Endpoint::A))
            || (x == self.b && self.b.is_finite() && self.regular_at(Endpoint::B))
    }

    /// Endpoints where the coefficients may be evaluated directly.
    pub fn regular_at(&self, e: Endpoint) -> bool {
        matches!(self.family, Family::RegularFree) && self.endpoint(e).is_finite()
    }

    pub fn p(&self, x: f64) -> Result<f64> {
        let v = (self.p)(x);
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Coefficient { name: "p", x });
        }
        Ok(v)
    }

    pub fn q(&self, x: f64) -> Result<f64> {
        let v = (self.q)(x);
        if !v.is_finite() {
            return Err(Error::Coefficient { name: "q", x });
        }
        Ok(v)
    }

    pub fn r(&self, x: f64) -> Result<f64> {
        let v = (self.r)(x);
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Coefficient { name: "r", x });
        }
        Ok(v)
    }

    /// Samples p, r > 0 and finite q on `n` interior points, and integrates
    /// 1/p, |q|, r over probe subintervals between them.
    pub fn validate(&self, n: usize) -> Result<()> {
        let pts = self.probe_points(n.max(2));
        for &x in &pts {
            self.p(x)?;
            self.q(x)?;
            self.r(x)?;
        }
        let cfg = QuadConfig { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 500 };
        for w in pts.windows(2) {
            for (name, f) in [("p", &self.p), ("q", &self.q), ("r", &self.r)] {
                let g = |x: f64| {
                    let v = f(x);
                    if name == "p" {
                        1.0 / v
                    } else {
                        v.abs()
                    }
                };
                integrate_real(g, w[0], w[1], &cfg)
                    .map_err(|_| Error::Coefficient { name, x: 0.5 * (w[0] + w[1]) })?;
            }
        }
        Ok(())
    }

    fn probe_points(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = match (self.a.is_finite(), self.b.is_finite()) {
            (true, true) => (self.a, self.b),
            (true, false) => (self.a, self.a + 50.0),
            (false, true) => (self.b - 50.0, self.b),
            (false, false) => (-50.0, 50.0),
        };
        (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProblemSpec =
            serde_json::from_str(text).map_err(|e| Error::Parameter(format!("problem JSON: {e}")))?;
        spec.build()
    }

    /// Parses a family name such as `bessel:0.5` or `regular-free`.
    pub fn from_family_name(name: &str) -> Result<Self> {
        if let Some(nu) = name.strip_prefix("bessel:") {
            let nu: f64 = nu
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad Bessel order in {name:?}")))?;
            return Self::bessel(nu);
        }
        if name == "regular-free" {
            return Self::regular_free(0.0, 1.0);
        }
        Err(Error::Parameter(format!("unknown problem family {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

impl Tabulated {
    fn check(&self) -> Result<()> {
        let n = self.x.len();
        if n < 2 || self.p.len() != n || self.q.len() != n || self.r.len() != n {
            return Err(Error::Parameter("tabulated columns must share a length ≥ 2".into()));
        }
        if self.x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("tabulated x must be strictly increasing".into()));
        }
        Ok(())
    }
}

struct Interp {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Interp {
    fn new(x: &[f64], y: &[f64]) -> Self {
        Interp { x: x.to_vec(), y: y.to_vec() }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if !(t >= self.x[0] && t <= self.x[n - 1]) {
            return f64::NAN;
        }
        let i = self.x.partition_point(|&v| v <= t).clamp(1, n - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let s = (t - x0) / (x1 - x0);
        self.y[i - 1] * (1.0 - s) + self.y[i] * s
    }
}

/// Interval bound that also accepts "inf" / "-inf" strings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Num(f64),
    Text(BoundText),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundText {
    #[serde(rename = "inf", alias = "infinity", alias = "+inf")]
    Inf,
    #[serde(rename = "-inf", alias = "-infinity")]
    NegInf,
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::Num(v) => v,
            Bound::Text(BoundText::Inf) => f64::INFINITY,
            Bound::Text(BoundText::NegInf) => f64::NEG_INFINITY,
        }
    }
}

/// Declarative problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub interval: Option<[Bound; 2]>,
    pub family: Option<String>,
    pub tabulated: Option<Tabulated>,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<SLProblem> {
        match (&self.family, &self.tabulated) {
            (Some(name), None) => {
                let base = SLProblem::from_family_name(name)?;
                match (self.interval, base.family.clone()) {
                    (None, _) => Ok(base),
                    (Some([a, b]), Family::RegularFree) => SLProblem::regular_free(a.value(), b.value()),
                    (Some([a, b]), _) if a.value() == base.a && b.value() == base.b => Ok(base),
                    (Some(_), _) => Err(Error::Parameter(format!(
                        "family {name:?} fixes its own interval"
                    ))),
                }
            }
            (None, Some(table)) => {
                let [a, b] = self.interval.ok_or_else(|| {
                    Error::Parameter("tabulated problems need an interval".into())
                })?;
                SLProblem::tabulated(a.value(), b.value(), table)
            }
            _ => Err(Error::Parameter("give exactly one of `family` or `tabulated`".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_families() {
        let p = SLProblem::from_json(r#"{"family": "bessel:0.3"}"#).unwrap();
        assert_eq!(p.bessel_order(), Some(0.3));
        assert_eq!(p.b(), f64::INFINITY);
        let p = SLProblem::from_json(r#"{"interval": [0, "inf"], "family": "bessel:0.5"}"#).unwrap();
        assert!((p.q(2.0).unwrap()).abs() < 1e-15);
        let p = SLProblem::from_json(r#"{"interval": [-1, 2], "family": "regular-free"}"#).unwrap();
        assert_eq!((p.a(), p.b()), (-1.0, 2.0));
        assert!(SLProblem::from_json(r#"{"family": "airy"}"#).is_err());
        assert!(SLProblem::from_json(r#"{"interval": [1, 2], "family": "bessel:0.5"}"#).is_err());
    }

    #[test]
    fn tabulated_interpolates() {
        let text = r#"{"interval": [0, 2], "tabulated": {"x": [0, 1, 2], "p": [1, 3, 1], "q": [0, 0, 4], "r": [1, 1, 1]}}"#;
        let p = SLProblem::from_json(text).unwrap();
        assert!((p.p(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((p.q(1.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(p.p(2.5).is_err());
        p.validate(8).unwrap();
    }

    #[test]
    fn rejects_bad_coefficients() {
        let bad = SLProblem::new(0.0, 1.0, Arc::new(|x| x - 0.5), Arc::new(|_| 0.0), Arc::new(|_| 1.0)).unwrap();
        assert!(matches!(bad.validate(10), Err(Error::Coefficient { name: "p", .. })));
        assert!(SLProblem::new(1.0, 1.0, Arc::new(|_| 1.0), Arc::new(|_| 0.0), Arc::new(|_| 1.0)).is_err());
        SLProblem::bessel(0.7).unwrap().validate(20).unwrap();
    }
}
