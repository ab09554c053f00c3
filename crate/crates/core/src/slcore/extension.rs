use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Self-adjoint boundary parameters relative to the boundary bases.
///
/// One limit-circle endpoint: cos θ [g, φ_a](a) + sin θ [g, ψ_a](a) = 0.
/// Two limit-circle endpoints, separated: the same at a with α and at b
/// with β. Coupled: ([g, φ_b](b), [g, ψ_b](b))ᵀ = e^{iη} R ([g, φ_a](a), [g, ψ_a](a))ᵀ
/// with R ∈ SL₂(ℝ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Extension {
    SeparatedOneLc { theta: f64 },
    SeparatedTwoLc { alpha: f64, beta: f64 },
    Coupled { r: [[f64; 2]; 2], eta: f64 },
}

fn angle(name: &str, v: f64) -> Result<()> {
    if !(0.0..std::f64::consts::PI).contains(&v) {
        return Err(Error::Parameter(format!("{name} = {v} outside [0, π)")));
    }
    Ok(())
}

/// Endpoint brackets of a function against both boundary bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketData {
    pub phi_a: C,
    pub psi_a: C,
    pub phi_b: C,
    pub psi_b: C,
}

impl BracketData {
    pub fn zero() -> Self {
        let z = C::new(0.0, 0.0);
        BracketData { phi_a: z, psi_a: z, phi_b: z, psi_b: z }
    }

    fn scale(&self) -> f64 {
        [self.phi_a, self.psi_a, self.phi_b, self.psi_b].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Extension {
    pub fn separated_one_lc(theta: f64) -> Result<Self> {
        angle("theta", theta)?;
        Ok(Extension::SeparatedOneLc { theta })
    }

    pub fn separated_two_lc(alpha: f64, beta: f64) -> Result<Self> {
        angle("alpha", alpha)?;
        angle("beta", beta)?;
        Ok(Extension::SeparatedTwoLc { alpha, beta })
    }

    pub fn coupled(r: [[f64; 2]; 2], eta: f64) -> Result<Self> {
        angle("eta", eta)?;
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        if (det - 1.0).abs() > 1e-12 || r.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("R must lie in SL2(R), det R = {det}")));
        }
        Ok(Extension::Coupled { r, eta })
    }

    pub fn validate(&self) -> Result<Self> {
        match *self {
            Extension::SeparatedOneLc { theta } => Self::separated_one_lc(theta),
            Extension::SeparatedTwoLc { alpha, beta } => Self::separated_two_lc(alpha, beta),
            Extension::Coupled { r, eta } => Self::coupled(r, eta),
        }
    }

    /// Residuals of the boundary conditions on the given bracket data.
    pub fn residuals(&self, d: &BracketData) -> Vec<C> {
        match *self {
            Extension::SeparatedOneLc { theta } => vec![d.phi_a * theta.cos() + d.psi_a * theta.sin()],
            Extension::SeparatedTwoLc { alpha, beta } => vec![
                d.phi_a * alpha.cos() + d.psi_a * alpha.sin(),
                d.phi_b * beta.cos() + d.psi_b * beta.sin(),
            ],
            Extension::Coupled { r, eta } => {
                let e = C::from_polar(1.0, eta);
                vec![
                    d.phi_b - e * (d.phi_a * r[0][0] + d.psi_a * r[0][1]),
                    d.psi_b - e * (d.phi_a * r[1][0] + d.psi_a * r[1][1]),
                ]
            }
        }
    }

    pub fn satisfied_by(&self, d: &BracketData, rel_tol: f64) -> bool {
        let tol = rel_tol * d.scale().max(1.0);
        self.residuals(d).iter().all(|r| r.norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_validation() {
        assert!(Extension::separated_one_lc(3.2).is_err());
        assert!(Extension::separated_one_lc(0.0).is_ok());
        assert!(Extension::coupled([[0.5, 0.0], [0.0, 1.0]], 0.0).is_err());
        assert!(Extension::coupled([[2.0, 1.0], [1.0, 1.0]], 0.3).is_ok());
        let json = serde_json::to_string(&Extension::SeparatedTwoLc { alpha: 0.1, beta: 0.2 }).unwrap();
        assert!(json.contains("separated-two-lc"));
    }

    #[test]
    fn dirichlet_data_satisfies_theta_zero() {
        let mut d = BracketData::zero();
        d.psi_a = C::new(2.0, 1.0);
        assert!(Extension::separated_one_lc(0.0).unwrap().satisfied_by(&d, 1e-12));
        assert!(!Extension::separated_one_lc(1.0).unwrap().satisfied_by(&d, 1e-12));
    }
}
