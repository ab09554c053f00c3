use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::SpectralPoint;

type C = Complex64;

/// A boundary functional c₀ g(a) + c₁ g′(a) + c₂ g(b) + c₃ g′(b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRow(pub [C; 4]);

/// Self-adjoint conditions for −y″ on a bounded interval, written with
/// [g, φ_c](c) = g(c) and [g, ψ_c](c) = −g′(c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegularConditions {
    /// cos α g(a) − sin α g′(a) = 0, cos β g(b) − sin β g′(b) = 0.
    Separated { alpha: f64, beta: f64 },
    /// (g(b), −g′(b))ᵀ = e^{iη} R (g(a), −g′(a))ᵀ.
    Coupled { r: [[f64; 2]; 2], eta: f64 },
}

impl RegularConditions {
    pub fn rows(&self) -> [BoundaryRow; 2] {
        let z = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        match *self {
            RegularConditions::Separated { alpha, beta } => [
                BoundaryRow([alpha.cos().into(), (-alpha.sin()).into(), z, z]),
                BoundaryRow([z, z, beta.cos().into(), (-beta.sin()).into()]),
            ],
            RegularConditions::Coupled { r, eta } => {
                let e = C::from_polar(1.0, eta);
                [
                    BoundaryRow([-e * r[0][0], e * r[0][1], one, z]),
                    BoundaryRow([-e * r[1][0], e * r[1][1], z, -one]),
                ]
            }
        }
    }
}

/// Kernel of (T − z)^{−1} for T = −d²/dx² on (a, b) with the given
/// conditions: the free kernel i e^{ik|x−y|}/(2k), k = z^{1/2}, plus the
/// combination of cos kx and sin kx that restores the conditions.
pub fn regular_green(a: f64, b: f64, cond: &RegularConditions, z: SpectralPoint, x: f64, y: f64) -> Result<C> {
    if z.is_zero() {
        return Err(Error::Domain("z = 0".into()));
    }
    if !(a < b) || !(a..=b).contains(&x) || !(a..=b).contains(&y) {
        return Err(Error::Domain(format!("points ({x}, {y}) outside [{a}, {b}]")));
    }
    let k = z.sqrt();
    let i = C::new(0.0, 1.0);
    let free = |x: f64| i * (i * k * (x - y).abs()).exp() / (k * 2.0);
    // boundary data (g(a), g′(a), g(b), g′(b)) of the free part and of cos, sin
    let pa = free(a);
    let pb = free(b);
    let p = [pa, -i * k * pa, pb, i * k * pb];
    let cs = [(k * a).cos(), -k * (k * a).sin(), (k * b).cos(), -k * (k * b).sin()];
    let sn = [(k * a).sin(), k * (k * a).cos(), (k * b).sin(), k * (k * b).cos()];
    let dot = |row: &BoundaryRow, v: &[C; 4]| (0..4).map(|j| row.0[j] * v[j]).sum::<C>();
    let [r1, r2] = cond.rows();
    let m = [[dot(&r1, &cs), dot(&r1, &sn)], [dot(&r2, &cs), dot(&r2, &sn)]];
    let rhs = [-dot(&r1, &p), -dot(&r2, &p)];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let size = m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-13 * size * size {
        return Err(Error::SpectralPoint { z: z.value(), reason: "z is an eigenvalue of the extension".into() });
    }
    let c1 = (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det;
    let c2 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
    Ok(free(x) + c1 * (k * x).cos() + c2 * (k * x).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn dirichlet_at_minus_one() {
        // sinh(min)·sinh(1 − max)/sinh(1)
        let z = SpectralPoint::from_parts(-1.0, 0.0);
        let cond = RegularConditions::Separated { alpha: 0.0, beta: 0.0 };
        for (x, y) in [(0.2, 0.7), (0.9, 0.1), (0.5, 0.5)] {
            let g = regular_green(0.0, 1.0, &cond, z, x, y).unwrap();
            let (lo, hi) = (f64::min(x, y), f64::max(x, y));
            let exact = lo.sinh() * (1.0 - hi).sinh() / 1f64.sinh();
            assert!((g.re - exact).abs() < 1e-14 && g.im.abs() < 1e-14);
        }
    }

    #[test]
    fn neumann_and_periodic() {
        let z = SpectralPoint::from_parts(-1.0, 0.0);
        let cond = RegularConditions::Separated { alpha: FRAC_PI_2, beta: FRAC_PI_2 };
        // cosh(min)·cosh(1 − max)/sinh(1)
        let g = regular_green(0.0, 1.0, &cond, z, 0.3, 0.6).unwrap();
        assert!((g.re - 0.3f64.cosh() * 0.4f64.cosh() / 1f64.sinh()).abs() < 1e-14);
        // periodic: cosh(|x−y| − 1/2)/(2 sinh(1/2)); R = −I, η = π
        let cond = RegularConditions::Coupled { r: [[-1.0, 0.0], [0.0, -1.0]], eta: std::f64::consts::PI };
        let g = regular_green(0.0, 1.0, &cond, z, 0.2, 0.9).unwrap();
        assert!((g.re - (0.7f64 - 0.5).cosh() / (2.0 * 0.5f64.sinh())).abs() < 1e-13, "{g}");
    }
}
