use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (y, p·y′) at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiState {
    pub x: f64,
    pub y: Complex64,
    pub py: Complex64,
}

impl QuasiState {
    pub fn new(x: f64, y: Complex64, py: Complex64) -> Self {
        QuasiState { x, y, py }
    }

    pub fn real(x: f64, y: f64, py: f64) -> Self {
        QuasiState { x, y: Complex64::new(y, 0.0), py: Complex64::new(py, 0.0) }
    }

    pub fn conj(&self) -> Self {
        QuasiState { x: self.x, y: self.y.conj(), py: self.py.conj() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        QuasiState { x: self.x, y: self.y * c, py: self.py * c }
    }
}

fn same_point(f: &QuasiState, g: &QuasiState) -> bool {
    f.x == g.x || (f.x - g.x).abs() <= 1e-12 * f.x.abs().max(g.x.abs()).max(1e-300)
}

/// [f, g] = f·conj(p g′) − (p f′)·conj(g).
pub fn bracket(f: &QuasiState, g: &QuasiState) -> Result<Complex64> {
    if !same_point(f, g) {
        return Err(Error::Usage(format!("bracket of states at {} and {}", f.x, g.x)));
    }
    Ok(raw_bracket(f, g))
}

pub(crate) fn raw_bracket(f: &QuasiState, g: &QuasiState) -> Complex64 {
    f.y * g.py.conj() - f.py * g.y.conj()
}

/// Magnitude of the two products whose difference forms the bracket.
pub(crate) fn bracket_scale(f: &QuasiState, g: &QuasiState) -> f64 {
    f.y.norm() * g.py.norm() + f.py.norm() * g.y.norm()
}

/// [f1,f2][f̄3,f4] + [f1,f3][f̄4,f2] + [f1,f4][f̄2,f3], which vanishes identically.
pub fn plucker_residual(f: [&QuasiState; 4]) -> Result<Complex64> {
    let [f1, f2, f3, f4] = f;
    for g in [f2, f3, f4] {
        if !same_point(f1, g) {
            return Err(Error::Usage("Plücker quadruple at different points".into()));
        }
    }
    Ok(raw_bracket(f1, f2) * raw_bracket(&f3.conj(), f4)
        + raw_bracket(f1, f3) * raw_bracket(&f4.conj(), f2)
        + raw_bracket(f1, f4) * raw_bracket(&f2.conj(), f3))
}

/// Natural size of the Plücker terms, for relative comparisons.
pub fn plucker_scale(f: [&QuasiState; 4]) -> f64 {
    let [f1, f2, f3, f4] = f;
    bracket_scale(f1, f2) * bracket_scale(&f3.conj(), f4)
        + bracket_scale(f1, f3) * bracket_scale(&f4.conj(), f2)
        + bracket_scale(f1, f4) * bracket_scale(&f2.conj(), f3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_self_bracket_vanishes() {
        let f = QuasiState::real(0.3, 1.7, -2.2);
        assert_eq!(bracket(&f, &f).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn basis_normalization_example() {
        // φ = x, ψ = 1 at x = 0.5
        let phi = QuasiState::real(0.5, 0.5, 1.0);
        let psi = QuasiState::real(0.5, 1.0, 0.0);
        assert_eq!(bracket(&psi, &phi).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn mismatched_points() {
        let f = QuasiState::real(0.3, 1.0, 0.0);
        let g = QuasiState::real(0.4, 1.0, 0.0);
        assert!(matches!(bracket(&f, &g), Err(Error::Usage(_))));
    }

    fn state() -> impl Strategy<Value = QuasiState> {
        (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0)
            .prop_map(|(a, b, c2, d)| QuasiState::new(1.0, c(a, b), c(c2, d)))
    }

    proptest! {
        #[test]
        fn plucker_identity(f1 in state(), f2 in state(), f3 in state(), f4 in state()) {
            let q = [&f1, &f2, &f3, &f4];
            let r = plucker_residual(q).unwrap();
            prop_assert!(r.norm() <= 1e-13 * plucker_scale(q).max(1.0));
        }

        #[test]
        fn sesquilinear(f in state(), g in state(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let s = c(a, b);
            let lhs = bracket(&f.scale(s), &g).unwrap();
            prop_assert!((lhs - s * bracket(&f, &g).unwrap()).norm() < 1e-12);
            let rhs = bracket(&f, &g.scale(s)).unwrap();
            prop_assert!((rhs - s.conj() * bracket(&f, &g).unwrap()).norm() < 1e-12);
            let anti = bracket(&g, &f).unwrap();
            prop_assert!((anti + bracket(&f, &g).unwrap().conj()).norm() < 1e-12);
        }
    }
}
