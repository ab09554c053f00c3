use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Argument of `z` in [0, 2π). The positive real axis maps to 0.
pub fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a >= 0.0 {
        return a;
    }
    let shifted = a + TAU;
    if shifted >= TAU {
        TAU.next_down()
    } else {
        shifted
    }
}

/// A complex spectral parameter together with its argument in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    value: Complex64,
    arg: f64,
}

impl SpectralPoint {
    pub fn new(value: Complex64) -> Self {
        // -0.0 imaginary parts are folded onto the upper side
        let value = Complex64::new(value.re, if value.im == 0.0 { 0.0 } else { value.im });
        SpectralPoint { value, arg: arg_0_2pi(value) }
    }

    pub fn from_parts(re: f64, im: f64) -> Self {
        Self::new(Complex64::new(re, im))
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.value.re == 0.0 && self.value.im == 0.0
    }

    pub fn conj(&self) -> SpectralPoint {
        SpectralPoint::new(self.value.conj())
    }

    /// z^{1/2} on the convention branch; its imaginary part is never negative.
    pub fn sqrt(&self) -> Complex64 {
        Complex64::from_polar(self.norm().sqrt(), 0.5 * self.arg)
    }

    /// True when z lies on [0, ∞), the spectrum of the Friedrichs-type references.
    pub fn on_nonnegative_axis(&self) -> bool {
        self.value.im == 0.0 && self.value.re >= 0.0
    }

    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

impl From<Complex64> for SpectralPoint {
    fn from(z: Complex64) -> Self {
        SpectralPoint::new(z)
    }
}

/// |z|^β e^{iβ arg z} with arg z ∈ [0, 2π).
///
/// The exponent is intended to lie in (−1, 1); other real exponents are
/// evaluated by the same rule.
pub fn complex_pow(z: SpectralPoint, beta: f64) -> Result<Complex64> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("non-finite exponent {beta}")));
    }
    if z.is_zero() {
        return if beta < 0.0 {
            Err(Error::Domain(format!("0 raised to negative power {beta}")))
        } else if beta == 0.0 {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            Ok(Complex64::new(0.0, 0.0))
        };
    }
    Ok(Complex64::from_polar(z.norm().powf(beta), beta * z.arg()))
}

/// ln|z| + i arg z with arg z ∈ [0, 2π).
pub fn complex_log(z: SpectralPoint) -> Result<Complex64> {
    if z.is_zero() {
        return Err(Error::Domain("logarithm of zero".into()));
    }
    Ok(Complex64::new(z.norm().ln(), z.arg()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn documented_values() {
        let i = complex_pow(SpectralPoint::from_parts(-1.0, 0.0), 0.5).unwrap();
        assert!((i - c(0.0, 1.0)).norm() < 1e-15);
        let one = complex_pow(SpectralPoint::from_parts(1.0, 0.0), 0.37).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-15);
        let r = complex_pow(SpectralPoint::from_parts(0.0, 1.0), 0.5).unwrap();
        assert!((r - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
        let l = complex_log(SpectralPoint::from_parts(-1.0, 0.0)).unwrap();
        assert!((l - c(0.0, PI)).norm() < 1e-15);
        let l = complex_log(SpectralPoint::from_parts(std::f64::consts::E, 0.0)).unwrap();
        assert!((l - c(1.0, 0.0)).norm() < 1e-15);
        let l = complex_log(SpectralPoint::from_parts(0.0, 0.5)).unwrap();
        assert!((l - c(0.5f64.ln(), PI / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_handling() {
        let z = SpectralPoint::from_parts(0.0, 0.0);
        assert!(complex_pow(z, -0.5).is_err());
        assert_eq!(complex_pow(z, 0.5).unwrap(), c(0.0, 0.0));
        assert!(complex_log(z).is_err());
    }

    #[test]
    fn arg_range_edges() {
        assert_eq!(arg_0_2pi(c(2.0, 0.0)), 0.0);
        assert_eq!(arg_0_2pi(c(2.0, -0.0)), 0.0);
        assert!(arg_0_2pi(c(1.0, -1e-300)) < TAU);
        assert_eq!(SpectralPoint::from_parts(-3.0, -0.0).arg(), PI);
        let lower = SpectralPoint::from_parts(-1.0, -1.0);
        assert!((lower.arg() - 1.25 * PI).abs() < 1e-15);
        assert!(lower.sqrt().im >= 0.0);
    }

    proptest! {
        #[test]
        fn sqrt_has_nonnegative_imaginary_part(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            prop_assume!(re != 0.0 || im != 0.0);
            prop_assert!(SpectralPoint::from_parts(re, im).sqrt().im >= 0.0);
        }

        #[test]
        fn powers_compose(re in -50f64..50.0, im in -50f64..50.0, a in -0.49f64..0.49, b in -0.49f64..0.49) {
            prop_assume!(im.abs() > 1e-9 || re < 0.0);
            let z = SpectralPoint::from_parts(re, im);
            prop_assume!(z.norm() > 1e-6);
            let lhs = complex_pow(z, a).unwrap() * complex_pow(z, b).unwrap();
            let rhs = complex_pow(z, a + b).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }

        #[test]
        fn exp_inverts_log(lr in -6f64..6.0, t in 0f64..TAU) {
            let z = Complex64::from_polar(10f64.powf(lr), t);
            let back = complex_log(SpectralPoint::new(z)).unwrap().exp();
            prop_assert!((back - z).norm() <= 1e-12 * z.norm());
        }
    }
}
