use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(x: f64) -> f64 {
    // valid for x >= 0.5
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Γ(x) for x > 0.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_real requires x > 0, got {x}")));
    }
    if x < 0.5 {
        Ok(PI / ((PI * x).sin() * lanczos(1.0 - x)))
    } else if x > 171.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(lanczos(x))
    }
}

/// 1/Γ(x) for any real x, zero at the poles.
pub(crate) fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        (PI * x).sin() * lanczos(1.0 - x) / PI
    } else {
        1.0 / lanczos(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(1.5).unwrap() - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 1e-11);
        assert!((gamma_real(0.1).unwrap() - 9.513_507_698_668_732).abs() < 1e-12);
        assert!(gamma_real(0.0).is_err());
        assert!(gamma_real(-1.5).is_err());
    }

    #[test]
    fn functional_equation() {
        for k in 1..200 {
            let x = 0.01 * k as f64;
            let lhs = gamma_real(x + 1.0).unwrap();
            let rhs = x * gamma_real(x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-13 * lhs, "x = {x}");
        }
    }

    #[test]
    fn reciprocal_through_reflection() {
        assert_eq!(recip_gamma(-2.0), 0.0);
        // Γ(−1/2) = −2√π
        assert!((recip_gamma(-0.5) + 1.0 / (2.0 * PI.sqrt())).abs() < 1e-14);
        assert!((recip_gamma(0.7) * gamma_real(0.7).unwrap() - 1.0).abs() < 1e-14);
    }
}
