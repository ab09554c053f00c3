//! Sequence acceleration for endpoint limits.

use num_complex::Complex64;

type C = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct Extrapolated {
    pub value: C,
    pub error: f64,
}

/// Wynn's epsilon algorithm. Every even column of the table is a candidate;
/// the one whose last two entries agree best is returned, with that
/// disagreement as the error estimate.
pub fn wynn_epsilon(seq: &[C]) -> Extrapolated {
    let n = seq.len();
    if n == 0 {
        return Extrapolated { value: C::new(f64::NAN, f64::NAN), error: f64::INFINITY };
    }
    if n == 1 {
        return Extrapolated { value: seq[0], error: f64::INFINITY };
    }
    let mut best = Extrapolated {
        value: seq[n - 1],
        error: (seq[n - 1] - seq[n - 2]).norm(),
    };
    let mut prev: Vec<C> = vec![C::new(0.0, 0.0); n + 1];
    let mut cur: Vec<C> = seq.to_vec();
    let mut column = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff.norm() == 0.0 {
                // converged exactly: nothing further can be gained
                if column % 2 == 0 {
                    return Extrapolated { value: cur[i + 1], error: 0.0 };
                }
                return best;
            }
            next.push(prev[i + 1] + diff.inv());
        }
        column += 1;
        if column % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let err = (next[m - 1] - next[m - 2]).norm();
            if err.is_finite() && err < best.error {
                best = Extrapolated { value: next[m - 1], error: err };
            }
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Repeated Richardson elimination of error terms h^{p_j}, for a sequence
/// computed at h_k = h_0·ratio^k.
pub fn richardson(seq: &[C], ratio: f64, powers: &[f64]) -> Extrapolated {
    let mut row: Vec<C> = seq.to_vec();
    for &p in powers {
        if row.len() < 2 {
            break;
        }
        let f = ratio.powf(p);
        row = row.windows(2).map(|w| (w[1] - w[0] * f) / (1.0 - f)).collect();
    }
    let m = row.len();
    let error = if m >= 2 { (row[m - 1] - row[m - 2]).norm() } else { f64::INFINITY };
    Extrapolated { value: row[m - 1], error }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: f64) -> C {
        C::new(v, 0.0)
    }

    #[test]
    fn wynn_removes_mixed_power_terms() {
        // limit 2 with error terms x^{0.4} and x^{1.7} along x_k = 2^{−k}
        let seq: Vec<C> = (0..13)
            .map(|k| {
                let x = 0.5f64.powi(k);
                real(2.0 + 3.0 * x.powf(0.4) - x.powf(1.7))
            })
            .collect();
        let r = wynn_epsilon(&seq);
        assert!((r.value.re - 2.0).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn wynn_on_constant_sequence() {
        let r = wynn_epsilon(&[real(1.5); 6]);
        assert_eq!(r.value, real(1.5));
        assert_eq!(r.error, 0.0);
    }

    #[test]
    fn richardson_known_orders() {
        let seq: Vec<C> = (0..6)
            .map(|k| {
                let h = 0.5f64.powi(k);
                real(1.0 + h * h + 0.3 * h.powi(4))
            })
            .collect();
        let r = richardson(&seq, 0.5, &[2.0, 4.0]);
        assert!((r.value.re - 1.0).abs() < 1e-13);
    }
}
