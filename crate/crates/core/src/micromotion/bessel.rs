//! Integer-order Bessel functions of the first kind and the sideband
//! suppression series built on them.

use crate::error::{param, Result};

/// Default number of sideband orders kept in the suppression series.
pub const DEFAULT_SERIES_CUTOFF: usize = 50;

/// Terms smaller than this end the series early.
pub const SERIES_TERM_TOLERANCE: f64 = 1e-15;

/// `J_0(x) ..= J_order(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 sum_k J_2k = 1`.
pub fn bessel_j_all(order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = order.max(ax.ceil() as usize);
    let mut start = top + 20 + (160.0 * top as f64).sqrt() as usize;
    start += start % 2;

    let mut above = 0.0f64;
    let mut current = 1e-300f64;
    let mut norm = 0.0f64;
    let mut values = vec![0.0; start + 1];
    values[start] = current;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / ax * current - above;
        above = current;
        current = below;
        values[k - 1] = current;
        if current.abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            above *= 1e-250;
            current *= 1e-250;
        }
    }
    for (k, v) in values.iter().enumerate() {
        if k == 0 {
            norm += v;
        } else if k % 2 == 0 {
            norm += 2.0 * v;
        }
    }
    for (k, o) in out.iter_mut().enumerate() {
        let mut v = values[k] / norm;
        // J_k(-x) = (-1)^k J_k(x)
        if x < 0.0 && k % 2 == 1 {
            v = -v;
        }
        *o = v;
    }
    out
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j_all(0, x)[0]
}

/// Relative scattering rate `I(n)/I_0` of a frequency-modulated ion in the
/// low-saturation limit:
///
/// `J_0(n)^2 + 2 sum_{v=1}^{v_max} J_v(n)^2 / (1 + 4 v^2 (Omega/Gamma)^2)`.
///
/// The sum stops early once a term drops below [`SERIES_TERM_TOLERANCE`]
/// beyond `v > n`. `omega_over_gamma` may be `+inf` (sidebands fully
/// resolved).
pub fn suppression_factor(n: f64, omega_over_gamma: f64, v_max: usize) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(param(format!("modulation index must be finite and >= 0, got {n}")));
    }
    if !(omega_over_gamma > 0.0) {
        return Err(param(format!("Omega/Gamma must be > 0, got {omega_over_gamma}")));
    }
    if v_max < 1 {
        return Err(param("series cutoff must be >= 1"));
    }
    let j = bessel_j_all(v_max, n);
    let og2 = omega_over_gamma * omega_over_gamma;
    let mut total = j[0] * j[0];
    for (v, jv) in j.iter().enumerate().skip(1) {
        let vf = v as f64;
        let term = 2.0 * jv * jv / (1.0 + 4.0 * vf * vf * og2);
        total += term;
        if vf > n && term < SERIES_TERM_TOLERANCE {
            break;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Root of `J_0` inside `[lo, hi]` by bisection. The bracket must change sign.
pub fn bessel_j0_root(lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (bessel_j0(a), bessel_j0(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(param(format!("J0 does not change sign on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = bessel_j0(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// First zero of `J_0`, where carrier absorption vanishes.
pub fn first_null_modulation_index() -> f64 {
    bessel_j0_root(2.0, 3.0).expect("J0 changes sign on [2, 3]")
}

/// Second zero of `J_0`.
pub fn second_null_modulation_index() -> f64 {
    bessel_j0_root(4.0, 7.0).expect("J0 changes sign on [4, 7]")
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 40 digits.
    #[allow(clippy::excessive_precision)]
    const J_TABLE: [(f64, [f64; 4]); 5] = [
        (0.5, [0.93846980724081290423, 0.24226845767487388638, 0.030604023458682641307, 8.053627241357474086e-6]),
        (1.0, [0.76519768655796655145, 0.44005058574493351596, 0.11490348493190048047, 0.00024975773021123443138]),
        (2.0, [0.22389077914123566805, 0.5767248077568733872, 0.35283402861563771915, 0.0070396297558716854842]),
        (5.0, [-0.17759677131433830435, -0.32757913759146522204, 0.046565116277752215532, 0.26114054612017009005]),
        (10.0, [-0.2459357644513483352, 0.04347274616886143667, 0.25463031368512062253, -0.23406152818679364044]),
    ];

    #[test]
    fn matches_high_precision_table() {
        for (x, expect) in J_TABLE {
            let j = bessel_j_all(5, x);
            for (got, want) in [j[0], j[1], j[2], j[5]].iter().zip(expect) {
                assert!((got - want).abs() < 1e-14, "x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn negative_argument_parity() {
        let p = bessel_j_all(3, 1.7);
        let m = bessel_j_all(3, -1.7);
        for k in 0..=3 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m[k] - sign * p[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_index_is_unsuppressed() {
        assert_eq!(suppression_factor(0.0, 2.0, 50).unwrap(), 1.0);
    }

    #[test]
    fn resolved_sidebands_vanish_at_null() {
        let n = first_null_modulation_index();
        let s = suppression_factor(n, f64::INFINITY, 50).unwrap();
        assert!(s < 1e-30);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(suppression_factor(-1.0, 2.0, 50).is_err());
        assert!(suppression_factor(1.0, 0.0, 50).is_err());
        assert!(suppression_factor(1.0, 2.0, 0).is_err());
        assert!(bessel_j0_root(0.0, 1.0).is_err());
    }
}
