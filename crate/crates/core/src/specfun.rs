//! Special functions: sinc, ψ⁽⁰⁾, ψ⁽³⁾, Hurwitz zeta, and the removable-singularity
//! helpers used by the closed-form slices.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// sin(πz)/(πz), with sinc(0) = 1 and exact zeros at the nonzero integers.
pub fn sinc(z: f64) -> f64 {
    if (PI * z).abs() < 1e-4 {
        return sin_over(PI * z);
    }
    sin_pi(z) / (PI * z)
}

/// sin(πz) with the argument reduced modulo 2 first, so integers give exact zeros.
pub fn sin_pi(z: f64) -> f64 {
    let r = z - 2.0 * (0.5 * z).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// sin(q)/q, filled by its series near zero.
pub fn sin_over(q: f64) -> f64 {
    if q.abs() < 1e-4 {
        let q2 = q * q;
        1.0 - q2 / 6.0 * (1.0 - q2 / 20.0)
    } else {
        q.sin() / q
    }
}

/// (1 − cos a)/a², filled by its series for |a| < 1e−4.
pub fn one_minus_cos_over_sq(a: f64) -> f64 {
    if a.abs() < 1e-4 {
        let a2 = a * a;
        0.5 - a2 / 24.0 * (1.0 - a2 / 30.0)
    } else {
        let s = (0.5 * a).sin();
        2.0 * s * s / (a * a)
    }
}

/// Digamma function ψ⁽⁰⁾(z) for z > 0.
pub fn digamma(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("digamma requires z > 0, got {z}")));
    }
    Ok(statrs::function::gamma::digamma(z))
}

/// Polygamma function ψ⁽³⁾(z) for z > 0, by upward recurrence into the
/// asymptotic regime z ≥ 12.
pub fn polygamma3(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("polygamma3 requires z > 0, got {z}")));
    }
    let mut acc = 0.0;
    let mut x = z;
    while x < 12.0 {
        acc += 6.0 / x.powi(4);
        x += 1.0;
    }
    // 2/x³ + 3/x⁴ + Σ B₂ₖ (2k+2)!/(2k)! x^{−2k−3}
    const COEF: [f64; 6] = [2.0, -1.0, 4.0 / 3.0, -3.0, 10.0, -691.0 * 182.0 / 2730.0];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv.powi(5);
    for c in COEF {
        series += c * pow;
        pow *= inv2;
    }
    Ok(acc + 2.0 * inv.powi(3) + 3.0 * inv.powi(4) + series)
}

/// Hurwitz zeta ζ(s, q) = Σ_{n≥0} (q+n)^{−s} for s > 1, q > 0 (Euler–Maclaurin).
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !(q > 0.0) {
        return Err(Error::Domain(format!("hurwitz_zeta requires s > 1, q > 0, got ({s}, {q})")));
    }
    const N: usize = 12;
    // B₂ₖ/(2k)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum = 0.0;
    for n in 0..N {
        sum += (q + n as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)…(s+2k−2) times a^{−s−2k+1}
    let mut rising = s;
    let mut pow = a.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * pow;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        pow /= a * a;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert_abs_diff_eq!(sinc(1.0), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(sinc(0.5), 2.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(sinc(3e-6), (PI * 3e-6).sin() / (PI * 3e-6), epsilon = 1e-15);
    }

    #[test]
    fn cos_helper_continuous_across_switch() {
        let below = one_minus_cos_over_sq(0.999_999e-4);
        let above = one_minus_cos_over_sq(1.000_001e-4);
        assert_abs_diff_eq!(below, above, epsilon = 1e-12);
        assert_abs_diff_eq!(one_minus_cos_over_sq(0.0), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(one_minus_cos_over_sq(2.0), (1.0 - 2f64.cos()) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn digamma_values() {
        assert_abs_diff_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, epsilon = 1e-12);
        assert_abs_diff_eq!(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA, epsilon = 1e-12);
        let z = 3.7;
        assert_abs_diff_eq!(digamma(z + 1.0).unwrap() - digamma(z).unwrap(), 1.0 / z, epsilon = 1e-12);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn polygamma3_values() {
        let pi4 = PI.powi(4);
        assert_abs_diff_eq!(polygamma3(1.0).unwrap(), pi4 / 15.0, epsilon = 1e-10);
        let series: f64 = (0..200_000).map(|n| 6.0 / (n as f64 + 1.0).powi(4)).sum();
        assert_abs_diff_eq!(polygamma3(1.0).unwrap(), series, epsilon = 1e-10);
        let z = 2.5;
        assert_abs_diff_eq!(
            polygamma3(z + 1.0).unwrap() - polygamma3(z).unwrap(),
            -6.0 / z.powi(4),
            epsilon = 1e-10
        );
        let lam = 0.5;
        assert_abs_diff_eq!(
            polygamma3(2.0 - lam).unwrap() + polygamma3(lam + 1.0).unwrap(),
            2.0 * polygamma3(1.5).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(polygamma3(0.5).unwrap(), pi4, epsilon = 1e-9);
        assert!(polygamma3(-0.1).is_err());
    }

    #[test]
    fn hurwitz_matches_direct_sum() {
        let direct: f64 = (0..2_000_000).rev().map(|n| (0.3 + n as f64).powi(-4)).sum();
        assert_abs_diff_eq!(hurwitz_zeta(4.0, 0.3).unwrap(), direct, epsilon = 1e-12);
        assert_abs_diff_eq!(hurwitz_zeta(2.0, 1.0).unwrap(), PI * PI / 6.0, epsilon = 1e-13);
    }

    proptest! {
        #[test]
        fn digamma_recurrence(z in 0.1f64..50.0) {
            let d = digamma(z + 1.0).unwrap() - digamma(z).unwrap() - 1.0 / z;
            prop_assert!(d.abs() < 1e-10);
        }

        #[test]
        fn polygamma3_recurrence(z in 0.1f64..50.0) {
            let d = polygamma3(z + 1.0).unwrap() - polygamma3(z).unwrap() + 6.0 / z.powi(4);
            prop_assert!(d.abs() < 1e-10 * (1.0 + 6.0 / z.powi(4)));
        }
    }
}
