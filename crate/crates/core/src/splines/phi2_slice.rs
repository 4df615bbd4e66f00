//! The λ-slice φ₂^λ(x,y) = ∫ φ₂(x,y,t) e^{2πiλt} dt in closed form, and the
//! inversion φ₂(x,y,t) = ∫ e^{−2πiλt} φ₂^λ(x,y) dλ.
//!
//! Each of the four regional expressions is a difference of cosines over
//! π²λ²xy; rewriting them as products of sin(q)/q factors removes the
//! cancellation near region seams and at small λ:
//! φ₂^λ = ½ e^{2πiλ} sinc²(λ) · H(λ,x,y) with H → xy as λ → 0 in the first region.

use crate::error::{Error, Result};
use crate::group::HPoint;
use crate::quad::gauss_legendre;
use crate::specfun::{sin_over, sinc};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Real factor H with φ₂^λ = ½ e^{2πiλ} sinc²(λ)·H; well defined at λ = 0.
pub fn phi2_lambda_envelope(lambda: f64, x: f64, y: f64) -> f64 {
    if !(x > 0.0 && x <= 4.0 && y > 0.0 && y <= 2.0) {
        return 0.0;
    }
    let h = 0.5 * PI * lambda;
    let p1 = h * x * y;
    let p2 = h * x * (2.0 - y);
    let p3 = h * y * (4.0 - x);
    match (x <= 2.0, y <= 1.0) {
        (true, true) => x * y * sin_over(p1).powi(2),
        (true, false) => x * (2.0 - y) * sin_over(p1) * sin_over(p2),
        (false, true) => y * (4.0 - x) * sin_over(p1) * sin_over(p3),
        (false, false) => (2.0 - y) * (4.0 - x) * sin_over(p2) * sin_over(p3),
    }
}

/// φ₂^λ(x, y) for λ ≠ 0; zero outside (0,4]×(0,2].
pub fn phi2_lambda(lambda: f64, x: f64, y: f64) -> Result<Complex64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("phi2_lambda needs a finite nonzero lambda, got {lambda}")));
    }
    Ok(phi2_lambda_limit(lambda, x, y))
}

/// Same as [`phi2_lambda`] but continuous through λ = 0 (value xy/2 there in region 1).
pub fn phi2_lambda_limit(lambda: f64, x: f64, y: f64) -> Complex64 {
    let env = phi2_lambda_envelope(lambda, x, y);
    if env == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = sinc(lambda);
    Complex64::from_polar(0.5 * s * s * env, 2.0 * PI * lambda)
}

/// The four regional cosine-difference expressions evaluated literally.
/// Loses accuracy for small λ·xy; kept as an independent check of the
/// product form.
pub fn phi2_lambda_printed(lambda: f64, x: f64, y: f64) -> Complex64 {
    if !(x > 0.0 && x <= 4.0 && y > 0.0 && y <= 2.0) {
        return Complex64::new(0.0, 0.0);
    }
    let a = PI * lambda;
    let diff = match (x <= 2.0, y <= 1.0) {
        (true, true) => 1.0 - (a * x * y).cos(),
        (true, false) => (a * x * (y - 1.0)).cos() - (a * x).cos(),
        (false, true) => (a * (x - 2.0) * y).cos() - (2.0 * a * y).cos(),
        (false, false) => (a * (x - 2.0 * y)).cos() - (a * (x + 2.0 * y - x * y)).cos(),
    };
    let s = sinc(lambda);
    Complex64::from_polar(s * s / (a * a * x * y) * diff, 2.0 * PI * lambda)
}

/// Controls for the λ-inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSpec {
    /// Initial truncation |λ| ≤ Λ.
    pub lambda_max: f64,
    /// Required bound on the discarded tail.
    pub tail_tol: f64,
    /// Largest Λ tried before giving up.
    pub lambda_cap: f64,
    /// Allowed imaginary residue of the complex integral.
    pub imag_tol: f64,
    /// Gauss–Legendre points per half-period panel.
    pub panel_order: usize,
}

impl Default for InversionSpec {
    fn default() -> Self {
        InversionSpec { lambda_max: 200.0, tail_tol: 1e-6, lambda_cap: 25_600.0, imag_tol: 1e-6, panel_order: 8 }
    }
}

/// Result of an inversion: value, certified tail bound, truncation used, imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionResult {
    pub value: f64,
    pub tail_bound: f64,
    pub lambda_max: f64,
    pub imag_residue: f64,
}

/// |∫_{|λ|>Λ} φ₂^λ dλ| ≤ 2∫_Λ^∞ sinc²·|H|/2 ≤ 4/(3π⁴Λ³xy), using sin² ≤ 1 and
/// |H| ≤ 4/(π²λ²xy) (valid on every region).
pub fn phi2_tail_bound(lambda_max: f64, x: f64, y: f64) -> f64 {
    4.0 / (3.0 * PI.powi(4) * lambda_max.powi(3) * x * y)
}

/// φ₂(x,y,t) by inverting the closed-form slice.
pub fn phi2_eval_with(p: HPoint, spec: &InversionSpec) -> Result<InversionResult> {
    let (x, y, t) = (p.x, p.y, p.t);
    let zero = InversionResult { value: 0.0, tail_bound: 0.0, lambda_max: 0.0, imag_residue: 0.0 };
    if !(x > 0.0 && x <= 4.0 && y > 0.0 && y <= 2.0) {
        return Ok(zero);
    }
    let mut lmax = spec.lambda_max;
    let mut tail = phi2_tail_bound(lmax, x, y);
    while tail > spec.tail_tol {
        lmax *= 2.0;
        if lmax > spec.lambda_cap {
            return Err(Error::TailNotCertified(format!(
                "phi2 inversion at ({x}, {y}, {t}): tail {tail:e} above {:e} at lambda cap {}",
                spec.tail_tol, spec.lambda_cap
            )));
        }
        tail = phi2_tail_bound(lmax, x, y);
    }
    // largest angular frequency in λ of the integrand, used to size panels
    let cmax = 0.5 * PI * (x * y + x * (2.0 - y).abs() + y * (4.0 - x).abs());
    let omega = 2.0 * PI * (1.0 - t).abs() + 2.0 * PI + cmax;
    let width = PI / omega;
    let panels = (lmax / width).ceil().max(1.0) as usize;
    let h = lmax / panels as f64;
    let rule = gauss_legendre(spec.panel_order);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let a = i as f64 * h;
        let c = a + 0.5 * h;
        let mut panel = Complex64::new(0.0, 0.0);
        for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
            let lam = c + 0.5 * h * xi;
            // λ and −λ together: φ₂^{−λ} = conj(φ₂^λ)
            let phase = Complex64::from_polar(1.0, -2.0 * PI * lam * t);
            let f = phi2_lambda_limit(lam, x, y);
            let g = phi2_lambda_limit(-lam, x, y) * phase.conj();
            panel += (f * phase + g) * *wi;
        }
        acc += panel * (0.5 * h);
    }
    if acc.im.abs() > spec.imag_tol {
        return Err(Error::Domain(format!("phi2 inversion left imaginary residue {:e}", acc.im)));
    }
    Ok(InversionResult { value: acc.re, tail_bound: tail, lambda_max: lmax, imag_residue: acc.im.abs() })
}

/// φ₂(p) via the slice transform with default truncation.
pub fn phi2_eval(p: HPoint) -> Result<f64> {
    Ok(phi2_eval_with(p, &InversionSpec::default())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::psi2;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vanishes_at_lambda_one_and_outside() {
        assert_eq!(phi2_lambda(1.0, 1.0, 0.5).unwrap().norm(), 0.0);
        assert_eq!(phi2_lambda(0.3, 5.0, 0.5).unwrap(), Complex64::new(0.0, 0.0));
        assert!(phi2_lambda(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn small_lambda_limit() {
        let v = phi2_lambda(1e-9, 1.2, 0.7).unwrap();
        assert_abs_diff_eq!(v.re, 1.2 * 0.7 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn product_form_matches_printed_form() {
        for &lam in &[0.2, 0.37, 0.8, 1.7, -0.45] {
            for &(x, y) in &[(0.7, 0.4), (1.5, 1.6), (2.8, 0.3), (3.3, 1.4), (2.0, 1.0)] {
                let a = phi2_lambda(lam, x, y).unwrap();
                let b = phi2_lambda_printed(lam, x, y);
                assert!((a - b).norm() < 1e-12, "{lam} {x} {y}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn continuous_across_seams() {
        let e = 1e-12;
        for &lam in &[0.25, 0.6, 2.3] {
            for &y in &[0.3, 0.9, 1.4] {
                let j = (phi2_lambda(lam, 2.0, y).unwrap() - phi2_lambda(lam, 2.0 + e, y).unwrap()).norm();
                assert!(j < 1e-9);
            }
            for &x in &[0.5, 2.5, 3.7] {
                let j = (phi2_lambda(lam, x, 1.0).unwrap() - phi2_lambda(lam, x, 1.0 + e).unwrap()).norm();
                assert!(j < 1e-9);
            }
        }
    }

    #[test]
    fn slice_matches_transform_of_direct_phi2() {
        for &(lam, x, y) in &[(0.37, 1.3, 0.6), (0.8, 2.7, 1.4), (1.6, 0.9, 1.8)] {
            let rule = gauss_legendre(20);
            let mut br = super::super::psi2_t_breaks(2, x, y);
            let f = |t: f64| Complex64::from_polar(psi2(2, x, y, t), 2.0 * PI * lam * t);
            let num = crate::quad::piecewise_with(&rule, f, -2.0, 4.0, &mut br);
            let v = phi2_lambda(lam, x, y).unwrap();
            assert!((num - v).norm() < 1e-10, "{num} vs {v}");
        }
    }

    #[test]
    fn inversion_matches_direct() {
        for &(x, y, t) in &[(1.3, 0.6, 0.4), (2.6, 1.2, 1.3), (0.5, 1.7, -0.2)] {
            let r = phi2_eval_with(HPoint::new(x, y, t), &InversionSpec::default()).unwrap();
            assert!(r.tail_bound <= 1e-6);
            assert_abs_diff_eq!(r.value, psi2(2, x, y, t), epsilon = 1e-5);
        }
        assert_eq!(phi2_eval(HPoint::new(4.5, 1.0, 0.0)).unwrap(), 0.0);
    }
}
