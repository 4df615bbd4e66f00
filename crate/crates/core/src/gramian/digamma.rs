//! The symbol A_p(λ) = |Σ_{r=1}^p 2e^{πi(λ−r)} sinc(λ−r)| of the separable
//! generator with ĥ = χ_{[0,p]}, its digamma closed form, and the minimum of
//! Ψ(λ) = 3 − A₃(λ).

use crate::error::{Error, Result};
use crate::specfun::{digamma, sinc};
use num_complex::Complex64;
use std::f64::consts::PI;

fn check(p: usize, lambda: f64) -> Result<()> {
    if p == 0 {
        return Err(Error::Domain("p must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda must lie in [0,1], got {lambda}")));
    }
    Ok(())
}

/// 2 sinc(1−λ)[1 + (1−λ)(ψ(p−λ+1) − ψ(2−λ))]; the endpoints are the limits
/// A_p(0⁺) = 0 and A_p(1) = 2.
pub fn a_p(p: usize, lambda: f64) -> Result<f64> {
    check(p, lambda)?;
    let m = 1.0 - lambda;
    Ok(2.0 * sinc(m) * (1.0 + m * (digamma(p as f64 - lambda + 1.0)? - digamma(2.0 - lambda)?)))
}

/// The defining finite sum, as an independent check of [`a_p`].
pub fn a_p_direct(p: usize, lambda: f64) -> Result<f64> {
    check(p, lambda)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 1..=p {
        let a = lambda - r as f64;
        acc += Complex64::from_polar(2.0 * sinc(a), PI * a);
    }
    Ok(acc.norm())
}

/// (p+1 − A_{p+1}(λ)) − (p − A_p(λ)) = 1 − 2(1−λ) sinc(1−λ)/(p+1−λ).
pub fn monotone_p_check(p: usize, lambda: f64) -> Result<f64> {
    if p < 3 {
        return Err(Error::Domain(format!("p must be at least 3, got {p}")));
    }
    check(p, lambda)?;
    let m = 1.0 - lambda;
    Ok(1.0 - 2.0 * m * sinc(m) / (p as f64 + 1.0 - lambda))
}

/// Ψ(λ) = 3 − A₃(λ) = 3 − 2 sinc(1−λ)[3 − 2/(3−λ) − 1/(2−λ)].
pub fn psi_function(lambda: f64) -> Result<f64> {
    check(3, lambda)?;
    Ok(3.0 - 2.0 * sinc(1.0 - lambda) * (3.0 - 2.0 / (3.0 - lambda) - 1.0 / (2.0 - lambda)))
}

/// Ψ′(λ) in closed form, valid on [0,1).
pub fn psi_derivative(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("psi_derivative needs lambda in [0,1), got {lambda}")));
    }
    let l = lambda;
    let q = 3.0 * (l - 4.0) * l;
    let num = 2.0 * PI * (l - 3.0) * (l - 2.0) * (l - 1.0) * (q + 11.0) * (PI * l).cos()
        - 2.0 * (q * ((l - 4.0) * l + 8.0) + 49.0) * (PI * l).sin();
    let den = PI * ((l - 3.0) * (l - 2.0) * (l - 1.0)).powi(2);
    Ok(num / den)
}

/// Location and value of the minimum of Ψ and Ψ″ there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiMinimum {
    pub lambda0: f64,
    pub psi_min: f64,
    pub psi_second: f64,
}

/// Root of Ψ′ on (0,1), bracketed by a sign change − → + on a 99-point scan
/// and refined by bisection; Ψ″ by a central difference of Ψ′.
pub fn psi_minimize() -> Result<PsiMinimum> {
    let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let mut bracket = None;
    for w in grid.windows(2) {
        if psi_derivative(w[0])? < 0.0 && psi_derivative(w[1])? >= 0.0 {
            if bracket.is_some() {
                return Err(Error::Bracket("more than one minimum of Psi on (0,1)".into()));
            }
            bracket = Some((w[0], w[1]));
        }
    }
    let (mut a, mut b) = bracket.ok_or_else(|| Error::Bracket("Psi' has no sign change on (0,1)".into()))?;
    while b - a > 1e-15 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if psi_derivative(m)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let lambda0 = 0.5 * (a + b);
    let h = 1e-5;
    let psi_second = (psi_derivative(lambda0 + h)? - psi_derivative(lambda0 - h)?) / (2.0 * h);
    Ok(PsiMinimum { lambda0, psi_min: psi_function(lambda0)?, psi_second })
}
