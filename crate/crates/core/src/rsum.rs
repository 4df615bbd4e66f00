//! Truncated sums Σ_{r∈ℤ} term(r) with a bound on the discarded tail.
//!
//! Terms are added in order of increasing |r|, ties negative first, so results
//! do not depend on scheduling.

use crate::error::{Error, Result};
use crate::quad::QuadValue;
use crate::specfun::hurwitz_zeta;

/// Truncation radius R and a bound on Σ_{|r|>R} |term(r)|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub truncation_radius: i64,
    pub bound: f64,
}

/// How the terms decay away from r = λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// |term(r)| ≤ c / |r−λ|^p, supplied by the caller.
    Power { c: f64, p: f64 },
    /// Same envelope, with c estimated from samples at r ∈ ±[R₀, 2R₀].
    Estimated { p: f64 },
    /// term(r) ≈ a± / (r−λ)^p on each side; the fitted tail is added to the
    /// result and the bound reports the mismatch between two fits.
    Accelerated { p: f64 },
    /// term(r) = 0 for |r| > radius.
    Compact { radius: i64 },
}

const MAX_RADIUS: i64 = 1 << 22;

/// r = 0, −1, 1, −2, 2, … up to |r| = radius.
pub fn r_order(radius: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=radius).flat_map(|k| [-k, k]))
}

/// Σ_{|r|>R} |r−λ|^{−p} ≤ 2 (R−1)^{1−p}/(p−1) for λ ∈ (0, 1].
pub fn power_tail(c: f64, p: f64, radius: i64) -> f64 {
    if radius < 2 {
        return f64::INFINITY;
    }
    2.0 * c * ((radius - 1) as f64).powf(1.0 - p) / (p - 1.0)
}

/// Smallest R with 2c(R−1)^{1−p}/(p−1) ≤ tol.
pub fn certified_radius(c: f64, p: f64, tol: f64) -> Result<i64> {
    if c == 0.0 {
        return Ok(1);
    }
    let mut r = 2;
    while power_tail(c, p, r) > tol {
        r *= 2;
        if r > MAX_RADIUS {
            return Err(Error::TailNotCertified(format!("radius above {MAX_RADIUS} for c = {c:e}, p = {p}")));
        }
    }
    let (mut lo, mut hi) = (r / 2, r);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if power_tail(c, p, mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.max(1))
}

fn partial<T: QuadValue, F: Fn(i64) -> T>(term: &F, radius: i64) -> T {
    let mut acc = T::zero();
    for r in r_order(radius) {
        acc += term(r);
    }
    acc
}

/// Σ_r term(r) for λ ∈ (0, 1].
pub fn sum_over_r<T: QuadValue, F: Fn(i64) -> T>(term: F, lambda: f64, tol: f64, decay: Decay) -> Result<(T, TailBound)> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("lambda must lie in (0,1], got {lambda}")));
    }
    match decay {
        Decay::Compact { radius } => {
            Ok((partial(&term, radius), TailBound { truncation_radius: radius, bound: 0.0 }))
        }
        Decay::Power { c, p } => {
            if !(p > 1.0) || !(c >= 0.0) {
                return Err(Error::TailNotCertified(format!("invalid envelope c = {c}, p = {p}")));
            }
            let radius = certified_radius(c, p, tol)?;
            let bound = if c == 0.0 { 0.0 } else { power_tail(c, p, radius) };
            Ok((partial(&term, radius), TailBound { truncation_radius: radius, bound }))
        }
        Decay::Estimated { p } => {
            let c = estimate_constant(&term, lambda, p, 8);
            if !c.is_finite() {
                return Err(Error::TailNotCertified("non-finite sampled envelope".into()));
            }
            // confirm the envelope on a wider band before trusting it
            let c_wide = estimate_constant(&term, lambda, p, 32);
            if c_wide > 4.0 * c.max(1e-300) {
                return Err(Error::TailNotCertified(format!(
                    "sampled envelope grows from {c:e} to {c_wide:e}; decay exponent {p} not observed"
                )));
            }
            sum_over_r(term, lambda, tol, Decay::Power { c: 2.0 * c.max(c_wide), p })
        }
        Decay::Accelerated { p } => accelerated(term, lambda, tol, p),
    }
}

fn estimate_constant<T: QuadValue, F: Fn(i64) -> T>(term: &F, lambda: f64, p: f64, r0: i64) -> f64 {
    let mut c: f64 = 0.0;
    for r in r0..=2 * r0 {
        for s in [r, -r] {
            let v = term(s).magnitude() * ((s as f64) - lambda).abs().powf(p);
            c = c.max(v);
        }
    }
    c
}

fn accelerated<T: QuadValue, F: Fn(i64) -> T>(term: F, lambda: f64, tol: f64, p: f64) -> Result<(T, TailBound)> {
    if !(p > 1.0) {
        return Err(Error::TailNotCertified(format!("acceleration needs p > 1, got {p}")));
    }
    let mut radius: i64 = 64;
    loop {
        let body = partial(&term, radius);
        // fitted amplitudes from the last two terms on each side
        let rp = radius as f64 - lambda;
        let rn = radius as f64 + lambda;
        let ap1 = term(radius) * rp.powf(p);
        let ap0 = term(radius - 1) * (rp - 1.0).powf(p);
        let an1 = term(-radius) * rn.powf(p);
        let an0 = term(-radius + 1) * (rn - 1.0).powf(p);
        // Σ_{r>R} (r−λ)^{−p} = ζ(p, R+1−λ); Σ_{r<−R} |r−λ|^{−p} = ζ(p, R+1+λ)
        let zp = hurwitz_zeta(p, radius as f64 + 1.0 - lambda)?;
        let zn = hurwitz_zeta(p, radius as f64 + 1.0 + lambda)?;
        let tail = ap1 * zp + an1 * zn;
        let bound = (ap1 - ap0).magnitude() * zp + (an1 - an0).magnitude() * zn;
        if bound <= tol {
            return Ok((body + tail, TailBound { truncation_radius: radius, bound }));
        }
        radius *= 2;
        if radius > MAX_RADIUS {
            return Err(Error::TailNotCertified(format!("accelerated tail mismatch {bound:e} above {tol:e}")));
        }
    }
}
