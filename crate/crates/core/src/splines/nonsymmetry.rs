//! Symmetry residual of the centred spline L_{(−n,−n/2,−α)}φₙ under p ↦ p⁻¹.

use super::{phi1_eval, psi2, support_box};
use crate::error::{Error, Result};
use crate::group::HPoint;
use crate::hfun::Box3;
use rayon::prelude::*;

/// Lower bound on min_α residual for n = 2. With the direct convolution
/// evaluation of φ₂ on the 21³ grid the minimum is 0.10979 at α ≈ 0.979
/// (mirror point 1.021); the frozen threshold is about half of that.
pub const NONSYMMETRY_THRESHOLD: f64 = 0.05;

/// Points per axis of the sample grid.
pub const GRID_POINTS: usize = 21;

fn near_box_face(q: HPoint, b: &Box3, eps: f64) -> bool {
    let c = [q.x, q.y, q.t];
    (0..3).any(|i| (c[i] - b.lo[i]).abs() < eps || (c[i] - b.hi[i]).abs() < eps)
}

/// Sample grid (cell midpoints) covering the support of L_{(−n,−n/2,−α)}φₙ.
pub fn residual_grid(n: usize, alpha: f64) -> Vec<HPoint> {
    let nf = n as f64;
    let sb = support_box(n);
    let tmax = (sb.lo[2] - alpha).abs().max((sb.hi[2] - alpha).abs()) + 0.5 * nf * nf;
    let lo = [-nf, -0.5 * nf, -tmax];
    let hi = [nf, 0.5 * nf, tmax];
    let g = GRID_POINTS;
    let c = |a: usize, i: usize| lo[a] + (hi[a] - lo[a]) * (i as f64 + 0.5) / g as f64;
    let mut pts = Vec::with_capacity(g * g * g);
    for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                pts.push(HPoint::new(c(0, i), c(1, j), c(2, k)));
            }
        }
    }
    pts
}

/// max over the grid of |L_{(−n,−n/2,−α)}φₙ(p) − L_{(−n,−n/2,−α)}φₙ(p⁻¹)|.
/// For n = 1, points where either argument lies on a face of Q are skipped.
pub fn nonsymmetry_residual(n: usize, alpha: f64) -> Result<f64> {
    let shift = HPoint::new(n as f64, 0.5 * n as f64, alpha);
    let eval: fn(HPoint) -> f64 = match n {
        1 => phi1_eval,
        2 => |q| psi2(2, q.x, q.y, q.t),
        _ => return Err(Error::OrderTooHigh { order: n, max: 2 }),
    };
    let q_box = support_box(1);
    let r = residual_grid(n, alpha)
        .par_iter()
        .map(|&p| {
            let a = shift * p;
            let b = shift * p.inv();
            if n == 1 && (near_box_face(a, &q_box, 1e-9) || near_box_face(b, &q_box, 1e-9)) {
                return 0.0;
            }
            (eval(a) - eval(b)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(r)
}

/// Minimum of the residual over α ∈ [lo, hi]: grid scan then golden-section
/// refinement around the best grid point. Returns (α*, residual(α*)).
pub fn minimize_residual(n: usize, lo: f64, hi: f64, grid: usize) -> Result<(f64, f64)> {
    if grid < 2 || !(hi > lo) {
        return Err(Error::Domain("minimization needs grid ≥ 2 and hi > lo".into()));
    }
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..grid {
        let a = lo + step * i as f64;
        let r = nonsymmetry_residual(n, a)?;
        if r < best.1 {
            best = (a, r);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = nonsymmetry_residual(n, c)?;
    let mut fd = nonsymmetry_residual(n, d)?;
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = nonsymmetry_residual(n, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = nonsymmetry_residual(n, d)?;
        }
        if b - a < 1e-8 {
            break;
        }
    }
    for (x, f) in [(c, fc), (d, fd)] {
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_is_symmetric_at_one_half() {
        assert!(nonsymmetry_residual(1, 0.5).unwrap() <= 1e-8);
        assert!(nonsymmetry_residual(1, 0.8).unwrap() > 0.1);
    }

    #[test]
    fn grid_has_21_cubed_points() {
        assert_eq!(residual_grid(2, 0.0).len(), 9261);
    }

    #[test]
    fn unsupported_order() {
        assert!(nonsymmetry_residual(3, 0.0).is_err());
    }
}
