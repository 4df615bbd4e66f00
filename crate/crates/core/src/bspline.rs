//! Cardinal B-splines Bₙ = Bₙ₋₁ ∗ χ_{[0,1)} on ℝ.

use num_complex::Complex64;
use std::f64::consts::PI;

/// The cardinal B-spline of order n (degree n−1, support [0, n]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalBSpline {
    pub order: usize,
}

impl ClassicalBSpline {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "B-spline order must be positive");
        ClassicalBSpline { order }
    }

    pub fn eval(&self, x: f64) -> f64 {
        classical_bspline_eval(self.order, x)
    }

    /// ∫_{−∞}^x Bₙ.
    pub fn cumulative(&self, x: f64) -> f64 {
        bspline_cumulative(self.order, x)
    }

    /// B̂ₙ(ω) = ∫ Bₙ(t) e^{−2πiωt} dt = ((1 − e^{−2πiω})/(2πiω))ⁿ.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        bspline_hat(self.order, omega)
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..=self.order).map(|k| k as f64).collect()
    }
}

/// Bₙ(x); piecewise closed forms up to order 4, Cox–de Boor recursion above.
pub fn classical_bspline_eval(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    if n == 0 || !(x >= 0.0 && x < nf) {
        return 0.0;
    }
    match n {
        1 => 1.0,
        2 => {
            if x < 1.0 {
                x
            } else {
                2.0 - x
            }
        }
        3 => {
            if x < 1.0 {
                0.5 * x * x
            } else if x < 2.0 {
                -x * x + 3.0 * x - 1.5
            } else {
                let s = 3.0 - x;
                0.5 * s * s
            }
        }
        4 => {
            if x < 1.0 {
                x * x * x / 6.0
            } else if x < 2.0 {
                (((-3.0 * x + 12.0) * x - 12.0) * x + 4.0) / 6.0
            } else if x < 3.0 {
                (((3.0 * x - 24.0) * x + 60.0) * x - 44.0) / 6.0
            } else {
                let s = 4.0 - x;
                s * s * s / 6.0
            }
        }
        _ => cox_de_boor(n, x),
    }
}

fn cox_de_boor(n: usize, x: f64) -> f64 {
    // b[j] holds B_k(x − j) for the j with x − j ∈ [0, k)
    let j0 = x.floor() as i64;
    let mut b = vec![0.0; n + 1];
    // order 1: only x − j0 ∈ [0,1)
    b[0] = 1.0;
    for k in 2..=n {
        let kf = k as f64;
        let mut next = vec![0.0; n + 1];
        for d in 0..k {
            // shift j = j0 − d, argument s = x − j
            let s = x - (j0 - d as i64) as f64;
            let left = if d < k - 1 { b[d] } else { 0.0 };
            let right = if d >= 1 { b[d - 1] } else { 0.0 };
            next[d] = (s * left + (kf - s) * right) / (kf - 1.0);
        }
        b = next;
    }
    let d = j0 as usize;
    if d < n {
        b[d]
    } else {
        0.0
    }
}

/// ∫_{−∞}^x Bₙ = Σ_{j ≥ 0} Bₙ₊₁(x − j).
pub fn bspline_cumulative(n: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= n as f64 {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut j = 0.0;
    while j <= x {
        acc += classical_bspline_eval(n + 1, x - j);
        j += 1.0;
    }
    acc
}

pub fn bspline_hat(n: usize, omega: f64) -> Complex64 {
    let base = Complex64::from_polar(crate::specfun::sinc(omega), -PI * omega);
    base.powu(n as u32)
}
