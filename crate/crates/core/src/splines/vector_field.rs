//! Left-invariant vector fields X = ∂ₓ − ½y∂ₜ, Y = ∂_y + ½x∂ₜ, T = ∂ₜ applied to
//! φₙ₊₁, compared with the difference-operator integrals of right
//! translates of φₙ.

use super::{phi_function, phi_n_eval, psi2, rect_bspline_integral, support_box};
use crate::bspline::classical_bspline_eval;
use crate::error::{Error, Result};
use crate::group::HPoint;
use crate::hfun::HFunction;
use crate::quad::{integrate_nd, piecewise_gl, QuadSpec};
use crate::sampling::halton_box;
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    X,
    Y,
    T,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::X, Field::Y, Field::T];
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Field::X),
            "Y" | "y" => Ok(Field::Y),
            "T" | "t" => Ok(Field::T),
            _ => Err(Error::Domain(format!("unknown vector field {s:?}"))),
        }
    }
}

/// Which right-hand side to compare against.
///
/// `Printed` is the difference-operator form with the weights (v − y) for X
/// and (x − u) for Y. Differentiating the convolution under the integral sign
/// also moves the t-argument ½(vx − uy), which contributes −½y∂ₜφₙ₊₁ to X and
/// +½x∂ₜφₙ₊₁ to Y; `ChainRule` adds those terms, i.e. weights (v − 2y) and
/// (2x − u). For T both forms coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsForm {
    #[default]
    Printed,
    ChainRule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Central-difference application of the field to φₙ₊₁ at p.
fn lhs<F: Fn(HPoint) -> Result<f64>>(f: F, field: Field, p: HPoint, h: f64) -> Result<f64> {
    let d = |dx: f64, dy: f64, dt: f64| -> Result<f64> {
        Ok((f(HPoint::new(p.x + dx, p.y + dy, p.t + dt))? - f(HPoint::new(p.x - dx, p.y - dy, p.t - dt))?) / (2.0 * h))
    };
    let dt = d(0.0, 0.0, h)?;
    Ok(match field {
        Field::X => d(h, 0.0, 0.0)? - 0.5 * p.y * dt,
        Field::Y => d(0.0, h, 0.0)? + 0.5 * p.x * dt,
        Field::T => dt,
    })
}

/// Right-hand sides for n = 1. With φ₁ = (1/√2)χ_Q the s-integrals turn
/// indicator functions into B₂ and the (u, v) integrals are exact piecewise
/// Gauss–Legendre sums.
fn rhs_order1(field: Field, p: HPoint, form: RhsForm) -> f64 {
    let (x, y, t) = (p.x, p.y, p.t);
    // (1/√2)∫∫ ∇₃R_{(−u,−v,0)}φ₁ with an optional weight
    let nabla3 = |wdeg: usize, w: &dyn Fn(f64, f64) -> f64| {
        rect_bspline_integral(1, x, y, t, wdeg, w) - rect_bspline_integral(1, x, y, t - 1.0, wdeg, w)
    };
    let k = if form == RhsForm::ChainRule { 2.0 } else { 1.0 };
    let chi = |a: f64, lo: f64, hi: f64| if a >= lo && a <= hi { 1.0 } else { 0.0 };
    match field {
        Field::T => nabla3(0, &|_, _| 1.0),
        Field::X => {
            // ½∫₀¹ [χ_{[0,2]}(x)χ(y−v)B₂(t+vx/2) − χ_{[0,2]}(x−2)χ(y−v)B₂(t−y+vx/2)] dv
            let v0 = (y - 1.0).max(0.0);
            let v1 = y.min(1.0);
            let mut first = 0.0;
            if v1 > v0 && x != 0.0 {
                let br: Vec<f64> = (0..3)
                    .flat_map(|k| [2.0 * (k as f64 - t) / x, 2.0 * (k as f64 - t + y) / x])
                    .collect();
                let g = |v: f64| {
                    chi(x, 0.0, 2.0) * classical_bspline_eval(2, t + 0.5 * v * x)
                        - chi(x - 2.0, 0.0, 2.0) * classical_bspline_eval(2, t - y + 0.5 * v * x)
                };
                first = 0.5 * piecewise_gl(g, v0, v1, &br, 2);
            }
            first + 0.5 * nabla3(1, &|_, v| v - k * y)
        }
        Field::Y => {
            // ½∫₀² χ(x−u)[χ(y)B₂(t−uy/2) − χ(y−1)B₂(t−uy/2+x/2)] du
            let u0 = (x - 2.0).max(0.0);
            let u1 = x.min(2.0);
            let mut first = 0.0;
            if u1 > u0 && y != 0.0 {
                let br: Vec<f64> = (0..3)
                    .flat_map(|k| [2.0 * (t - k as f64) / y, 2.0 * (t + 0.5 * x - k as f64) / y])
                    .collect();
                let g = |u: f64| {
                    chi(y, 0.0, 1.0) * classical_bspline_eval(2, t - 0.5 * u * y)
                        - chi(y - 1.0, 0.0, 1.0) * classical_bspline_eval(2, t - 0.5 * u * y + 0.5 * x)
                };
                first = 0.5 * piecewise_gl(g, u0, u1, &br, 2);
            }
            first + 0.5 * nabla3(1, &|u, _| k * x - u)
        }
    }
}

/// (R_{(a,b,c)}f)(p) = f(p·(a,b,c)).
fn right(f: &dyn HFunction, p: HPoint, a: f64, b: f64, c: f64) -> f64 {
    f.eval(p * HPoint::new(a, b, c))
}

/// Right-hand sides by literal adaptive quadrature of the difference-operator
/// integrals; used for n ≥ 2.
fn rhs_general(n: usize, field: Field, p: HPoint, form: RhsForm, spec: &QuadSpec) -> Result<f64> {
    let f = phi_function(n)?;
    let f = f.as_ref();
    let (x, y) = (p.x, p.y);
    let k = if form == RhsForm::ChainRule { 2.0 } else { 1.0 };
    let nabla3 = |w: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        let r = integrate_nd(
            |q: &[f64]| {
                let (u, v) = (q[0], q[1]);
                w(u, v) * (right(f, p, -u, -v, 0.0) - right(f, p, -u, -v, -1.0))
            },
            &[0.0, 0.0],
            &[2.0, 1.0],
            spec,
        )?;
        Ok(FRAC_1_SQRT_2 * r.value)
    };
    match field {
        Field::T => nabla3(&|_, _| 1.0),
        Field::X => {
            let a = integrate_nd(
                |q: &[f64]| {
                    let (v, s) = (q[0], q[1]);
                    right(f, p, 0.0, -v, -s) - right(f, p, -2.0, -v, -s)
                },
                &[0.0, 0.0],
                &[1.0, 1.0],
                spec,
            )?;
            Ok(FRAC_1_SQRT_2 * a.value + 0.5 * nabla3(&|_, v| v - k * y)?)
        }
        Field::Y => {
            let a = integrate_nd(
                |q: &[f64]| {
                    let (u, s) = (q[0], q[1]);
                    right(f, p, -u, 0.0, -s) - right(f, p, -u, -1.0, -s)
                },
                &[0.0, 0.0],
                &[2.0, 1.0],
                spec,
            )?;
            Ok(FRAC_1_SQRT_2 * a.value + 0.5 * nabla3(&|u, _| k * x - u)?)
        }
    }
}

/// |LHS − RHS| for the field applied to φₙ₊₁ at p with difference step h,
/// against the printed right-hand sides.
pub fn vector_field_check(n: usize, field: Field, p: HPoint, h: f64) -> Result<FieldCheck> {
    vector_field_check_with(n, field, p, h, RhsForm::Printed)
}

pub fn vector_field_check_with(n: usize, field: Field, p: HPoint, h: f64, form: RhsForm) -> Result<FieldCheck> {
    if n == 0 {
        return Err(Error::Domain("vector field identities need n ≥ 1".into()));
    }
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::Domain(format!("difference step {h} outside [1e-6, 1e-2]")));
    }
    let (lhs, rhs) = if n == 1 {
        (lhs(|q| Ok(psi2(2, q.x, q.y, q.t)), field, p, h)?, rhs_order1(field, p, form))
    } else {
        let spec = QuadSpec { abs_tol: 1e-7, rel_tol: 1e-7, max_depth: 10, base_order: 8 };
        (lhs(|q| phi_n_eval(n + 1, q), field, p, h)?, rhs_general(n, field, p, form, &spec)?)
    };
    Ok(FieldCheck { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// Distance from p to the planes x ∈ 2ℤ, y ∈ ℤ where φ₂ has kinks.
pub fn plane_distance(p: HPoint) -> f64 {
    let dx = (p.x / 2.0 - (p.x / 2.0).round()).abs() * 2.0;
    let dy = (p.y - p.y.round()).abs();
    dx.min(dy)
}

/// Deterministic quasi-random points inside supp φ₂ where φ₂ > 1e−3 and at
/// distance ≥ 2h from the kink planes.
pub fn admissible_points(count: usize, h: f64) -> Vec<HPoint> {
    let b = support_box(2);
    let mut out = Vec::with_capacity(count);
    let mut skip = 0u64;
    while out.len() < count && skip < 1_000_000 {
        for q in halton_box(64, &b.lo, &b.hi, skip) {
            let p = HPoint::new(q[0], q[1], q[2]);
            if plane_distance(p) >= 2.0 * h && psi2(2, p.x, p.y, p.t) > 1e-3 {
                out.push(p);
                if out.len() == count {
                    break;
                }
            }
        }
        skip += 64;
    }
    out
}
