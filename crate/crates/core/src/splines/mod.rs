//! Heisenberg B-splines φₙ: φ₁ = (1/√2)χ_Q and
//! φₙ₊₁(x,y,t) = (1/√2)∫_Q φₙ(x−u, y−v, t−s+½(vx−uy)) du dv ds.
//!
//! The s-integrals are carried out exactly: with ψₙ⁽ʲ⁾ the t-convolution of φₙ
//! with Bⱼ, one has ψ₁⁽ʲ⁾ = (1/√2)χ_{[0,2]×[0,1]}·Bⱼ₊₁ and
//! ψₙ⁽ʲ⁾(x,y,t) = (1/√2)∫∫ ψₙ₋₁⁽ʲ⁺¹⁾(x−u, y−v, t+½(vx−uy)) du dv.
//! φ₂ = ψ₂⁽⁰⁾ is then a piecewise-polynomial double integral evaluated exactly
//! by Gauss–Legendre on its pieces; φ₃ adds one adaptive 2-D level.

pub mod grid;
pub mod nonsymmetry;
pub mod phi2_slice;
pub mod vector_field;

use crate::bspline::{classical_bspline_eval, ClassicalBSpline};
use crate::error::{Error, Result};
use crate::group::HPoint;
use crate::hfun::{integral, t_integral, Box3, HFunction, LeftTranslate};
use crate::quad::{gauss_legendre, integrate_nd_best, piecewise_with, QuadSpec};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

pub use grid::Grid3D;
pub use phi2_slice::{phi2_eval, phi2_eval_with, phi2_lambda, InversionSpec};

/// Default highest order accepted by [`phi_n_eval`].
pub const DEFAULT_MAX_ORDER: usize = 3;

/// [0,2n]×[0,n]×[−½(n+2)(n−1), ½(n+1)(n+2)−2].
pub fn support_box(n: usize) -> Box3 {
    let nf = n as f64;
    Box3::new(
        [0.0, 0.0, -0.5 * (nf + 2.0) * (nf - 1.0)],
        [2.0 * nf, nf, 0.5 * (nf + 1.0) * (nf + 2.0) - 2.0],
    )
}

/// 1/√2 on the closed box Q, 0 elsewhere.
pub fn phi1_eval(p: HPoint) -> f64 {
    if (0.0..=2.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) && (0.0..=1.0).contains(&p.t) {
        FRAC_1_SQRT_2
    } else {
        0.0
    }
}

/// ψ₂ with the order-m B-spline in t:
/// ½ ∫∫_{[0,2]×[0,1]} χ_{[0,2]×[0,1]}(x−u, y−v) Bₘ(t + ½(vx − uy)) du dv.
/// φ₂ = psi2(2, ·); the inner level of φ₃ is psi2(3, ·).
pub fn psi2(m: usize, x: f64, y: f64, t: f64) -> f64 {
    rect_bspline_integral(m, x, y, t, 0, |_, _| 1.0)
}

/// ½ ∫∫ χ_{[0,2]×[0,1]}(x−u, y−v) w(u, v) Bₘ(t + ½(vx − uy)) dv du over
/// (u, v) ∈ [0,2]×[0,1], exact when w is a polynomial of total degree ≤ `wdeg`.
/// The integrand is piecewise polynomial; the pieces are cut along the lines
/// where the B-spline argument crosses a knot.
pub fn rect_bspline_integral<W: Fn(f64, f64) -> f64>(m: usize, x: f64, y: f64, t: f64, wdeg: usize, w: W) -> f64 {
    assert!((1..=7).contains(&m), "B-spline order {m} outside 1..=7");
    let u0 = (x - 2.0).max(0.0);
    let u1 = x.min(2.0);
    let v0 = (y - 1.0).max(0.0);
    let v1 = y.min(1.0);
    if !(u1 > u0) || !(v1 > v0) {
        return 0.0;
    }
    let mf = m as f64;
    let ell = |u: f64, v: f64| 0.5 * (v * x - u * y);
    let c = [ell(u0, v0), ell(u0, v1), ell(u1, v0), ell(u1, v1)];
    let lmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if t + lmax <= 0.0 || t + lmin >= mf {
        return 0.0;
    }
    let beta = 0.5 * x;
    // piece degree m−1 in v plus the weight; the v-integral is then degree ≤ m + wdeg in u
    let rule_v = gauss_legendre((m + wdeg + 1) / 2);
    let rule_u = gauss_legendre((m + wdeg) / 2 + 1);
    let inner = |u: f64| {
        let alpha = t - 0.5 * u * y;
        if beta == 0.0 {
            let b = classical_bspline_eval(m, alpha);
            if b == 0.0 {
                return 0.0;
            }
            return b * rule_v.integrate(|v| w(u, v), v0, v1);
        }
        let mut vb = [0.0f64; 8];
        for (k, slot) in vb.iter_mut().enumerate().take(m + 1) {
            *slot = (k as f64 - alpha) / beta;
        }
        piecewise_with(&rule_v, |v| w(u, v) * classical_bspline_eval(m, alpha + beta * v), v0, v1, &mut vb[..m + 1])
    };
    let mut ub = [0.0f64; 16];
    let mut nb = 0;
    if y != 0.0 {
        for vb in [v0, v1] {
            for k in 0..=m {
                ub[nb] = 2.0 * (t + beta * vb - k as f64) / y;
                nb += 1;
            }
        }
    }
    0.5 * piecewise_with(&rule_u, inner, u0, u1, &mut ub[..nb])
}

/// t-breaks of psi2(m, x, y, ·): knots shifted by the corner phases.
fn psi2_t_breaks(m: usize, x: f64, y: f64) -> Vec<f64> {
    let u0 = (x - 2.0).max(0.0);
    let u1 = x.min(2.0);
    let v0 = (y - 1.0).max(0.0);
    let v1 = y.min(1.0);
    let mut out = Vec::with_capacity(4 * (m + 1));
    for (u, v) in [(u0, v0), (u0, v1), (u1, v0), (u1, v1)] {
        let l = 0.5 * (v * x - u * y);
        for k in 0..=m {
            out.push(k as f64 - l);
        }
    }
    out
}

/// Direct evaluation of φ₃ by adaptive quadrature of psi2(3, ·) over the
/// cells where the inner function is smooth.
pub fn phi3_eval_with(p: HPoint, spec: &QuadSpec) -> (f64, bool) {
    let sb = support_box(3);
    if !sb.contains(p) {
        return (0.0, true);
    }
    let (x, y, t) = (p.x, p.y, p.t);
    let ue = crate::quad::panel_edges((x - 4.0).max(0.0), x.min(2.0), &[x - 2.0]);
    let ve = crate::quad::panel_edges((y - 2.0).max(0.0), y.min(1.0), &[y - 1.0]);
    let ncell = ((ue.len() - 1) * (ve.len() - 1)) as f64;
    let cell_spec = QuadSpec { abs_tol: spec.abs_tol / ncell, ..*spec };
    let mut acc = 0.0;
    let mut ok = true;
    for wu in ue.windows(2) {
        if !(wu[1] > wu[0]) {
            continue;
        }
        for wv in ve.windows(2) {
            if !(wv[1] > wv[0]) {
                continue;
            }
            let (r, conv) = integrate_nd_best(
                |q: &[f64]| {
                    let (u, v) = (q[0], q[1]);
                    psi2(3, x - u, y - v, t + 0.5 * (v * x - u * y))
                },
                &[wu[0], wv[0]],
                &[wu[1], wv[1]],
                &cell_spec,
            );
            acc += r.value;
            ok &= conv;
        }
    }
    (FRAC_1_SQRT_2 * acc, ok)
}

/// Per-level tolerance used by the nested φ₃ quadrature.
pub fn phi3_default_spec() -> QuadSpec {
    QuadSpec { abs_tol: 1e-6, rel_tol: 1e-8, max_depth: 10, base_order: 6 }
}

/// φ₁ as an [`HFunction`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Phi1;

impl HFunction for Phi1 {
    fn eval(&self, p: HPoint) -> f64 {
        phi1_eval(p)
    }
    fn support(&self) -> Box3 {
        support_box(1)
    }
    fn t_breaks(&self, _x: f64, _y: f64) -> Vec<f64> {
        vec![0.0, 1.0]
    }
    fn t_degree(&self) -> Option<usize> {
        Some(0)
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, 2.0], vec![0.0, 1.0])
    }
}

/// φ₂ by direct (exact piecewise) convolution.
#[derive(Debug, Clone, Copy, Default)]
pub struct Phi2;

impl HFunction for Phi2 {
    fn eval(&self, p: HPoint) -> f64 {
        psi2(2, p.x, p.y, p.t)
    }
    fn support(&self) -> Box3 {
        support_box(2)
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        psi2_t_breaks(2, x, y)
    }
    fn t_degree(&self) -> Option<usize> {
        Some(3)
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, 2.0, 4.0], vec![0.0, 1.0, 2.0])
    }
}

/// psi2(3, ·), the inner level of φ₃, with its piecewise structure in t.
#[derive(Debug, Clone, Copy)]
struct Psi2Inner;

impl HFunction for Psi2Inner {
    fn eval(&self, p: HPoint) -> f64 {
        psi2(3, p.x, p.y, p.t)
    }
    fn support(&self) -> Box3 {
        // |½(vx − uy)| ≤ 2 over the integration ranges
        Box3::new([0.0, 0.0, -2.0], [4.0, 2.0, 5.0])
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        psi2_t_breaks(3, x, y)
    }
    fn t_degree(&self) -> Option<usize> {
        Some(4)
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, 2.0, 4.0], vec![0.0, 1.0, 2.0])
    }
}

/// φ₃ by nested quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Phi3 {
    pub spec: QuadSpec,
}

impl Default for Phi3 {
    fn default() -> Self {
        Phi3 { spec: phi3_default_spec() }
    }
}

impl HFunction for Phi3 {
    fn eval(&self, p: HPoint) -> f64 {
        phi3_eval_with(p, &self.spec).0
    }
    fn support(&self) -> Box3 {
        support_box(3)
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, 2.0, 4.0, 6.0], vec![0.0, 1.0, 2.0, 3.0])
    }
}

/// φ(x,y,t) = χ_{[0,2]}(x)χ_{[0,1]}(y)·h(t) with h a cardinal B-spline.
#[derive(Debug, Clone, Copy)]
pub struct SeparableGenerator {
    pub h: ClassicalBSpline,
}

impl SeparableGenerator {
    pub fn new(order: usize) -> Self {
        SeparableGenerator { h: ClassicalBSpline::new(order) }
    }
}

impl HFunction for SeparableGenerator {
    fn eval(&self, p: HPoint) -> f64 {
        if (0.0..=2.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) {
            self.h.eval(p.t)
        } else {
            0.0
        }
    }
    fn support(&self) -> Box3 {
        Box3::new([0.0, 0.0, 0.0], [2.0, 1.0, self.h.order as f64])
    }
    fn t_breaks(&self, _x: f64, _y: f64) -> Vec<f64> {
        self.h.knots()
    }
    fn t_degree(&self) -> Option<usize> {
        Some(self.h.order - 1)
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, 2.0], vec![0.0, 1.0])
    }
}

/// How a [`SplineModel`] evaluates φₙ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalStrategy {
    /// (1/√2)χ_Q; n = 1 only.
    ClosedForm,
    /// Inverse t-transform of the closed-form λ-slices; n = 2 only.
    SliceTransform(InversionSpec),
    /// Nested convolution quadrature; the s-integrals are exact, remaining
    /// levels use the given spec.
    NestedQuadrature(QuadSpec),
}

/// Evaluable representation of φₙ.
#[derive(Debug, Clone)]
pub struct SplineModel {
    pub order: usize,
    pub strategy: EvalStrategy,
    pub max_order: usize,
    pub cache: Option<Grid3D>,
}

impl SplineModel {
    /// Closed form for n = 1, slice transform for n = 2, nested quadrature above.
    pub fn new(order: usize) -> Result<Self> {
        let strategy = match order {
            1 => EvalStrategy::ClosedForm,
            2 => EvalStrategy::SliceTransform(InversionSpec::default()),
            _ => EvalStrategy::NestedQuadrature(phi3_default_spec()),
        };
        Self::with_strategy(order, strategy)
    }

    pub fn with_strategy(order: usize, strategy: EvalStrategy) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("spline order must be positive".into()));
        }
        if order > DEFAULT_MAX_ORDER {
            return Err(Error::OrderTooHigh { order, max: DEFAULT_MAX_ORDER });
        }
        let valid = match strategy {
            EvalStrategy::ClosedForm => order == 1,
            EvalStrategy::SliceTransform(_) => order == 2,
            EvalStrategy::NestedQuadrature(_) => true,
        };
        if !valid {
            return Err(Error::Domain(format!("strategy {strategy:?} does not apply to order {order}")));
        }
        Ok(SplineModel { order, strategy, max_order: DEFAULT_MAX_ORDER, cache: None })
    }

    pub fn support(&self) -> Box3 {
        support_box(self.order)
    }

    pub fn eval(&self, p: HPoint) -> Result<f64> {
        match self.strategy {
            EvalStrategy::ClosedForm => Ok(phi1_eval(p)),
            EvalStrategy::SliceTransform(spec) => Ok(phi2_eval_with(p, &spec)?.value),
            EvalStrategy::NestedQuadrature(spec) => match self.order {
                1 => Ok(phi1_eval(p)),
                2 => Ok(psi2(2, p.x, p.y, p.t)),
                3 => {
                    let (v, ok) = phi3_eval_with(p, &spec);
                    if ok {
                        Ok(v)
                    } else {
                        Err(Error::NonConvergence { estimate: f64::NAN, tolerance: spec.abs_tol })
                    }
                }
                n => Err(Error::OrderTooHigh { order: n, max: self.max_order }),
            },
        }
    }

    /// Samples φₙ on a grid (parallel over points) and keeps it as the cache.
    pub fn sample_grid(&mut self, lo: [f64; 3], hi: [f64; 3], shape: [usize; 3]) -> Result<&Grid3D> {
        let model = self.clone();
        let grid = Grid3D::try_fill(lo, hi, shape, |p| model.eval(p))?;
        self.cache = Some(grid);
        Ok(self.cache.as_ref().unwrap())
    }
}

/// φₙ(p) by the nested convolution (n ≤ 3).
pub fn phi_n_eval(n: usize, p: HPoint) -> Result<f64> {
    phi_n_eval_max(n, p, DEFAULT_MAX_ORDER)
}

pub fn phi_n_eval_max(n: usize, p: HPoint, max_order: usize) -> Result<f64> {
    if n > max_order || n > DEFAULT_MAX_ORDER {
        return Err(Error::OrderTooHigh { order: n, max: max_order.min(DEFAULT_MAX_ORDER) });
    }
    SplineModel::with_strategy(n, EvalStrategy::NestedQuadrature(phi3_default_spec()))?.eval(p)
}

/// The [`HFunction`] for φₙ used by the integrators (direct evaluation).
pub fn phi_function(n: usize) -> Result<std::sync::Arc<dyn HFunction>> {
    match n {
        1 => Ok(std::sync::Arc::new(Phi1)),
        2 => Ok(std::sync::Arc::new(Phi2)),
        3 => Ok(std::sync::Arc::new(Phi3::default())),
        _ => Err(Error::OrderTooHigh { order: n, max: DEFAULT_MAX_ORDER }),
    }
}

/// ∫φₙ; exact for n = 1, piecewise-exact t-integration for n = 2 and for
/// the inner level of n = 3.
pub fn spline_integral(n: usize) -> Result<f64> {
    match n {
        1 => Ok(SQRT_2),
        2 => Ok(integral(&Phi2, &QuadSpec::default().with_order(4))?.value),
        // the t-shift of the outer convolution integrates out, leaving
        // (1/√2)·|[0,2]×[0,1]|·∫psi2(3, ·)
        3 => Ok(FRAC_1_SQRT_2 * 2.0 * integral(&Psi2Inner, &QuadSpec::default().with_order(4))?.value),
        _ => Err(Error::OrderTooHigh { order: n, max: DEFAULT_MAX_ORDER }),
    }
}

/// ∫φₙ by plain 3-D adaptive quadrature of the callback (no structural hints).
pub fn spline_integral_quadrature(n: usize, spec: &QuadSpec) -> Result<f64> {
    let f = phi_function(n)?;
    let b = f.support();
    let r = crate::quad::integrate_nd(|q: &[f64]| f.eval(HPoint::new(q[0], q[1], q[2])), &b.lo, &b.hi, spec)?;
    Ok(r.value)
}

/// Lattice indices (k, l, m) whose translates L_{(2k,l,m)}φₙ can be nonzero
/// at (x, y, t) for some t ∈ [0, 1].
pub fn periodization_window(n: usize, x: f64, y: f64) -> Vec<crate::group::LatticeIndex> {
    let sb = support_box(n);
    let mut out = Vec::new();
    let k_lo = ((x - sb.hi[0]) / 2.0).ceil() as i64;
    let k_hi = ((x - sb.lo[0]) / 2.0).floor() as i64;
    let l_lo = (y - sb.hi[1]).ceil() as i64;
    let l_hi = (y - sb.lo[1]).floor() as i64;
    for k in k_lo..=k_hi {
        for l in l_lo..=l_hi {
            let c = 0.5 * (-(l as f64) * x + 2.0 * k as f64 * y);
            let m_lo = (c - sb.hi[2]).ceil() as i64;
            let m_hi = (1.0 - sb.lo[2] + c).floor() as i64;
            for m in m_lo..=m_hi {
                out.push(crate::group::LatticeIndex::new(k, l, m));
            }
        }
    }
    out
}

/// ∫₀¹ Σ_{k,l,m} L_{(2k,l,m)}φₙ(x, y, t) dt over the support-determined window.
pub fn periodization_check(n: usize, x: f64, y: f64) -> Result<f64> {
    let f = phi_function(n)?;
    let window = periodization_window(n, x, y);
    let translates: Vec<LeftTranslate<std::sync::Arc<dyn HFunction>>> =
        window.iter().map(|&g| LeftTranslate::lattice(g, f.clone())).collect();
    let mut breaks = Vec::new();
    for tr in &translates {
        breaks.extend(tr.t_breaks(x, y));
    }
    let sum = |t: f64| translates.iter().map(|tr| tr.eval(HPoint::new(x, y, t))).sum::<f64>();
    let spec = QuadSpec { abs_tol: 1e-9, rel_tol: 1e-9, max_depth: 12, base_order: 8 };
    t_integral(sum, 0.0, 1.0, &breaks, f.t_degree(), &spec)
}
