//! λ-slices f^λ(x,y) = ∫ f(x,y,t) e^{2πiλt} dt, the kernels
//! K(ξ,η) = ∫ f^λ(x, η−ξ) e^{πiλx(ξ+η)} dx of the group Fourier transform,
//! the closed-form kernel of φ̂₁ and its recursion, and the relation
//! ‖f^λ‖² = |λ|·‖K‖².

use crate::error::{Error, Result};
use crate::hfun::HFunction;
use crate::quad::{gauss_legendre, integrate_cells, integrate_nd, panel_edges, QuadResult, QuadSpec};
use crate::rsum::{sum_over_r, Decay, TailBound};
use crate::specfun::sinc;
use crate::splines::phi2_slice::phi2_lambda_limit;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

type SliceFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum SliceRepr {
    Analytic(SliceFn),
    /// Bilinear interpolation of node values; `shape` nodes per axis, y fastest.
    Sampled { shape: [usize; 2], values: Arc<Vec<Complex64>> },
}

/// A complex function of (x, y) at fixed λ, supported in `[x_range] × [y_range]`.
#[derive(Clone)]
pub struct Slice2D {
    pub lambda: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Lines x = const across which the slice may be non-smooth.
    pub x_breaks: Vec<f64>,
    /// Lines y = const across which the slice may be non-smooth.
    pub y_breaks: Vec<f64>,
    repr: SliceRepr,
}

impl std::fmt::Debug for Slice2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Slice2D")
            .field("lambda", &self.lambda)
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .field("sampled", &matches!(self.repr, SliceRepr::Sampled { .. }))
            .finish()
    }
}

impl Slice2D {
    pub fn analytic<F>(lambda: f64, x_range: (f64, f64), y_range: (f64, f64), x_breaks: Vec<f64>, y_breaks: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Slice2D { lambda, x_range, y_range, x_breaks, y_breaks, repr: SliceRepr::Analytic(Arc::new(f)) }
    }

    /// The identically zero slice.
    pub fn zero(lambda: f64) -> Self {
        Self::analytic(lambda, (0.0, 0.0), (0.0, 0.0), vec![], vec![], |_, _| Complex64::new(0.0, 0.0))
    }

    /// φ₁^λ = (1/√2) e^{πiλ} sinc(λ) χ_{[0,2]}(x) χ_{[0,1]}(y).
    pub fn phi1(lambda: f64) -> Self {
        let c = Complex64::from_polar(sinc(lambda) / SQRT_2, PI * lambda);
        Self::analytic(lambda, (0.0, 2.0), (0.0, 1.0), vec![0.0, 2.0], vec![0.0, 1.0], move |x, y| {
            if (0.0..=2.0).contains(&x) && (0.0..=1.0).contains(&y) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// φ₂^λ from its closed form (continuous through λ = 0).
    pub fn phi2(lambda: f64) -> Self {
        Self::analytic(lambda, (0.0, 4.0), (0.0, 2.0), vec![0.0, 2.0, 4.0], vec![0.0, 1.0, 2.0], move |x, y| {
            phi2_lambda_limit(lambda, x, y)
        })
    }

    /// χ_{[0,2]}(x) χ_{[0,1]}(y) ĥ(−λ), the slice of χ_{[0,2]×[0,1]}(x,y)·h(t).
    pub fn separable(lambda: f64, h_hat_minus_lambda: Complex64) -> Self {
        let c = h_hat_minus_lambda;
        Self::analytic(lambda, (0.0, 2.0), (0.0, 1.0), vec![0.0, 2.0], vec![0.0, 1.0], move |x, y| {
            if (0.0..=2.0).contains(&x) && (0.0..=1.0).contains(&y) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        if x < self.x_range.0 || x > self.x_range.1 || y < self.y_range.0 || y > self.y_range.1 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.repr {
            SliceRepr::Analytic(f) => f(x, y),
            SliceRepr::Sampled { shape, values } => {
                let (nx, ny) = (shape[0], shape[1]);
                let fx = if nx > 1 { (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (nx - 1) as f64 } else { 0.0 };
                let fy = if ny > 1 { (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (ny - 1) as f64 } else { 0.0 };
                let i = (fx.floor() as usize).min(nx.saturating_sub(2));
                let j = (fy.floor() as usize).min(ny.saturating_sub(2));
                let (ax, ay) = (fx - i as f64, fy - j as f64);
                let at = |a: usize, b: usize| values[a.min(nx - 1) * ny + b.min(ny - 1)];
                at(i, j) * ((1.0 - ax) * (1.0 - ay))
                    + at(i + 1, j) * (ax * (1.0 - ay))
                    + at(i, j + 1) * ((1.0 - ax) * ay)
                    + at(i + 1, j + 1) * (ax * ay)
            }
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.repr, SliceRepr::Sampled { .. })
    }

    /// Materializes the slice on a regular node grid (parallel over nodes).
    pub fn sampled(&self, shape: [usize; 2]) -> Result<Slice2D> {
        if shape[0] < 2 || shape[1] < 2 {
            return Err(Error::Domain("sampled slices need at least 2 nodes per axis".into()));
        }
        let (nx, ny) = (shape[0], shape[1]);
        let node = |r: (f64, f64), n: usize, i: usize| r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64;
        let values: Vec<Complex64> = (0..nx * ny)
            .into_par_iter()
            .map(|k| self.eval(node(self.x_range, nx, k / ny), node(self.y_range, ny, k % ny)))
            .collect();
        Ok(Slice2D { repr: SliceRepr::Sampled { shape, values: Arc::new(values) }, ..self.clone() })
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Slice2D {
        let me = self.clone();
        Slice2D::analytic(self.lambda, self.x_range, self.y_range, self.x_breaks.clone(), self.y_breaks.clone(), move |x, y| {
            me.eval(x, y).conj()
        })
    }

    fn cell_edges(&self) -> [Vec<f64>; 2] {
        [
            panel_edges(self.x_range.0, self.x_range.1, &self.x_breaks),
            panel_edges(self.y_range.0, self.y_range.1, &self.y_breaks),
        ]
    }

    /// ‖F‖² over ℝ² by adaptive quadrature on the break cells.
    pub fn norm_sq(&self, spec: &QuadSpec) -> Result<f64> {
        if !(self.x_range.1 > self.x_range.0 && self.y_range.1 > self.y_range.0) {
            return Ok(0.0);
        }
        let e = self.cell_edges();
        Ok(integrate_cells(|p: &[f64]| self.eval(p[0], p[1]).norm_sqr(), &e, spec)?.value)
    }
}

/// ⟨F, G⟩ = ∫∫ F·conj(G) over the common support, cells split at both break sets.
pub fn slice_inner(f: &Slice2D, g: &Slice2D, spec: &QuadSpec) -> Result<Complex64> {
    let x0 = f.x_range.0.max(g.x_range.0);
    let x1 = f.x_range.1.min(g.x_range.1);
    let y0 = f.y_range.0.max(g.y_range.0);
    let y1 = f.y_range.1.min(g.y_range.1);
    if !(x1 > x0 && y1 > y0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let xb: Vec<f64> = f.x_breaks.iter().chain(&g.x_breaks).copied().collect();
    let yb: Vec<f64> = f.y_breaks.iter().chain(&g.y_breaks).copied().collect();
    let e = [panel_edges(x0, x1, &xb), panel_edges(y0, y1, &yb)];
    let r: QuadResult<Complex64> = integrate_cells(|p: &[f64]| f.eval(p[0], p[1]) * g.eval(p[0], p[1]).conj(), &e, spec)?;
    Ok(r.value)
}

/// Panel edges on [a, b] refined so no panel exceeds `max_width`.
fn fine_edges(a: f64, b: f64, breaks: &[f64], max_width: f64) -> Vec<f64> {
    let coarse = panel_edges(a, b, breaks);
    let mut out = vec![coarse[0]];
    for w in coarse.windows(2) {
        let n = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    out
}

/// f^λ(x, y) = ∫_{t_support} f(x,y,t) e^{2πiλt} dt for each (x, y).
///
/// When f declares its t-breaks and polynomial degree the t-integral is a
/// Gauss–Legendre sum on panels no wider than 1/(2|λ|); otherwise adaptive.
pub fn slice(f: Arc<dyn HFunction>, lambda: f64, t_support: (f64, f64)) -> Slice2D {
    let b = f.support();
    let (xb, yb) = f.xy_breaks();
    let spec = QuadSpec { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 16, base_order: 12 };
    let width = if lambda == 0.0 { 1.0 } else { (0.5 / lambda.abs()).min(1.0) };
    Slice2D::analytic(lambda, (b.lo[0], b.hi[0]), (b.lo[1], b.hi[1]), xb, yb, move |x, y| {
        let (t0, t1) = (t_support.0.max(b.lo[2]), t_support.1.min(b.hi[2]));
        if !(t1 > t0) {
            return Complex64::new(0.0, 0.0);
        }
        let g = |t: f64| Complex64::from_polar(f.eval(crate::group::HPoint::new(x, y, t)), 2.0 * PI * lambda * t);
        match f.t_degree() {
            Some(d) => {
                let rule = gauss_legendre(d / 2 + 12);
                let e = fine_edges(t0, t1, &f.t_breaks(x, y), width);
                e.windows(2).map(|w| rule.integrate(g, w[0], w[1])).sum()
            }
            None => integrate_nd(|s: &[f64]| g(s[0]), &[t0], &[t1], &spec)
                .map(|r| r.value)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        }
    })
}

type KernelFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// A kernel K(ξ, η) at fixed λ, vanishing unless η − ξ lies in `s_range`.
#[derive(Clone)]
pub struct Kernel2D {
    pub lambda: f64,
    pub s_range: (f64, f64),
    /// Values of η − ξ where the kernel may jump.
    pub s_breaks: Vec<f64>,
    f: KernelFn,
}

impl std::fmt::Debug for Kernel2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel2D").field("lambda", &self.lambda).field("s_range", &self.s_range).finish()
    }
}

impl Kernel2D {
    pub fn new<F>(lambda: f64, s_range: (f64, f64), s_breaks: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Kernel2D { lambda, s_range, s_breaks, f: Arc::new(f) }
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Complex64 {
        let s = eta - xi;
        if s < self.s_range.0 || s > self.s_range.1 {
            return Complex64::new(0.0, 0.0);
        }
        (self.f)(xi, eta)
    }

    /// Values on the tensor grid xi × eta, row-major with η fastest.
    pub fn sample(&self, xi: &[f64], eta: &[f64]) -> Vec<Complex64> {
        let n = eta.len();
        (0..xi.len() * n).into_par_iter().map(|k| self.eval(xi[k / n], eta[k % n])).collect()
    }
}

/// √2 e^{πiλ} sinc(λ) e^{πiλ(ξ+η)} sinc(λ(ξ+η)) χ_{[0,1]}(η−ξ).
pub fn kernel_phi1(lambda: f64, xi: f64, eta: f64) -> Result<Complex64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("kernel needs a finite nonzero lambda, got {lambda}")));
    }
    Ok(kernel_phi1_unchecked(lambda, xi, eta))
}

fn kernel_phi1_unchecked(lambda: f64, xi: f64, eta: f64) -> Complex64 {
    let s = eta - xi;
    if !(0.0..=1.0).contains(&s) {
        return Complex64::new(0.0, 0.0);
    }
    let w = xi + eta;
    Complex64::from_polar(SQRT_2 * sinc(lambda) * sinc(lambda * w), PI * lambda * (1.0 + w))
}

/// The closed-form φ̂₁(λ) kernel as a [`Kernel2D`].
pub fn kernel_phi1_kernel(lambda: f64) -> Result<Kernel2D> {
    kernel_phi1(lambda, 0.0, 0.0)?;
    Ok(Kernel2D::new(lambda, (0.0, 1.0), vec![0.0, 1.0], move |xi, eta| kernel_phi1_unchecked(lambda, xi, eta)))
}

const GL_ORDER: usize = 16;

/// ∫ F(x, s) e^{πiλxw} dx with panels sized to the oscillation.
fn x_transform(s: &Slice2D, y: f64, w: f64) -> Complex64 {
    let k = PI * s.lambda * w;
    // ≤ 1.5 oscillations per 16-point panel
    let width = if k == 0.0 { f64::INFINITY } else { 3.0 * PI / k.abs() };
    let rule = gauss_legendre(GL_ORDER);
    let e = fine_edges(s.x_range.0, s.x_range.1, &s.x_breaks, width.min(1.0));
    e.windows(2)
        .map(|p| rule.integrate(|x| s.eval(x, y) * Complex64::from_polar(1.0, k * x), p[0], p[1]))
        .sum()
}

/// K(ξ,η) = ∫ F(x, η−ξ) e^{πiλx(ξ+η)} dx, evaluated lazily.
pub fn kernel_from_slice(s: &Slice2D) -> Kernel2D {
    let me = s.clone();
    Kernel2D::new(s.lambda, s.y_range, s.y_breaks.clone(), move |xi, eta| x_transform(&me, eta - xi, xi + eta))
}

/// Kₙ(ξ,η) = √2 e^{πiλ}sinc(λ) e^{2πiλη} ∫₀¹ e^{−πiλy} sinc(λ(2η−y)) Kₙ₋₁(ξ, η−y) dy.
pub fn kernel_recursion(prev: &Kernel2D) -> Result<Kernel2D> {
    let lambda = prev.lambda;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("kernel needs a finite nonzero lambda, got {lambda}")));
    }
    let pre = Complex64::from_polar(SQRT_2 * sinc(lambda), PI * lambda);
    let p = prev.clone();
    let mut breaks: Vec<f64> = prev.s_breaks.iter().flat_map(|b| [*b, b + 1.0]).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let s_range = (prev.s_range.0, prev.s_range.1 + 1.0);
    Ok(Kernel2D::new(lambda, s_range, breaks, move |xi, eta| {
        let s = eta - xi;
        let inner_breaks: Vec<f64> = p.s_breaks.iter().map(|b| s - b).collect();
        let rule = gauss_legendre(GL_ORDER);
        let e = fine_edges(0.0, 1.0, &inner_breaks, 0.5);
        let integral: Complex64 = e
            .windows(2)
            .map(|w| {
                rule.integrate(
                    |y| Complex64::from_polar(sinc(lambda * (2.0 * eta - y)), -PI * lambda * y) * p.eval(xi, eta - y),
                    w[0],
                    w[1],
                )
            })
            .sum();
        pre * Complex64::from_polar(1.0, 2.0 * PI * lambda * eta) * integral
    }))
}

/// Both sides of ‖F‖² = |λ|·∫∫|K_F|² dξ dη.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// The analytically added |w| > W contribution included in `rhs`.
    pub tail: f64,
}

/// Truncation for the w = ξ+η integral: λW is an integer so the leading
/// cross terms of the tail expansion cancel.
pub const WEYL_LAMBDA_W: f64 = 40.0;

/// One-sided values and derivatives of x ↦ F(x, y) at a break point.
fn side_jets(s: &Slice2D, y: f64, b: f64) -> (Complex64, Complex64) {
    let d = 1e-4;
    let tiny = 1e-12 * (1.0 + b.abs());
    let l = |k: f64| s.eval(b - tiny - k * d, y);
    let r = |k: f64| s.eval(b + tiny + k * d, y);
    let jump = r(0.0) - l(0.0);
    // second-order one-sided differences
    let dr = (r(0.0) * -3.0 + r(1.0) * 4.0 - r(2.0)) / (2.0 * d);
    let dl = (l(0.0) * 3.0 - l(1.0) * 4.0 + l(2.0)) / (2.0 * d);
    (jump, dr - dl)
}

/// Quadrature of both sides. The kernel side uses the coordinates s = η−ξ,
/// w = ξ+η (dξdη = ½ ds dw), |w| ≤ W by Gauss–Legendre, and the |w| > W part
/// from the large-w expansion K ≈ Σ_b e^{πiλbw}(−J_b/(iκ) + J'_b/κ²) with
/// κ = πλw, J_b and J'_b the jumps of F and ∂ₓF across the x-break b.
pub fn weyl_norm_check(s: &Slice2D) -> Result<WeylCheck> {
    let lambda = s.lambda;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("Weyl relation needs a finite nonzero lambda, got {lambda}")));
    }
    if !(s.x_range.1 > s.x_range.0 && s.y_range.1 > s.y_range.0) {
        return Ok(WeylCheck { lhs: 0.0, rhs: 0.0, tail: 0.0 });
    }
    let spec = QuadSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 14, base_order: 12 };
    let lhs = s.norm_sq(&spec)?;
    let la = lambda.abs();
    let big_w = WEYL_LAMBDA_W / la;
    let lx = s.x_range.1 - s.x_range.0;
    let rule = gauss_legendre(GL_ORDER);
    // s-nodes
    let s_edges = fine_edges(s.y_range.0, s.y_range.1, &s.y_breaks, 0.5);
    let mut s_nodes = Vec::new();
    for e in s_edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            s_nodes.push((c + h * x, wt * h));
        }
    }
    // x-nodes fine enough for the largest w
    let kmax = PI * la * big_w;
    let x_edges = fine_edges(s.x_range.0, s.x_range.1, &s.x_breaks, (3.0 * PI / kmax).min(1.0));
    let mut x_nodes = Vec::new();
    for e in x_edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            x_nodes.push((c + h * x, wt * h));
        }
    }
    // w-nodes: |K|² oscillates at most with frequency πλ·2·lx
    let w_width = (3.0 * PI / (PI * la * 2.0 * lx)).min(1.0);
    let w_edges = fine_edges(-big_w, big_w, &[0.0], w_width);
    let mut w_nodes = Vec::new();
    for e in w_edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            w_nodes.push((c + h * x, wt * h));
        }
    }
    let mut xb: Vec<f64> = s.x_breaks.iter().copied().filter(|b| *b >= s.x_range.0 && *b <= s.x_range.1).collect();
    xb.push(s.x_range.0);
    xb.push(s.x_range.1);
    xb.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xb.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let per_s: Vec<(f64, f64)> = s_nodes
        .par_iter()
        .map(|&(y, ws)| {
            let fx: Vec<Complex64> = x_nodes.iter().map(|&(x, wx)| s.eval(x, y) * wx).collect();
            let mut acc = 0.0;
            for &(w, ww) in &w_nodes {
                let k = PI * lambda * w;
                let mut kv = Complex64::new(0.0, 0.0);
                for (f, &(x, _)) in fx.iter().zip(&x_nodes) {
                    kv += f * Complex64::from_polar(1.0, k * x);
                }
                acc += ww * kv.norm_sqr();
            }
            // tail: Σ|J|²/κ² + |J'|²/κ⁴ averaged over the oscillating cross terms
            let mut a2 = 0.0;
            let mut b2 = 0.0;
            for &b in &xb {
                let (j, dj) = side_jets(s, y, b);
                a2 += j.norm_sqr();
                b2 += dj.norm_sqr();
            }
            let c = PI * la;
            let tail = 2.0 * a2 / (c * c * big_w) + 2.0 * b2 / (3.0 * c.powi(4) * big_w.powi(3));
            (ws * acc, ws * tail)
        })
        .collect();
    let body: f64 = per_s.iter().map(|p| p.0).sum();
    let tail: f64 = per_s.iter().map(|p| p.1).sum();
    Ok(WeylCheck { lhs, rhs: la * 0.5 * (body + tail), tail: la * 0.5 * tail })
}

/// Σ_r ‖F_{λ−r}‖² for a slice family μ ↦ F_μ, with the r-sum truncated per `decay`.
pub fn tau_norm_sq<F>(family: F, lambda: f64, tol: f64, decay: Decay) -> Result<(f64, TailBound)>
where
    F: Fn(f64) -> Slice2D,
{
    let spec = QuadSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 12, base_order: 12 };
    let failure = std::cell::RefCell::new(None);
    let term = |r: i64| match family(lambda - r as f64).norm_sq(&spec) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let out = sum_over_r(term, lambda, tol, decay)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out)
}
