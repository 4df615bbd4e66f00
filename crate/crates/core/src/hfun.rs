//! Evaluable functions on the Heisenberg group together with the structural
//! hints (support box, smoothness breaks) the integrators use.

use crate::error::Result;
use crate::group::{group_inv, HPoint, LatticeIndex};
use crate::quad::{gauss_legendre, integrate_cells, integrate_nd, panel_edges, piecewise_gl, QuadResult, QuadSpec};
use std::sync::Arc;

/// Axis-aligned box [lo, hi] in (x, y, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    pub const fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        Box3 { lo, hi }
    }

    pub fn contains(&self, p: HPoint) -> bool {
        let c = [p.x, p.y, p.t];
        (0..3).all(|i| c[i] >= self.lo[i] && c[i] <= self.hi[i])
    }

    pub fn intersect(&self, o: &Box3) -> Option<Box3> {
        let mut b = *self;
        for i in 0..3 {
            b.lo[i] = self.lo[i].max(o.lo[i]);
            b.hi[i] = self.hi[i].min(o.hi[i]);
            if b.hi[i] <= b.lo[i] {
                return None;
            }
        }
        Some(b)
    }

    pub fn inflate(&self, factor: f64) -> Box3 {
        let mut b = *self;
        for i in 0..3 {
            let c = 0.5 * (self.lo[i] + self.hi[i]);
            let h = 0.5 * (self.hi[i] - self.lo[i]) * factor;
            b.lo[i] = c - h;
            b.hi[i] = c + h;
        }
        b
    }

    /// Bounding box of γ·B; left multiplication is affine, so corners suffice.
    pub fn left_mul(&self, gamma: HPoint) -> Box3 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in 0..8 {
            let p = HPoint::new(
                if c & 1 == 0 { self.lo[0] } else { self.hi[0] },
                if c & 2 == 0 { self.lo[1] } else { self.hi[1] },
                if c & 4 == 0 { self.lo[2] } else { self.hi[2] },
            );
            let q = gamma * p;
            let qc = [q.x, q.y, q.t];
            for i in 0..3 {
                lo[i] = lo[i].min(qc[i]);
                hi[i] = hi[i].max(qc[i]);
            }
        }
        Box3 { lo, hi }
    }
}

/// A real function on ℍ with compact support.
pub trait HFunction: Send + Sync {
    fn eval(&self, p: HPoint) -> f64;

    /// A box containing the support.
    fn support(&self) -> Box3;

    /// For fixed (x, y): the t-values where t ↦ eval(x, y, t) may fail to be smooth.
    fn t_breaks(&self, _x: f64, _y: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Degree bound of the polynomial pieces between `t_breaks`, when known.
    fn t_degree(&self) -> Option<usize> {
        None
    }

    /// Lines x = const and y = const across which the function may fail to be smooth.
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (Vec::new(), Vec::new())
    }
}

impl<T: HFunction + ?Sized> HFunction for Arc<T> {
    fn eval(&self, p: HPoint) -> f64 {
        (**self).eval(p)
    }
    fn support(&self) -> Box3 {
        (**self).support()
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        (**self).t_breaks(x, y)
    }
    fn t_degree(&self) -> Option<usize> {
        (**self).t_degree()
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        (**self).xy_breaks()
    }
}

/// A plain callback with a declared support box.
pub struct FnH<F> {
    pub f: F,
    pub support: Box3,
}

impl<F: Fn(HPoint) -> f64 + Send + Sync> HFunction for FnH<F> {
    fn eval(&self, p: HPoint) -> f64 {
        if self.support.contains(p) {
            (self.f)(p)
        } else {
            0.0
        }
    }
    fn support(&self) -> Box3 {
        self.support
    }
}

/// L_γ f : p ↦ f(γ⁻¹p).
#[derive(Clone)]
pub struct LeftTranslate<F> {
    pub gamma: HPoint,
    pub f: F,
}

impl<F: HFunction> LeftTranslate<F> {
    pub fn new(gamma: HPoint, f: F) -> Self {
        LeftTranslate { gamma, f }
    }

    pub fn lattice(idx: LatticeIndex, f: F) -> Self {
        LeftTranslate { gamma: idx.embed(), f }
    }

    /// Offset c with (γ⁻¹p).t = t + c.
    fn t_offset(&self, x: f64, y: f64) -> f64 {
        let g = self.gamma;
        -g.t + 0.5 * (g.x * y - g.y * x)
    }
}

impl<F: HFunction> HFunction for LeftTranslate<F> {
    fn eval(&self, p: HPoint) -> f64 {
        self.f.eval(group_inv(self.gamma) * p)
    }
    fn support(&self) -> Box3 {
        self.f.support().left_mul(self.gamma)
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        let c = self.t_offset(x, y);
        self.f.t_breaks(x - self.gamma.x, y - self.gamma.y).into_iter().map(|b| b - c).collect()
    }
    fn t_degree(&self) -> Option<usize> {
        self.f.t_degree()
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let (bx, by) = self.f.xy_breaks();
        (
            bx.into_iter().map(|v| v + self.gamma.x).collect(),
            by.into_iter().map(|v| v + self.gamma.y).collect(),
        )
    }
}

/// Finite linear combination Σ cᵢ fᵢ.
#[derive(Clone, Default)]
pub struct Combination {
    pub terms: Vec<(f64, Arc<dyn HFunction>)>,
}

impl Combination {
    pub fn new() -> Self {
        Combination { terms: Vec::new() }
    }

    pub fn push(&mut self, c: f64, f: Arc<dyn HFunction>) {
        self.terms.push((c, f));
    }
}

impl HFunction for Combination {
    fn eval(&self, p: HPoint) -> f64 {
        self.terms.iter().map(|(c, f)| if *c == 0.0 { 0.0 } else { c * f.eval(p) }).sum()
    }
    fn support(&self) -> Box3 {
        let mut it = self.terms.iter().map(|(_, f)| f.support());
        let Some(first) = it.next() else {
            return Box3::new([0.0; 3], [0.0; 3]);
        };
        it.fold(first, |a, b| {
            let mut u = a;
            for i in 0..3 {
                u.lo[i] = a.lo[i].min(b.lo[i]);
                u.hi[i] = a.hi[i].max(b.hi[i]);
            }
            u
        })
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        self.terms.iter().flat_map(|(_, f)| f.t_breaks(x, y)).collect()
    }
    fn t_degree(&self) -> Option<usize> {
        self.terms.iter().try_fold(0usize, |d, (_, f)| f.t_degree().map(|e| d.max(e)))
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let mut bx = Vec::new();
        let mut by = Vec::new();
        for (_, f) in &self.terms {
            let (a, b) = f.xy_breaks();
            bx.extend(a);
            by.extend(b);
        }
        (bx, by)
    }
}

/// f·χ_B for a closed box B.
#[derive(Clone)]
pub struct Restrict<F> {
    pub f: F,
    pub region: Box3,
}

impl<F: HFunction> HFunction for Restrict<F> {
    fn eval(&self, p: HPoint) -> f64 {
        if self.region.contains(p) {
            self.f.eval(p)
        } else {
            0.0
        }
    }
    fn support(&self) -> Box3 {
        self.f.support().intersect(&self.region).unwrap_or(Box3::new(self.region.lo, self.region.lo))
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        let mut b = self.f.t_breaks(x, y);
        b.push(self.region.lo[2]);
        b.push(self.region.hi[2]);
        b
    }
    fn t_degree(&self) -> Option<usize> {
        self.f.t_degree()
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut bx, mut by) = self.f.xy_breaks();
        bx.extend([self.region.lo[0], self.region.hi[0]]);
        by.extend([self.region.lo[1], self.region.hi[1]]);
        (bx, by)
    }
}

/// ∫ g(x, y, t) dt over [t0, t1], exact when the pieces between the supplied
/// breaks are polynomials of known degree, adaptive otherwise.
pub fn t_integral<G: Fn(f64) -> f64>(
    g: G,
    t0: f64,
    t1: f64,
    breaks: &[f64],
    degree: Option<usize>,
    spec: &QuadSpec,
) -> Result<f64> {
    if !(t1 > t0) {
        return Ok(0.0);
    }
    match degree {
        Some(d) => Ok(piecewise_gl(&g, t0, t1, breaks, d / 2 + 1)),
        None => {
            let edges = panel_edges(t0, t1, breaks);
            let mut acc = 0.0;
            let part = QuadSpec { abs_tol: spec.abs_tol / (edges.len() - 1) as f64, ..*spec };
            for w in edges.windows(2) {
                acc += integrate_nd(|s: &[f64]| g(s[0]), &[w[0]], &[w[1]], &part)?.value;
            }
            Ok(acc)
        }
    }
}

fn cell_edges(lo: f64, hi: f64, breaks: Vec<f64>) -> Vec<f64> {
    panel_edges(lo, hi, &breaks)
}

/// ∫_B f·g with B a box; (x, y) cells follow the declared break lines, the
/// t-integral uses the declared t-breaks.
pub fn inner_product(f: &dyn HFunction, g: &dyn HFunction, region: Box3, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let Some(b) = f.support().intersect(&g.support()).and_then(|s| s.intersect(&region)) else {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    };
    let (mut bx, mut by) = f.xy_breaks();
    let (gx, gy) = g.xy_breaks();
    bx.extend(gx);
    by.extend(gy);
    let edges = vec![cell_edges(b.lo[0], b.hi[0], bx), cell_edges(b.lo[1], b.hi[1], by)];
    let degree = match (f.t_degree(), g.t_degree()) {
        (Some(a), Some(c)) => Some(a + c),
        _ => None,
    };
    let failure = std::cell::Cell::new(None);
    let inner = |p: &[f64]| {
        let (x, y) = (p[0], p[1]);
        let mut br = f.t_breaks(x, y);
        br.extend(g.t_breaks(x, y));
        let r = t_integral(
            |t| {
                let q = HPoint::new(x, y, t);
                let a = f.eval(q);
                if a == 0.0 {
                    0.0
                } else {
                    a * g.eval(q)
                }
            },
            b.lo[2],
            b.hi[2],
            &br,
            degree,
            spec,
        );
        match r {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let r = integrate_cells(inner, &edges, spec)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(r)
}

/// The constant 1 on a box.
pub struct UnitOn(pub Box3);

impl HFunction for UnitOn {
    fn eval(&self, p: HPoint) -> f64 {
        if self.0.contains(p) {
            1.0
        } else {
            0.0
        }
    }
    fn support(&self) -> Box3 {
        self.0
    }
    fn t_degree(&self) -> Option<usize> {
        Some(0)
    }
}

/// ∫_{ℝ³} f, over the support box.
pub fn integral(f: &dyn HFunction, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    inner_product(f, &UnitOn(f.support()), f.support(), spec)
}

/// Mid-point tensor rule helper for coarse diagnostics.
pub fn gl_nodes(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let r = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    r.nodes.iter().zip(&r.weights).map(|(x, w)| (c + h * x, w * h)).collect()
}
