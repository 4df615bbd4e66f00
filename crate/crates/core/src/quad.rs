//! Gauss–Legendre quadrature: fixed rules, piecewise rules with known
//! breakpoints, and globally adaptive tensor-product integration on boxes.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::{BinaryHeap, HashMap};
use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Scalar types the integrators can accumulate.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign + 'static
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and rule size for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections of any one axis.
    pub max_depth: usize,
    /// Gauss–Legendre points per axis and panel.
    pub base_order: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 12, base_order: 16 }
    }
}

impl QuadSpec {
    /// Default for three-dimensional boxes.
    pub fn three_d() -> Self {
        QuadSpec { abs_tol: 1e-8, base_order: 8, ..Default::default() }
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.base_order = order;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) || self.base_order < 4 {
            return Err(Error::Domain(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value and error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
}

/// Nodes and weights of the n-point rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_a^b f.
    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> T {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * (w * h);
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared cached rule.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("rule cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
}

/// Sorted, deduplicated panel edges: a, the breaks strictly inside (a, b), b.
pub fn panel_edges(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges = Vec::with_capacity(breaks.len() + 2);
    edges.push(a);
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b && x.is_finite()).collect();
    inner.sort_by(|p, q| p.partial_cmp(q).unwrap());
    for x in inner {
        if x - edges[edges.len() - 1] > 1e-14 * (1.0 + x.abs()) {
            edges.push(x);
        }
    }
    if b - edges[edges.len() - 1] > 0.0 || edges.len() == 1 {
        edges.push(b);
    } else {
        let last = edges.len() - 1;
        edges[last] = b;
    }
    edges
}

/// Fixed n-point rule on every panel between breakpoints. Exact for piecewise
/// polynomials of degree ≤ 2n−1 whose pieces end on the supplied breaks.
pub fn piecewise_gl<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, breaks: &[f64], n: usize) -> T {
    if !(b > a) {
        return T::zero();
    }
    let rule = gauss_legendre(n);
    let edges = panel_edges(a, b, breaks);
    let mut acc = T::zero();
    for w in edges.windows(2) {
        acc += rule.integrate(&f, w[0], w[1]);
    }
    acc
}

/// Like [`piecewise_gl`] with a caller-held rule; sorts `breaks` in place and
/// does not allocate.
pub fn piecewise_with<T: QuadValue, F: Fn(f64) -> T>(rule: &GaussLegendre, f: F, a: f64, b: f64, breaks: &mut [f64]) -> T {
    if !(b > a) {
        return T::zero();
    }
    breaks.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap_or(Ordering::Equal));
    let eps = 1e-14 * (1.0 + a.abs().max(b.abs()));
    let mut acc = T::zero();
    let mut prev = a;
    for &x in breaks.iter() {
        if x > prev + eps && x < b - eps {
            acc += rule.integrate(&f, prev, x);
            prev = x;
        }
    }
    acc += rule.integrate(&f, prev, b);
    acc
}

struct Cell<T> {
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: Vec<usize>,
    value: T,
    error: f64,
}

impl<T> PartialEq for Cell<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Cell<T> {}
impl<T> PartialOrd for Cell<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Cell<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Tensor rule of order n together with the embedded lower-order estimate.
fn tensor_pair<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    high: &GaussLegendre,
    low: &GaussLegendre,
    scratch: &mut Vec<f64>,
) -> (T, T, usize) {
    let d = lo.len();
    let vh = tensor(f, lo, hi, high, scratch);
    let vl = tensor(f, lo, hi, low, scratch);
    (vh, vl, high.len().pow(d as u32) + low.len().pow(d as u32))
}

fn tensor<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    rule: &GaussLegendre,
    x: &mut Vec<f64>,
) -> T {
    let d = lo.len();
    let n = rule.len();
    x.clear();
    x.resize(d, 0.0);
    let half: Vec<f64> = (0..d).map(|i| 0.5 * (hi[i] - lo[i])).collect();
    let mid: Vec<f64> = (0..d).map(|i| 0.5 * (hi[i] + lo[i])).collect();
    let jac: f64 = half.iter().product();
    let mut idx = vec![0usize; d];
    let mut acc = T::zero();
    loop {
        let mut w = jac;
        for i in 0..d {
            x[i] = mid[i] + half[i] * rule.nodes[idx[i]];
            w *= rule.weights[idx[i]];
        }
        acc += f(x) * w;
        let mut i = 0;
        loop {
            if i == d {
                return acc;
            }
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Globally adaptive tensor Gauss–Legendre integration over the box [lo, hi].
///
/// Each cell carries the difference between the n-point and ⌈n/2⌉-point rules as
/// its error estimate; the worst cell is bisected along its relatively longest
/// axis until the total estimate meets `spec`.
pub fn integrate_nd<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: F,
    lo: &[f64],
    hi: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    spec.validate()?;
    let (r, converged) = adaptive_nd(f, lo, hi, spec);
    if converged {
        Ok(r)
    } else {
        Err(Error::NonConvergence { estimate: r.error, tolerance: spec.tolerance(r.value.magnitude()) })
    }
}

/// Like [`integrate_nd`] but always returns the best estimate, flagged with
/// whether the tolerance was met.
pub fn integrate_nd_best<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: F,
    lo: &[f64],
    hi: &[f64],
    spec: &QuadSpec,
) -> (QuadResult<T>, bool) {
    adaptive_nd(f, lo, hi, spec)
}

fn adaptive_nd<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: F,
    lo: &[f64],
    hi: &[f64],
    spec: &QuadSpec,
) -> (QuadResult<T>, bool) {
    let d = lo.len();
    assert_eq!(d, hi.len());
    if d == 0 {
        return (QuadResult { value: f(&[]), error: 0.0, evals: 1 }, true);
    }
    if (0..d).any(|i| !(hi[i] > lo[i])) {
        return (QuadResult { value: T::zero(), error: 0.0, evals: 0 }, true);
    }
    let high = gauss_legendre(spec.base_order);
    let low = gauss_legendre((spec.base_order + 1) / 2);
    let root_width: Vec<f64> = (0..d).map(|i| hi[i] - lo[i]).collect();
    let mut scratch = Vec::with_capacity(d);
    let (vh, vl, mut evals) = tensor_pair(&f, lo, hi, &high, &low, &mut scratch);
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Cell<T>> = Vec::new();
    let mut total = vh;
    let mut total_err = (vh - vl).magnitude();
    heap.push(Cell { lo: lo.to_vec(), hi: hi.to_vec(), depth: vec![0; d], value: vh, error: total_err });
    let max_cells = 4_000_000 / high.len().pow(d as u32).max(1) + 64;
    let mut cells = 1usize;
    let mut converged = true;
    loop {
        let tol = spec.tolerance(total.magnitude());
        if total_err <= tol {
            break;
        }
        let Some(cell) = heap.pop() else {
            converged = false;
            break;
        };
        let axis = (0..d)
            .filter(|&i| cell.depth[i] < spec.max_depth)
            .max_by(|&a, &b| {
                let ra = (cell.hi[a] - cell.lo[a]) / root_width[a];
                let rb = (cell.hi[b] - cell.lo[b]) / root_width[b];
                ra.partial_cmp(&rb).unwrap().then(b.cmp(&a))
            });
        let Some(axis) = axis else {
            frozen.push(cell);
            continue;
        };
        if cells > max_cells {
            heap.push(cell);
            converged = false;
            break;
        }
        let mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        total = total - cell.value;
        total_err -= cell.error;
        for half in 0..2 {
            let mut clo = cell.lo.clone();
            let mut chi = cell.hi.clone();
            if half == 0 {
                chi[axis] = mid;
            } else {
                clo[axis] = mid;
            }
            let (vh, vl, e) = tensor_pair(&f, &clo, &chi, &high, &low, &mut scratch);
            evals += e;
            let err = (vh - vl).magnitude();
            total += vh;
            total_err += err;
            let mut depth = cell.depth.clone();
            depth[axis] += 1;
            heap.push(Cell { lo: clo, hi: chi, depth, value: vh, error: err });
        }
        cells += 1;
    }
    // resum to shed the drift of the running totals
    let mut value = T::zero();
    let mut error = 0.0;
    for c in heap.iter().chain(frozen.iter()) {
        value += c.value;
        error += c.error;
    }
    (QuadResult { value, error, evals }, converged)
}

/// Adaptive integration of f over [a, b].
pub fn integrate_1d<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult<T>> {
    if b < a {
        let r = integrate_1d(f, b, a, spec)?;
        return Ok(QuadResult { value: r.value * -1.0, ..r });
    }
    integrate_nd(|x: &[f64]| f(x[0]), &[a], &[b], spec)
}

/// Adaptive integration over a product of cells; `edges[i]` lists the cell
/// edges along axis i (sorted). The tolerance is shared evenly among cells.
pub fn integrate_cells<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: F,
    edges: &[Vec<f64>],
    spec: &QuadSpec,
) -> Result<QuadResult<T>> {
    let d = edges.len();
    let counts: Vec<usize> = edges.iter().map(|e| e.len().saturating_sub(1)).collect();
    let ncells: usize = counts.iter().product();
    if ncells == 0 {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evals: 0 });
    }
    let cell_spec = QuadSpec { abs_tol: spec.abs_tol / ncells as f64, ..*spec };
    let mut idx = vec![0usize; d];
    let mut out = QuadResult { value: T::zero(), error: 0.0, evals: 0 };
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    for _ in 0..ncells {
        for i in 0..d {
            lo[i] = edges[i][idx[i]];
            hi[i] = edges[i][idx[i] + 1];
        }
        let r = integrate_nd(&f, &lo, &hi, &cell_spec)?;
        out.value += r.value;
        out.error += r.error;
        out.evals += r.evals;
        for i in 0..d {
            idx[i] += 1;
            if idx[i] < counts[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(out)
}
