//! λ-twisted translates (T_{(u,v)})^λ F(x,y) = e^{πiλ(vx−uy)} F(x−u, y−v), their
//! inner products, the Gramian of {τ(L_{(2k,l,0)}g)(λ)} and the Riesz-sequence
//! diagnostics built on it.
//!
//! With a = λ − r the Gramian entry for lattice indices (k,l), (k′,l′) is
//! Σ_r e^{2πi a(lk′−kl′)} ⟨(T_{(2(k−k′), l−l′)})^a g^a, g^a⟩.

pub mod digamma;
pub mod phi2_bounds;

use crate::error::{Error, Result};
use crate::group::LatticeIndex;
use crate::hfun::{inner_product, Box3, LeftTranslate};
use crate::kernels::{slice_inner, Slice2D};
use crate::quad::QuadSpec;
use crate::rsum::{sum_over_r, Decay, TailBound};
use crate::splines::Phi1;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

pub use digamma::{a_p, a_p_direct, monotone_p_check, psi_derivative, psi_function, psi_minimize, PsiMinimum};
pub use phi2_bounds::{
    i_integral, i_sums, lower_estimates_phi2, phi2_gram_form, upper_bound_brackets, upper_bound_phi2, IForm, ISums,
    LowerEstimates, Phi2Form,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn inner_spec() -> QuadSpec {
    QuadSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 14, base_order: 12 }
}

/// The operator (T_{(u,v)})^λ. λ = 0 is allowed and gives the plain shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedTranslation {
    pub lambda: f64,
    pub u: f64,
    pub v: f64,
}

impl TwistedTranslation {
    pub fn new(lambda: f64, u: f64, v: f64) -> Result<Self> {
        if !(lambda.is_finite() && u.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("non-finite twisted translation ({lambda}, {u}, {v})")));
        }
        Ok(TwistedTranslation { lambda, u, v })
    }

    /// Phase of the composition: T_{(u,v)}T_{(u′,v′)} = e^{πiλ(vu′−uv′)} T_{(u+u′, v+v′)}.
    pub fn composition_phase(&self, other: &TwistedTranslation) -> Complex64 {
        Complex64::from_polar(1.0, PI * self.lambda * (self.v * other.u - self.u * other.v))
    }
}

/// e^{πiλ(vx−uy)} F(x−u, y−v).
pub fn twisted_translate(tt: TwistedTranslation, f: &Slice2D) -> Slice2D {
    let TwistedTranslation { lambda, u, v } = tt;
    let g = f.clone();
    Slice2D::analytic(
        f.lambda,
        (f.x_range.0 + u, f.x_range.1 + u),
        (f.y_range.0 + v, f.y_range.1 + v),
        f.x_breaks.iter().map(|b| b + u).collect(),
        f.y_breaks.iter().map(|b| b + v).collect(),
        move |x, y| {
            let val = g.eval(x - u, y - v);
            if val == ZERO {
                return ZERO;
            }
            val * Complex64::from_polar(1.0, PI * lambda * (v * x - u * y))
        },
    )
}

/// ⟨(T_{(2k,l)})^λ g, g⟩ = ∫∫ e^{πiλ(lx−2ky)} g(x−2k, y−l) conj(g(x,y)) dx dy.
pub fn twisted_inner(lambda: f64, k: i64, l: i64, g: &Slice2D) -> Result<Complex64> {
    let tt = TwistedTranslation::new(lambda, 2.0 * k as f64, l as f64)?;
    slice_inner(&twisted_translate(tt, g), g, &inner_spec())
}

/// Finitely supported complex coefficients c_{k,l}.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoeffField {
    entries: BTreeMap<(i64, i64), Complex64>,
}

impl CoeffField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets c_{k,l}; zero values are dropped from the support.
    pub fn insert(&mut self, k: i64, l: i64, c: Complex64) {
        if c == ZERO {
            self.entries.remove(&(k, l));
        } else {
            self.entries.insert((k, l), c);
        }
    }

    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        self.entries.get(&(k, l)).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Complex64)> {
        self.entries.iter()
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, alpha: Complex64) -> CoeffField {
        let mut out = CoeffField::new();
        for (&(k, l), &c) in &self.entries {
            out.insert(k, l, c * alpha);
        }
        out
    }
}

impl FromIterator<((i64, i64), Complex64)> for CoeffField {
    fn from_iter<I: IntoIterator<Item = ((i64, i64), Complex64)>>(iter: I) -> Self {
        let mut f = CoeffField::new();
        for ((k, l), c) in iter {
            f.insert(k, l, c);
        }
        f
    }
}

/// How the Gramian phase factor is formed for indices a = (k,l), b = (k′,l′).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// e^{2πi(λ−r)(lk′−kl′)}: the phase produced by moving both twisted
    /// translates onto one.
    #[default]
    Full,
    /// e^{πi(λ−r)(lk′−kl′)}: half the exponent. Also Hermitian, but not the
    /// inner product of the translates; kept as a diagnostic.
    Half,
}

impl PhaseConvention {
    fn factor(self) -> f64 {
        match self {
            PhaseConvention::Full => 2.0,
            PhaseConvention::Half => 1.0,
        }
    }
}

/// A slice family μ ↦ g^μ together with the r-sum decay of ‖g^μ‖².
pub trait SliceFamily: Sync {
    fn slice(&self, mu: f64) -> Slice2D;
    /// Envelope for |⟨T g^{λ−r}, g^{λ−r}⟩| ≤ ‖g^{λ−r}‖².
    fn decay(&self) -> Decay;
}

/// φ₁^μ = (1/√2)e^{πiμ} sinc(μ) on [0,2]×[0,1]; ‖φ₁^μ‖² = sinc²μ.
#[derive(Debug, Clone, Copy, Default)]
pub struct Phi1Family;

impl SliceFamily for Phi1Family {
    fn slice(&self, mu: f64) -> Slice2D {
        Slice2D::phi1(mu)
    }
    fn decay(&self) -> Decay {
        // sinc²(λ−r) = sin²(πλ)/(π(λ−r))² exactly, so the fitted tail is exact
        Decay::Accelerated { p: 2.0 }
    }
}

/// φ₂^μ from the closed form.
#[derive(Debug, Clone, Copy, Default)]
pub struct Phi2Family;

impl SliceFamily for Phi2Family {
    fn slice(&self, mu: f64) -> Slice2D {
        Slice2D::phi2(mu)
    }
    fn decay(&self) -> Decay {
        Decay::Power { c: phi2_bounds::I_ENVELOPE, p: 6.0 }
    }
}

/// χ_{[0,2]}(x)χ_{[0,height]}(y)·ĥ(−μ) for a separable generator χ·χ·h(t).
pub struct SeparableFamily<H> {
    pub h_hat: H,
    pub height: f64,
    pub decay: Decay,
}

impl<H: Fn(f64) -> Complex64 + Sync> SliceFamily for SeparableFamily<H> {
    fn slice(&self, mu: f64) -> Slice2D {
        let c = (self.h_hat)(-mu);
        let h = self.height;
        Slice2D::analytic(mu, (0.0, 2.0), (0.0, h), vec![0.0, 2.0], vec![0.0, h], move |x, y| {
            if (0.0..=2.0).contains(&x) && (0.0..=h).contains(&y) {
                c
            } else {
                ZERO
            }
        })
    }
    fn decay(&self) -> Decay {
        self.decay
    }
}

/// Σ_r c(r)·⟨(T_{(2dk, dl)})^a g^a, g^a⟩ with a = λ−r.
fn offset_sum<F: SliceFamily + ?Sized, P: Fn(i64) -> Complex64>(
    lambda: f64,
    dk: i64,
    dl: i64,
    family: &F,
    tol: f64,
    phase: P,
) -> Result<(Complex64, TailBound)> {
    let failure = std::cell::RefCell::new(None);
    let term = |r: i64| {
        let a = lambda - r as f64;
        match twisted_inner(a, dk, dl, &family.slice(a)) {
            Ok(v) => phase(r) * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                ZERO
            }
        }
    };
    let out = sum_over_r(term, lambda, tol, family.decay())?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out)
}

/// Largest window handled by the dense Hermitian eigen-solver.
pub const MAX_WINDOW: usize = 15;

/// The Gramian restricted to a finite set of lattice indices (k,l).
#[derive(Debug, Clone)]
pub struct GramianWindow {
    pub lambda: f64,
    pub window: Vec<(i64, i64)>,
    pub entries: DMatrix<Complex64>,
    pub convention: PhaseConvention,
    /// Largest tail bound among the r-sums used.
    pub tail: f64,
}

impl GramianWindow {
    pub fn new<F: SliceFamily + ?Sized>(lambda: f64, window: &[(i64, i64)], family: &F, tol: f64) -> Result<Self> {
        Self::with_convention(lambda, window, family, tol, PhaseConvention::Full)
    }

    pub fn with_convention<F: SliceFamily + ?Sized>(
        lambda: f64,
        window: &[(i64, i64)],
        family: &F,
        tol: f64,
        convention: PhaseConvention,
    ) -> Result<Self> {
        if window.is_empty() || window.len() > MAX_WINDOW {
            return Err(Error::Domain(format!("window size must lie in 1..={MAX_WINDOW}, got {}", window.len())));
        }
        let n = window.len();
        let mut entries = DMatrix::from_element(n, n, ZERO);
        let mut tail: f64 = 0.0;
        match convention {
            PhaseConvention::Full => {
                // e^{2πi(λ−r)m} = e^{2πiλm} for integer m, so the r-sum depends only on the offset
                let mut cache: HashMap<(i64, i64), Complex64> = HashMap::new();
                for (i, &(k, l)) in window.iter().enumerate() {
                    for (j, &(kp, lp)) in window.iter().enumerate() {
                        let d = (k - kp, l - lp);
                        let s = match cache.get(&d) {
                            Some(&s) => s,
                            None => {
                                let (s, tb) = offset_sum(lambda, d.0, d.1, family, tol, |_| Complex64::new(1.0, 0.0))?;
                                tail = tail.max(tb.bound);
                                cache.insert(d, s);
                                s
                            }
                        };
                        let m = (l * kp - k * lp) as f64;
                        entries[(i, j)] = Complex64::from_polar(1.0, convention.factor() * PI * lambda * m) * s;
                    }
                }
            }
            PhaseConvention::Half => {
                for (i, &(k, l)) in window.iter().enumerate() {
                    for (j, &(kp, lp)) in window.iter().enumerate() {
                        let m = (l * kp - k * lp) as f64;
                        let phase = |r: i64| Complex64::from_polar(1.0, convention.factor() * PI * (lambda - r as f64) * m);
                        let (s, tb) = offset_sum(lambda, k - kp, l - lp, family, tol, phase)?;
                        tail = tail.max(tb.bound);
                        entries[(i, j)] = s;
                    }
                }
            }
        }
        Ok(GramianWindow { lambda, window: window.to_vec(), entries, convention, tail })
    }

    /// max |G_{ab} − conj(G_{ba})|.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.window.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Σ_{a,b} c_a conj(c_b) G_{ab} for coefficients on the window.
    pub fn quadratic_form(&self, coeffs: &CoeffField) -> Complex64 {
        let c: Vec<Complex64> = self.window.iter().map(|&(k, l)| coeffs.get(k, l)).collect();
        let mut acc = ZERO;
        for (i, ci) in c.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                acc += ci * cj.conj() * self.entries[(i, j)];
            }
        }
        acc
    }
}

/// ⟨τ(L_{(2k,l,0)}g)(λ), τ(L_{(2k′,l′,0)}g)(λ)⟩ computed directly as
/// Σ_r ⟨T_{(2k,l)} g^a, T_{(2k′,l′)} g^a⟩, with no phase bookkeeping.
pub fn gram_entry_direct<F: SliceFamily + ?Sized>(
    lambda: f64,
    a: (i64, i64),
    b: (i64, i64),
    family: &F,
    tol: f64,
) -> Result<Complex64> {
    let failure = std::cell::RefCell::new(None);
    let term = |r: i64| {
        let mu = lambda - r as f64;
        let g = family.slice(mu);
        let ta = twisted_translate(TwistedTranslation { lambda: mu, u: 2.0 * a.0 as f64, v: a.1 as f64 }, &g);
        let tb = twisted_translate(TwistedTranslation { lambda: mu, u: 2.0 * b.0 as f64, v: b.1 as f64 }, &g);
        match slice_inner(&ta, &tb, &inner_spec()) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                ZERO
            }
        }
    };
    let (v, _) = sum_over_r(term, lambda, tol, family.decay())?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(v)
}

/// ⟨G(λ)c, c⟩ with its imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormValue {
    pub value: f64,
    pub imag: f64,
}

/// ⟨G(λ)c, c⟩ = Σ_{k,l,k′,l′} Σ_r c_{k,l} conj(c_{k′,l′}) e^{2πi(λ−r)(lk′−kl′)}
/// ⟨(T_{(2(k−k′), l−l′)})^{λ−r} g^{λ−r}, g^{λ−r}⟩.
pub fn gramian_form<F: SliceFamily + ?Sized>(lambda: f64, coeffs: &CoeffField, family: &F, tol: f64) -> Result<FormValue> {
    if coeffs.is_empty() {
        return Ok(FormValue { value: 0.0, imag: 0.0 });
    }
    let support = coeffs.support();
    let mut cache: HashMap<(i64, i64), Complex64> = HashMap::new();
    let mut acc = ZERO;
    for &(k, l) in &support {
        for &(kp, lp) in &support {
            let d = (k - kp, l - lp);
            let s = match cache.get(&d) {
                Some(&s) => s,
                None => {
                    let (s, _) = offset_sum(lambda, d.0, d.1, family, tol, |_| Complex64::new(1.0, 0.0))?;
                    cache.insert(d, s);
                    s
                }
            };
            let m = (l * kp - k * lp) as f64;
            acc += coeffs.get(k, l) * coeffs.get(kp, lp).conj() * Complex64::from_polar(1.0, 2.0 * PI * lambda * m) * s;
        }
    }
    Ok(FormValue { value: acc.re, imag: acc.im })
}

/// Riesz bounds (2·inf S, 2·sup S) of a separable generator, S(λ) = Σ_r |ĥ(−(λ−r))|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszBounds {
    pub lower: f64,
    pub upper: f64,
    pub argmin: f64,
    pub argmax: f64,
}

/// Number of points of the uniform λ-grid on [0,1] used for extremization.
pub const LAMBDA_GRID: usize = 101;

/// S(λ) = Σ_r |ĥ(r−λ)|² for λ ∈ (0,1].
pub fn separable_symbol<H: Fn(f64) -> Complex64>(h_hat: &H, lambda: f64, tol: f64, decay: Decay) -> Result<f64> {
    Ok(sum_over_r(|r| h_hat(r as f64 - lambda).norm_sqr(), lambda, tol, decay)?.0)
}

fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// (2·inf_λ S, 2·sup_λ S): 101-point grid on [0,1] (λ = 0 represented by
/// λ = 1, S being 1-periodic) refined by golden-section search next to the
/// best grid points.
pub fn riesz_bounds_separable<H: Fn(f64) -> Complex64>(h_hat: H, tol: f64, decay: Decay) -> Result<RieszBounds> {
    let n = LAMBDA_GRID - 1;
    let grid: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&l| separable_symbol(&h_hat, l, tol, decay)).collect::<Result<_>>()?;
    let (imin, imax) = vals.iter().enumerate().fold((0, 0), |(lo, hi), (i, &v)| {
        (if v < vals[lo] { i } else { lo }, if v > vals[hi] { i } else { hi })
    });
    // S on the neighbouring interval, wrapping across λ = 1 ≡ 0
    let wrap = |l: f64| if l > 1.0 { l - 1.0 } else if l <= 0.0 { l + 1.0 } else { l };
    let h = 1.0 / n as f64;
    let (lmin, smin) = golden(|l| separable_symbol(&h_hat, wrap(l), tol, decay), grid[imin] - h, grid[imin] + h, 60)?;
    let (lmax, smax) = golden(|l| Ok(-separable_symbol(&h_hat, wrap(l), tol, decay)?), grid[imax] - h, grid[imax] + h, 60)?;
    let (argmin, lower) = if smin < vals[imin] { (wrap(lmin), smin) } else { (grid[imin], vals[imin]) };
    let (argmax, upper) = if -smax > vals[imax] { (wrap(lmax), -smax) } else { (grid[imax], vals[imax]) };
    Ok(RieszBounds { lower: 2.0 * lower, upper: 2.0 * upper, argmin, argmax })
}

/// Upper Riesz bound 2^{n−1} of {L_γ φₙ}: orthonormality for n = 1 and a factor
/// ‖φ₁‖²_{L¹} = 2 per order.
pub fn upper_riesz_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("spline order must be positive".into()));
    }
    Ok(2f64.powi(n as i32 - 1))
}

/// max |⟨L_γ φ₁, L_{γ′} φ₁⟩ − δ_{γ,γ′}| over γ, γ′ ∈ [−W, W]³, by quadrature.
pub fn orthonormality_check_phi1(w: i64) -> Result<f64> {
    if w < 1 {
        return Err(Error::Domain(format!("window must be at least 1, got {w}")));
    }
    let idx: Vec<LatticeIndex> = (-w..=w)
        .flat_map(|k| (-w..=w).flat_map(move |l| (-w..=w).map(move |m| LatticeIndex::new(k, l, m))))
        .collect();
    let spec = QuadSpec { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 12, base_order: 8 };
    let everywhere = Box3::new([-1e9; 3], [1e9; 3]);
    let mut worst: f64 = 0.0;
    for (i, a) in idx.iter().enumerate() {
        let fa = LeftTranslate::lattice(*a, Phi1);
        for b in &idx[i..] {
            let fb = LeftTranslate::lattice(*b, Phi1);
            let v = inner_product(&fa, &fb, everywhere, &spec)?.value;
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}
