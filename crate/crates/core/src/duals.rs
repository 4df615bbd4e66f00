//! Oblique duals of {L_{(2k,l,m)}φ} from finite moment problems on Q.
//!
//! For compactly supported φ only finitely many translates meet the
//! fundamental domain Q. Solving Σ_γ d_γ ⟨L_{γ′}φ, L_γφ·χ_Q⟩ = δ_{γ′,0}
//! over that window gives φ̃ = [Σ d_γ L_γφ]·χ_Q with ⟨L_γφ, φ̃⟩ = δ_{γ,0}.

use crate::bspline::ClassicalBSpline;
use crate::error::{Error, Result};
use crate::group::{HPoint, LatticeIndex};
use crate::hfun::{inner_product, Box3, Combination, HFunction, LeftTranslate, Restrict};
use crate::quad::{gauss_legendre, QuadSpec};
use crate::splines::SeparableGenerator;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

/// Q as a closed box.
pub const Q_BOX: Box3 = Box3::new([0.0, 0.0, 0.0], [2.0, 1.0, 1.0]);

/// A = {−(n−1) ≤ k,l ≤ 0, −M−n+1 < m < M+n}: the translates whose support
/// can meet Q when supp φ ⊆ [0,2n]×[0,n]×[−M,M].
pub fn index_window(n: usize, big_m: f64) -> Result<Vec<LatticeIndex>> {
    if n == 0 || !(big_m > 0.0) || !big_m.is_finite() {
        return Err(Error::Domain(format!("index_window needs n ≥ 1 and M > 0, got n = {n}, M = {big_m}")));
    }
    let nn = n as i64;
    let lo = -big_m - nn as f64 + 1.0;
    let hi = big_m + nn as f64;
    // strict on both sides
    let m_lo = lo.floor() as i64 + 1;
    let m_hi = hi.ceil() as i64 - 1;
    Ok(box_window(nn, m_lo, m_hi))
}

/// The wider window −½(n+1)(n+4)+1 ≤ m ≤ ½(n²+3n−2)−1 with the same k, l
/// range, sized for φₙ itself.
pub fn alternative_window(n: usize) -> Result<Vec<LatticeIndex>> {
    if n == 0 {
        return Err(Error::Domain("alternative_window needs n ≥ 1".into()));
    }
    let nn = n as i64;
    let m_lo = -(nn + 1) * (nn + 4) / 2 + 1;
    let m_hi = (nn * nn + 3 * nn - 2) / 2 - 1;
    Ok(box_window(nn, m_lo, m_hi))
}

fn box_window(n: i64, m_lo: i64, m_hi: i64) -> Vec<LatticeIndex> {
    let mut out = Vec::new();
    for k in -(n - 1)..=0 {
        for l in -(n - 1)..=0 {
            for m in m_lo..=m_hi {
                out.push(LatticeIndex::new(k, l, m));
            }
        }
    }
    out
}

/// The generator of a moment problem.
#[derive(Clone)]
pub enum Generator {
    /// χ_{[0,2]}(x)χ_{[0,1]}(y)·B(t); moment entries are exact 1-D integrals.
    Separable(SeparableGenerator),
    /// Anything evaluable; entries by 3-D quadrature.
    General(Arc<dyn HFunction>),
}

impl Generator {
    pub fn separable(order: usize) -> Self {
        Generator::Separable(SeparableGenerator::new(order))
    }

    pub fn function(&self) -> Arc<dyn HFunction> {
        match self {
            Generator::Separable(s) => Arc::new(*s),
            Generator::General(f) => f.clone(),
        }
    }

    pub fn translate(&self, g: LatticeIndex) -> Arc<dyn HFunction> {
        Arc::new(LeftTranslate::lattice(g, self.function()))
    }
}

impl std::fmt::Debug for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::Separable(s) => write!(f, "Separable(B{})", s.h.order),
            Generator::General(_) => write!(f, "General"),
        }
    }
}

/// G d = e₀ with G_{ij} = ⟨L_{γᵢ}φ, L_{γⱼ}φ·χ_Q⟩.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub window: Vec<LatticeIndex>,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl MomentSystem {
    /// Row of γ = 0.
    pub fn pivot(&self) -> Option<usize> {
        self.window.iter().position(|g| *g == LatticeIndex::ZERO)
    }

    /// Drops translates that vanish a.e. on Q (zero diagonal), keeping the origin.
    pub fn effective(&self) -> MomentSystem {
        let scale = (0..self.window.len()).map(|i| self.matrix[(i, i)].abs()).fold(0.0, f64::max);
        let keep: Vec<usize> = (0..self.window.len())
            .filter(|&i| self.window[i] == LatticeIndex::ZERO || self.matrix[(i, i)].abs() > 1e-14 * scale)
            .collect();
        self.select(&keep)
    }

    fn select(&self, keep: &[usize]) -> MomentSystem {
        let n = keep.len();
        MomentSystem {
            window: keep.iter().map(|&i| self.window[i]).collect(),
            matrix: DMatrix::from_fn(n, n, |i, j| self.matrix[(keep[i], keep[j])]),
            rhs: DVector::from_fn(n, |i, _| self.rhs[keep[i]]),
        }
    }
}

/// Moment entries over Q. Separable generators use exact piecewise
/// Gauss–Legendre in t; general ones the 3-D inner product at `quad`.
pub fn assemble_moment_system(phi: &Generator, window: &[LatticeIndex], quad: &QuadSpec) -> Result<MomentSystem> {
    if window.is_empty() {
        return Err(Error::Domain("empty index window".into()));
    }
    let n = window.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| match phi {
            Generator::Separable(s) => Ok(separable_entry(&s.h, window[i], window[j])),
            Generator::General(_) => {
                let a = phi.translate(window[i]);
                let b = Restrict { f: phi.translate(window[j]), region: Q_BOX };
                Ok(inner_product(&a, &b, Q_BOX, quad)?.value)
            }
        })
        .collect();
    let mut matrix = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("moment entry ({i},{j}) is not finite")));
        }
        matrix[(i, j)] = v;
        matrix[(j, i)] = v;
    }
    let mut rhs = DVector::zeros(n);
    if let Some(p) = window.iter().position(|g| *g == LatticeIndex::ZERO) {
        rhs[p] = 1.0;
    }
    Ok(MomentSystem { window: window.to_vec(), matrix, rhs })
}

/// 2∫₀¹ B(t−mᵢ)B(t−mⱼ) dt when both translates sit over Q in (x, y), else 0.
fn separable_entry(h: &ClassicalBSpline, a: LatticeIndex, b: LatticeIndex) -> f64 {
    if (a.k, a.l, b.k, b.l) != (0, 0, 0, 0) {
        return 0.0;
    }
    // product has degree 2(order−1); order nodes integrate it exactly
    let rule = gauss_legendre(h.order.max(1));
    2.0 * rule.integrate(|t| h.eval(t - a.m as f64) * h.eval(t - b.m as f64), 0.0, 1.0)
}

/// Rank and conditioning thresholds for [`solve_dual_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Singular values below rank_tol·σ_max count as zero.
    pub rank_tol: f64,
    pub max_condition: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { rank_tol: 1e-10, max_condition: 1e12 }
    }
}

/// φ̃ = [Σ d_γ L_γφ]·χ_Q.
#[derive(Clone)]
pub struct DualGenerator {
    pub window: Vec<LatticeIndex>,
    pub coeffs: Vec<f64>,
    pub generator: Generator,
    /// σ_max/σ_min over the retained singular values.
    pub condition: f64,
    pub rank: usize,
    function: Restrict<Combination>,
}

impl DualGenerator {
    /// Builds φ̃ from explicit coefficients.
    pub fn from_coeffs(generator: Generator, window: Vec<LatticeIndex>, coeffs: Vec<f64>) -> Self {
        let mut comb = Combination::new();
        for (g, d) in window.iter().zip(&coeffs) {
            comb.push(*d, generator.translate(*g));
        }
        let rank = window.len();
        DualGenerator {
            window,
            coeffs,
            generator,
            condition: f64::NAN,
            rank,
            function: Restrict { f: comb, region: Q_BOX },
        }
    }

    pub fn coeff(&self, g: LatticeIndex) -> Option<f64> {
        self.window.iter().position(|w| *w == g).map(|i| self.coeffs[i])
    }

    /// Copy with d_γ += delta.
    pub fn perturbed(&self, g: LatticeIndex, delta: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        if let Some(i) = self.window.iter().position(|w| *w == g) {
            coeffs[i] += delta;
        }
        let mut out = DualGenerator::from_coeffs(self.generator.clone(), self.window.clone(), coeffs);
        out.condition = self.condition;
        out.rank = self.rank;
        out
    }
}

impl std::fmt::Debug for DualGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DualGenerator")
            .field("window", &self.window)
            .field("coeffs", &self.coeffs)
            .field("generator", &self.generator)
            .field("condition", &self.condition)
            .field("rank", &self.rank)
            .finish()
    }
}

impl HFunction for DualGenerator {
    fn eval(&self, p: HPoint) -> f64 {
        self.function.eval(p)
    }
    fn support(&self) -> Box3 {
        Q_BOX
    }
    fn t_breaks(&self, x: f64, y: f64) -> Vec<f64> {
        self.function.t_breaks(x, y)
    }
    fn t_degree(&self) -> Option<usize> {
        self.function.t_degree()
    }
    fn xy_breaks(&self) -> (Vec<f64>, Vec<f64>) {
        self.function.xy_breaks()
    }
}

fn rank_of(m: &DMatrix<f64>, tol: f64) -> (usize, Vec<f64>) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (0, Vec::new());
    }
    let sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > tol * smax).count();
    (rank, sv)
}

/// Solves the system over its effective window with default options.
pub fn solve_dual(sys: &MomentSystem, phi: &Generator) -> Result<DualGenerator> {
    solve_dual_with(sys, phi, SolveOptions::default())
}

/// SVD solve. The moment problem is solvable iff the pivot column (γ = 0)
/// adds to the rank of the remaining columns; rank-deficient but solvable
/// systems get the minimum-norm solution.
pub fn solve_dual_with(sys: &MomentSystem, phi: &Generator, opts: SolveOptions) -> Result<DualGenerator> {
    let Some(_) = sys.pivot() else {
        return Err(Error::UnsolvableMoment("window does not contain the origin".into()));
    };
    let eff = sys.effective();
    let p = eff.pivot().expect("origin kept by effective()");
    let n = eff.window.len();
    let (rank, sv) = rank_of(&eff.matrix, opts.rank_tol);
    if rank == 0 {
        return Err(Error::UnsolvableMoment("φ vanishes on Q".into()));
    }
    let rest: Vec<usize> = (0..n).filter(|&j| j != p).collect();
    let rest_cols = DMatrix::from_fn(n, rest.len(), |i, j| eff.matrix[(i, rest[j])]);
    let (rank_rest, _) = rank_of(&rest_cols, opts.rank_tol);
    if rank_rest == rank {
        return Err(Error::UnsolvableMoment(format!(
            "φ|_Q lies in the span of the other translates (rank {rank} with and without the pivot)"
        )));
    }
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().filter(|&s| s > opts.rank_tol * smax).fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    if condition > opts.max_condition {
        return Err(Error::IllConditioned(condition));
    }
    let svd = eff.matrix.clone().svd(true, true);
    let d = svd
        .solve(&eff.rhs, opts.rank_tol * smax)
        .map_err(|e| Error::Domain(format!("SVD solve failed: {e}")))?;
    let mut dual = DualGenerator::from_coeffs(phi.clone(), eff.window.clone(), d.iter().copied().collect());
    dual.condition = condition;
    dual.rank = rank;
    Ok(dual)
}

/// Spec used for the quadrature checks below.
pub fn check_spec() -> QuadSpec {
    QuadSpec { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 12, base_order: 8 }
}

/// max over the window of |⟨L_γφ, φ̃⟩ − δ_{γ,0}|, by quadrature over Q.
pub fn verify_biorthogonality(phi: &Generator, dual: &DualGenerator, window: &[LatticeIndex]) -> Result<f64> {
    let spec = check_spec();
    let devs: Vec<Result<f64>> = window
        .par_iter()
        .map(|g| {
            let v = inner_product(&phi.translate(*g), dual, Q_BOX, &spec)?.value;
            let target = if *g == LatticeIndex::ZERO { 1.0 } else { 0.0 };
            Ok((v - target).abs())
        })
        .collect();
    devs.into_iter().try_fold(0.0, |m, d| Ok(f64::max(m, d?)))
}

/// ⟨L_γφ̃, L_{γ′}φ̃⟩ for a pair of lattice points.
pub fn dual_inner(dual: &DualGenerator, a: LatticeIndex, b: LatticeIndex) -> Result<f64> {
    let fa = LeftTranslate::lattice(a, dual.clone());
    let fb = LeftTranslate::lattice(b, dual.clone());
    let region = fa.support();
    Ok(inner_product(&fa, &fb, region, &check_spec())?.value)
}

/// Σ_γ ⟨f, L_γφ̃⟩ L_γφ together with the coefficients.
#[derive(Clone)]
pub struct Reconstruction {
    pub coeffs: Vec<(LatticeIndex, f64)>,
    pub function: Combination,
}

impl Reconstruction {
    pub fn coeff(&self, g: LatticeIndex) -> f64 {
        self.coeffs.iter().find(|(w, _)| *w == g).map_or(0.0, |(_, c)| *c)
    }
}

/// Analysis with L_γφ̃, synthesis with L_γφ, over the lattice points in `window`.
pub fn reconstruct(f: &dyn HFunction, phi: &Generator, dual: &DualGenerator, window: &[LatticeIndex]) -> Result<Reconstruction> {
    let spec = check_spec();
    let coeffs: Vec<Result<(LatticeIndex, f64)>> = window
        .par_iter()
        .map(|g| {
            let d = LeftTranslate::lattice(*g, dual.clone());
            let region = d.support();
            Ok((*g, inner_product(f, &d, region, &spec)?.value))
        })
        .collect();
    let coeffs = coeffs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut function = Combination::new();
    for (g, c) in &coeffs {
        function.push(*c, phi.translate(*g));
    }
    Ok(Reconstruction { coeffs, function })
}
