//! The Gramian of {L_{(2k,l,m)}φ₂} split into nine blocks M₁…M₉ by the lattice
//! offset (k−k′, l−l′), the double integrals I_{j,r,λ} behind them, the
//! closed-form upper bound B and numerical estimates of min_λ |Σ_r I_{j,r,λ}|.
//!
//! Every I_{j,r,λ} has the prefactor (1−cos 2πa)²/(4π⁸a⁸) = sinc⁴(a)/(πa)⁴ with
//! a = λ−r, and a product of two cosine differences in the integrand. Writing
//! cos(cu) − cos(cv) = −2 sin(c(u+v)/2) sin(c(u−v)/2) and absorbing one factor c²
//! into each difference leaves sinc⁴(a) times an integrand that is bounded,
//! free of cancellation near the coordinate axes and regular at a = 0.

use super::CoeffField;
use crate::error::{Error, Result};
use crate::quad::{integrate_nd, QuadSpec};
use crate::rsum::{certified_radius, power_tail, r_order};
use crate::specfun::{sin_over, sinc};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// The five distinct integrals; the even-numbered blocks are their conjugates.
pub const J_INDICES: [usize; 5] = [1, 3, 5, 7, 9];

/// Lattice offset (k−k′, l−l′) carried by block Mⱼ, j odd and < 9.
pub const OFFSETS: [(i64, i64); 4] = [(1, 1), (1, 0), (0, 1), (1, -1)];

/// Published estimates of min_λ |Σ_r I_{j,r,λ}| for j = 1, 3, 5, 7, 9.
pub const REFERENCE_LOWER_ESTIMATES: [f64; 5] = [0.0552, 0.1691, 0.1348, 0.1465, 0.6867];

/// |I_{j,r,λ}| ≤ I_ENVELOPE·|λ−r|^{−6} for |λ−r| ≥ 1 (checked in the tests).
pub const I_ENVELOPE: f64 = 8.0 / (PI * PI * PI * PI * PI * PI);
const ENVELOPE_POWER: f64 = 6.0;

/// Which version of the I₇ integrand to use. The printed integrand has
/// cos(πa(y−1)) in its second difference; the twisted inner product
/// ⟨T_{(2,−1)}φ₂^a, φ₂^a⟩ it is meant to equal has cos(2πa(y−1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IForm {
    #[default]
    Printed,
    Corrected,
}

/// (cos(c·u) − cos(c·v))/c², exact for c = 0.
#[inline]
fn cd(u: f64, v: f64, c: f64) -> f64 {
    let s = 0.5 * (u + v);
    let d = 0.5 * (u - v);
    -2.0 * s * d * sin_over(c * s) * sin_over(c * d)
}

#[inline]
fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

type Region = ([f64; 2], [f64; 2]);

const LOWER_LEFT: Region = ([0.0, 0.0], [2.0, 1.0]);
const UPPER_LEFT: Region = ([0.0, 1.0], [2.0, 2.0]);
const LOWER_RIGHT: Region = ([2.0, 0.0], [4.0, 1.0]);
const UPPER_RIGHT: Region = ([2.0, 1.0], [4.0, 2.0]);

/// Integrand of I_{j,r,λ}/sinc⁴(a) on one region, c = πa.
fn integrand(j: usize, part: usize, form: IForm, c: f64, x: f64, y: f64) -> Complex64 {
    match (j, part) {
        (1, _) => {
            let v = cd(0.0, x * y, c) * cd(x - 2.0 * y, 2.0 - x * y, c) / (x * y * (x + 2.0) * (y + 1.0));
            cis(c * (x - 2.0 * y)) * v
        }
        (3, 0) => {
            let v = cd(0.0, x * y, c) * cd(x * y, 2.0 * y, c) / (x * y * y * (x + 2.0));
            cis(-2.0 * c * y) * v
        }
        (3, _) => {
            let v = cd(x * (y - 1.0), x, c) * cd(x + 2.0 - 2.0 * y, x + 2.0 - x * y, c) / (x * y * y * (x + 2.0));
            cis(-2.0 * c * y) * v
        }
        (5, 0) => {
            let v = cd(0.0, x * y, c) * cd(x * y, x, c) / (x * x * y * (y + 1.0));
            cis(c * x) * v
        }
        (5, _) => {
            let v = cd((x - 2.0) * y, 2.0 * y, c) * cd(x - 2.0 - 2.0 * y, 2.0 * y - x * y + 2.0, c) / (x * x * y * (y + 1.0));
            cis(c * x) * v
        }
        (7, _) => {
            let kappa = match form {
                IForm::Printed => 1.0,
                IForm::Corrected => 2.0,
            };
            let v = cd(x * (y - 1.0), x, c) * cd(x * (y - 1.0), kappa * (y - 1.0), c) / (x * y * (x + 2.0) * (y - 1.0));
            cis(-c * (x + 2.0 * y)) * v
        }
        (9, p) => {
            let d = match p {
                0 => cd(0.0, x * y, c),
                1 => cd(x * (y - 1.0), x, c),
                2 => cd((x - 2.0) * y, 2.0 * y, c),
                _ => cd(x - 2.0 * y, x + 2.0 * y - x * y, c),
            };
            Complex64::new(d * d / (x * x * y * y), 0.0)
        }
        _ => unreachable!("no integral I_{j}"),
    }
}

fn regions(j: usize) -> &'static [Region] {
    match j {
        1 => &[LOWER_LEFT],
        3 => &[LOWER_LEFT, UPPER_LEFT],
        5 => &[LOWER_LEFT, LOWER_RIGHT],
        7 => &[UPPER_LEFT],
        9 => &[LOWER_LEFT, UPPER_LEFT, LOWER_RIGHT, UPPER_RIGHT],
        _ => &[],
    }
}

fn check_j(j: usize) -> Result<()> {
    if J_INDICES.contains(&j) {
        Ok(())
    } else {
        Err(Error::Domain(format!("I_j is defined for j in {{1,3,5,7,9}}, got {j}")))
    }
}

/// I_j at a = λ − r to absolute accuracy `abs_tol`. Regular at a = 0.
pub fn i_of_a(j: usize, a: f64, form: IForm, abs_tol: f64) -> Result<Complex64> {
    check_j(j)?;
    let s4 = sinc(a).powi(4);
    if s4 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let c = PI * a;
    let regs = regions(j);
    // the integrals below are multiplied by sinc⁴(a) ≤ 1
    let spec = QuadSpec { abs_tol: (abs_tol / (s4 * regs.len() as f64)).min(1e-2), rel_tol: 1e-11, max_depth: 16, base_order: 10 };
    let mut acc = Complex64::new(0.0, 0.0);
    for (part, (lo, hi)) in regs.iter().enumerate() {
        let r = integrate_nd(|p: &[f64]| integrand(j, part, form, c, p[0], p[1]), lo, hi, &spec)?;
        acc += r.value;
    }
    Ok(acc * s4)
}

/// I_{j,r,λ} as printed, by adaptive quadrature to 1e−13 absolute.
pub fn i_integral(j: usize, r: i64, lambda: f64) -> Result<Complex64> {
    i_of_a(j, lambda - r as f64, IForm::Printed, 1e-13)
}

/// Σ_r I_{j,r,λ} and Σ_r |I_{j,r,λ}| for all five j at one λ.
#[derive(Debug, Clone, PartialEq)]
pub struct ISums {
    pub lambda: f64,
    pub sums: [Complex64; 5],
    pub abs_sums: [f64; 5],
    /// Truncation radius R of the r-sum and the bound on the discarded tail.
    pub radius: i64,
    pub tail: f64,
}

impl ISums {
    pub fn sum(&self, j: usize) -> Complex64 {
        self.sums[J_INDICES.iter().position(|&x| x == j).expect("j in {1,3,5,7,9}")]
    }
}

/// Σ_r I_{j,r,λ} for λ ∈ (0,1] with total error at most `tol` per j, summed in
/// the fixed order r = 0, −1, 1, −2, 2, ….
pub fn i_sums(lambda: f64, tol: f64, form: IForm) -> Result<ISums> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("lambda must lie in (0,1], got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let radius = certified_radius(I_ENVELOPE, ENVELOPE_POWER, 0.5 * tol)?.max(2);
    let tail = power_tail(I_ENVELOPE, ENVELOPE_POWER, radius);
    let per_term = 0.5 * tol / (2 * radius + 1) as f64;
    let mut sums = [Complex64::new(0.0, 0.0); 5];
    let mut abs_sums = [0.0; 5];
    for r in r_order(radius) {
        let a = lambda - r as f64;
        for (i, &j) in J_INDICES.iter().enumerate() {
            let v = i_of_a(j, a, form, per_term)?;
            sums[i] += v;
            abs_sums[i] += v.norm();
        }
    }
    Ok(ISums { lambda, sums, abs_sums, radius, tail })
}

/// The nine blocks and the quadratic form they add up to.
#[derive(Debug, Clone, PartialEq)]
pub struct Phi2Form {
    /// M₁ … M₉ in order.
    pub blocks: [Complex64; 9],
    pub value: f64,
    /// Imaginary part of Σ Mⱼ.
    pub imag: f64,
}

impl Phi2Form {
    /// max over j ∈ {1,3,5,7} of |M_{j+1} − conj(Mⱼ)|.
    pub fn conjugacy_residual(&self) -> f64 {
        (0..4).map(|i| (self.blocks[2 * i + 1] - self.blocks[2 * i].conj()).norm()).fold(0.0, f64::max)
    }
}

/// Σ_{k,l} c_{k,l} conj(c_{k−dk,l−dl}) e^{2πiλ·phase(k,l)}.
fn offset_block<P: Fn(i64, i64) -> f64>(coeffs: &CoeffField, dk: i64, dl: i64, lambda: f64, phase: P) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(k, l), &c) in coeffs.iter() {
        let d = coeffs.get(k - dk, l - dl);
        if d != Complex64::new(0.0, 0.0) {
            acc += c * d.conj() * cis(2.0 * PI * lambda * phase(k, l));
        }
    }
    acc
}

/// ⟨G(λ)c, c⟩ for φ₂ assembled from the blocks M₁…M₉ with the phases
/// e^{2πiλ(k−l)}, e^{−2πiλl}, e^{2πiλk}, e^{−2πiλ(k+l)} of the odd blocks.
/// The even blocks are summed separately over the reversed offsets with
/// conj(Σ_r Iⱼ), so M_{j+1} = conj(Mⱼ) is a check, not an assumption.
pub fn phi2_gram_form(lambda: f64, coeffs: &CoeffField, tol: f64) -> Result<Phi2Form> {
    phi2_gram_form_with(&i_sums(lambda, tol, IForm::Printed)?, coeffs)
}

/// [`phi2_gram_form`] from precomputed r-sums.
pub fn phi2_gram_form_with(s: &ISums, coeffs: &CoeffField) -> Result<Phi2Form> {
    let lambda = s.lambda;
    let mut blocks = [Complex64::new(0.0, 0.0); 9];
    let phases: [fn(i64, i64) -> f64; 4] = [|k, l| (k - l) as f64, |_, l| -(l as f64), |k, _| k as f64, |k, l| -((k + l) as f64)];
    for (i, (&(dk, dl), phase)) in OFFSETS.iter().zip(phases).enumerate() {
        let sj = s.sums[i];
        blocks[2 * i] = offset_block(coeffs, dk, dl, lambda, phase) * sj;
        // pair (k,l) with (k+dk, l+dl): phase l(k+dk) − k(l+dl) = l·dk − k·dl
        blocks[2 * i + 1] = offset_block(coeffs, -dk, -dl, lambda, |k, l| (l * dk - k * dl) as f64) * sj.conj();
    }
    blocks[8] = Complex64::new(coeffs.norm_sq(), 0.0) * s.sums[4];
    let total: Complex64 = blocks.iter().sum();
    Ok(Phi2Form { blocks, value: total.re, imag: total.im })
}

/// The five closed-form bracket bounds on sup_λ Σ_r |I_{j,r,λ}|, j = 1, 3, 5, 7, 9.
pub fn upper_bound_brackets() -> [f64; 5] {
    let p4 = PI.powi(4);
    let w = (p4 - 96.0) / p4;
    let l98 = (9.0f64 / 8.0).ln();
    let (l2, l3) = (2.0f64.ln(), 3.0f64.ln());
    let b1 = 2.0 / 27.0 - 16.0 / (9.0 * p4);
    let b3 = 1.0 / 9.0 + 0.5 * l98 + w * (2.0 + 9.0 * l98) / 54.0;
    let k5 = 7.0 + 54.0 * l2 - 36.0 * l3;
    let b5 = k5 / 36.0 + w * k5 / 108.0;
    let b7 = 1.25 * l98 + 5.0 * w * l98 / 12.0;
    let k9 = 299.0 - 288.0 * l2;
    let b9 = k9 / 144.0 + w * k9 / 432.0;
    [b1, b3, b5, b7, b9]
}

/// B = bracket₉ + 2(bracket₁ + bracket₃ + bracket₅ + bracket₇) ≈ 1.715.
pub fn upper_bound_phi2() -> f64 {
    let b = upper_bound_brackets();
    b[4] + 2.0 * (b[0] + b[1] + b[2] + b[3])
}

/// Extremes over the λ-grid of |Σ_r I_{j,r,λ}| and Σ_r |I_{j,r,λ}|.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerEstimates {
    pub grid: Vec<f64>,
    pub min_abs_sum: [f64; 5],
    pub argmin: [f64; 5],
    pub max_abs_sum: [f64; 5],
    /// max_λ Σ_r |I_{j,r,λ}|, to compare with the bracket bounds.
    pub max_sum_abs: [f64; 5],
    /// max over the grid of |Im Σ_r I_{j,r,λ}|.
    pub max_imag: [f64; 5],
}

/// λ-grid used by the φ₂ scans: the `n`-point uniform grid on [0,1] with
/// λ = 0 represented by λ = 1 (all r-sums are 1-periodic in λ).
pub fn lambda_grid(n: usize) -> Vec<f64> {
    (1..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// min over the grid of |Σ_r I_{j,r,λ}| for j = 1, 3, 5, 7, 9 (printed integrands).
pub fn lower_estimates_phi2(grid_size: usize) -> Result<LowerEstimates> {
    lower_estimates_with(grid_size, 1e-9, IForm::Printed)
}

pub fn lower_estimates_with(grid_size: usize, tol: f64, form: IForm) -> Result<LowerEstimates> {
    if grid_size < 11 {
        return Err(Error::Domain(format!("grid_size must be at least 11, got {grid_size}")));
    }
    let grid = lambda_grid(grid_size);
    let rows: Vec<ISums> = grid.par_iter().map(|&l| i_sums(l, tol, form)).collect::<Result<_>>()?;
    let mut out = LowerEstimates {
        grid,
        min_abs_sum: [f64::INFINITY; 5],
        argmin: [0.0; 5],
        max_abs_sum: [0.0; 5],
        max_sum_abs: [0.0; 5],
        max_imag: [0.0; 5],
    };
    for s in &rows {
        for i in 0..5 {
            let m = s.sums[i].norm();
            if m < out.min_abs_sum[i] {
                out.min_abs_sum[i] = m;
                out.argmin[i] = s.lambda;
            }
            out.max_abs_sum[i] = out.max_abs_sum[i].max(m);
            out.max_sum_abs[i] = out.max_sum_abs[i].max(s.abs_sums[i]);
            out.max_imag[i] = out.max_imag[i].max(s.sums[i].im.abs());
        }
    }
    Ok(out)
}
