//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured values before asserting. Run with
//! `cargo test -p hspline --test acceptance -- --nocapture`.

use hspline::bspline::bspline_hat;
use hspline::duals::{assemble_moment_system, index_window, reconstruct, solve_dual, verify_biorthogonality, Generator};
use hspline::gramian::phi2_bounds::{
    i_sums, lambda_grid, phi2_gram_form_with, upper_bound_brackets, upper_bound_phi2, IForm, ISums,
    REFERENCE_LOWER_ESTIMATES,
};
use hspline::gramian::{
    a_p, a_p_direct, orthonormality_check_phi1, psi_function, psi_minimize, riesz_bounds_separable, separable_symbol,
    CoeffField, GramianWindow, Phi1Family, Phi2Family,
};
use hspline::hfun::Combination;
use hspline::kernels::{kernel_from_slice, kernel_phi1_kernel, kernel_recursion, weyl_norm_check, Slice2D};
use hspline::rsum::Decay;
use hspline::sampling::halton_box;
use hspline::splines::nonsymmetry::{minimize_residual, nonsymmetry_residual, NONSYMMETRY_THRESHOLD};
use hspline::splines::phi2_slice::phi2_eval;
use hspline::splines::vector_field::{admissible_points, vector_field_check, vector_field_check_with, Field, RhsForm};
use hspline::splines::{periodization_check, psi2, spline_integral, support_box};
use hspline::specfun::sinc;
use hspline::{group_inv, group_mul, HPoint, LatticeIndex, QuadSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::OnceLock;
use std::time::Instant;

fn report(id: u32, name: &str, pass: bool, detail: &str, start: Instant) -> bool {
    println!(
        "AC{id:02} {} {name}: {detail} [{:.1} s]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    pass
}

#[test]
fn ac01_group_axioms() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pt = || HPoint::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
    let e = HPoint::new(0.0, 0.0, 0.0);
    let mut dev: f64 = 0.0;
    for _ in 0..1000 {
        let (p, q, r) = (pt(), pt(), pt());
        dev = dev.max(group_mul(group_mul(p, q), r).max_abs_diff(&group_mul(p, group_mul(q, r))));
        dev = dev.max(group_mul(p, e).max_abs_diff(&p)).max(group_mul(e, p).max_abs_diff(&p));
        dev = dev.max(group_mul(p, group_inv(p)).max_abs_diff(&e)).max(group_mul(group_inv(p), p).max_abs_diff(&e));
    }
    let ok = dev <= 1e-12;
    assert!(report(1, "group axioms", ok, &format!("max deviation {dev:.3e} (≤ 1e-12)"), t0));
}

#[test]
fn ac02_spline_integrals() {
    let t0 = Instant::now();
    let i1 = spline_integral(1).unwrap();
    let i2 = spline_integral(2).unwrap();
    let i3 = spline_integral(3).unwrap();
    let d = [(i1 - SQRT_2).abs(), (i2 - 2.0).abs(), (i3 - 2.0 * SQRT_2).abs()];
    let ok = d[0] == 0.0 && d[1] <= 1e-6 && d[2] <= 1e-3;
    let detail = format!("n=1 {i1:.12} (err {:.1e}), n=2 {i2:.10} (err {:.1e}), n=3 {i3:.8} (err {:.1e})", d[0], d[1], d[2]);
    assert!(report(2, "spline integrals", ok, &detail, t0));
}

#[test]
fn ac03_periodization() {
    let t0 = Instant::now();
    let pts = halton_box(20, &[0.0, 0.0], &[2.0, 1.0], 7);
    let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
    for p in &pts {
        d1 = d1.max((periodization_check(1, p[0], p[1]).unwrap() - FRAC_1_SQRT_2).abs());
        d2 = d2.max((periodization_check(2, p[0], p[1]).unwrap() - 1.0).abs());
    }
    let ok = d1 <= 1e-10 && d2 <= 1e-4;
    let detail = format!("n=1 max dev {d1:.2e} (≤ 1e-10), n=2 max dev {d2:.2e} (≤ 1e-4) at 20 points");
    assert!(report(3, "periodization", ok, &detail, t0));
}

#[test]
fn ac04_orthonormality_phi1() {
    let t0 = Instant::now();
    let dev = orthonormality_check_phi1(1).unwrap();
    let ok = dev <= 1e-8;
    assert!(report(4, "orthonormality of phi1 translates", ok, &format!("27 translates, max |G - I| {dev:.2e}"), t0));
}

#[test]
fn ac05_kernel_two_paths() {
    let t0 = Instant::now();
    let xi: Vec<f64> = (0..20).map(|i| -1.0 + 3.0 * i as f64 / 19.0).collect();
    let eta: Vec<f64> = (0..20).map(|i| -0.5 + 3.0 * i as f64 / 19.0).collect();
    let mut dev: f64 = 0.0;
    for lam in [0.25, 0.37, 0.8] {
        let rec = kernel_recursion(&kernel_phi1_kernel(lam).unwrap()).unwrap();
        let direct = kernel_from_slice(&Slice2D::phi2(lam));
        let a = rec.sample(&xi, &eta);
        let b = direct.sample(&xi, &eta);
        dev = a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(dev, f64::max);
    }
    let ok = dev <= 1e-4;
    assert!(report(5, "kernel recursion vs slice kernel", ok, &format!("20x20 grid, 3 lambdas, max dev {dev:.2e}"), t0));
}

#[test]
fn ac06_weyl_relation() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for lam in [0.25, 0.37, 0.5, 0.8, 1.3] {
        for s in [Slice2D::phi1(lam), Slice2D::phi2(lam)] {
            let w = weyl_norm_check(&s).unwrap();
            worst = worst.max((w.lhs - w.rhs).abs() / w.lhs.abs());
        }
    }
    let ok = worst <= 1e-6;
    assert!(report(6, "Weyl norm relation", ok, &format!("phi1 and phi2 at 5 lambdas, max rel dev {worst:.2e}"), t0));
}

#[test]
fn ac07_phi2_two_evaluations() {
    let t0 = Instant::now();
    let b = support_box(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dev: f64 = 0.0;
    let mut count = 0;
    while count < 50 {
        let p = HPoint::new(rng.gen_range(b.lo[0]..b.hi[0]), rng.gen_range(b.lo[1]..b.hi[1]), rng.gen_range(b.lo[2]..b.hi[2]));
        let direct = psi2(2, p.x, p.y, p.t);
        if direct <= 0.0 {
            continue;
        }
        dev = dev.max((phi2_eval(p).unwrap() - direct).abs());
        count += 1;
    }
    let ok = dev <= 1e-3;
    assert!(report(7, "phi2 slice transform vs convolution", ok, &format!("50 interior points, max dev {dev:.2e}"), t0));
}

#[test]
fn ac08_vector_fields() {
    let t0 = Instant::now();
    let h = 1e-4;
    let pts = admissible_points(10, h);
    let mut printed = [0.0f64; 3];
    let mut chain = [0.0f64; 3];
    for p in &pts {
        for (i, f) in Field::ALL.into_iter().enumerate() {
            printed[i] = printed[i].max(vector_field_check(1, f, *p, h).unwrap().residual);
            chain[i] = chain[i].max(vector_field_check_with(1, f, *p, h, RhsForm::ChainRule).unwrap().residual);
        }
    }
    let ok = printed.iter().all(|&r| r <= 1e-3);
    let detail = format!(
        "printed forms X {:.2e}, Y {:.2e}, T {:.2e} (≤ 1e-3); with the t-argument chain-rule term X {:.2e}, Y {:.2e}, T {:.2e}",
        printed[0], printed[1], printed[2], chain[0], chain[1], chain[2]
    );
    assert!(report(8, "vector-field identities", ok, &detail, t0));
}

#[test]
fn ac09_nonsymmetry() {
    let t0 = Instant::now();
    let r1 = nonsymmetry_residual(1, 0.5).unwrap();
    let (alpha, r2) = minimize_residual(2, -3.0, 4.0, 29).unwrap();
    let ok = r1 <= 1e-8 && r2 > NONSYMMETRY_THRESHOLD;
    let detail = format!("n=1 residual {r1:.2e} at alpha=1/2; n=2 min residual {r2:.6} at alpha {alpha:.4} (> {NONSYMMETRY_THRESHOLD})");
    assert!(report(9, "non-symmetry", ok, &detail, t0));
}

#[test]
fn ac10_digamma() {
    let t0 = Instant::now();
    let m = psi_minimize().unwrap();
    let mut closed_vs_sum: f64 = 0.0;
    let mut limits: f64 = 0.0;
    for p in 1..=10 {
        for i in 1..100 {
            let lam = i as f64 / 100.0;
            closed_vs_sum = closed_vs_sum.max((a_p(p, lam).unwrap() - a_p_direct(p, lam).unwrap()).abs());
        }
        limits = limits.max((a_p(p, 1.0).unwrap() - 2.0).abs()).max(a_p(p, 1e-9).unwrap().abs());
    }
    let ok = (m.lambda0 - 0.762714).abs() <= 1e-4
        && (m.psi_min - 0.638135).abs() <= 1e-4
        && (m.psi_second - 12.8421).abs() <= 1e-2
        && closed_vs_sum <= 1e-10
        && limits <= 1e-6
        && (psi_function(m.lambda0).unwrap() - m.psi_min).abs() < 1e-12;
    let detail = format!(
        "lambda0 {:.6}, Psi {:.6}, Psi'' {:.4}, A_p closed vs sum {closed_vs_sum:.1e}, limits {limits:.1e}",
        m.lambda0, m.psi_min, m.psi_second
    );
    assert!(report(10, "digamma analysis", ok, &detail, t0));
}

#[test]
fn ac11_separable_riesz() {
    let t0 = Instant::now();
    let zero = Complex64::new(0.0, 0.0);
    let mut chi_dev: f64 = 0.0;
    for p in 1..=5 {
        let pf = p as f64;
        let h = move |w: f64| if (0.0..pf).contains(&w) { Complex64::new(1.0, 0.0) } else { zero };
        for lam in lambda_grid(101) {
            let s = separable_symbol(&h, lam, 0.0, Decay::Compact { radius: p + 2 }).unwrap();
            chi_dev = chi_dev.max((s - pf).abs());
        }
    }
    let b1 = riesz_bounds_separable(|w| bspline_hat(1, w), 1e-12, Decay::Accelerated { p: 2.0 }).unwrap();
    let b2 = riesz_bounds_separable(|w| bspline_hat(2, w), 1e-12, Decay::Accelerated { p: 4.0 }).unwrap();
    // brute-force oracle: plain truncated r-sums of sinc⁴ on the same grid
    let brute = |lam: f64| 2.0 * (-20_000..=20_000).map(|r| sinc(r as f64 - lam).powi(4)).sum::<f64>();
    let grid = lambda_grid(101);
    let bl = grid.iter().map(|&l| brute(l)).fold(f64::INFINITY, f64::min);
    let bu = grid.iter().map(|&l| brute(l)).fold(0.0, f64::max);
    let d1 = (b1.lower - 2.0).abs().max((b1.upper - 2.0).abs());
    let d2 = (b2.lower - bl).abs().max((b2.upper - bu).abs());
    let d2c = (b2.lower - 2.0 / 3.0).abs().max((b2.upper - 2.0).abs());
    let ok = chi_dev == 0.0 && d1 <= 1e-8 && d2 <= 1e-6 && d2c <= 1e-6;
    let detail = format!(
        "chi symbol dev {chi_dev:.1e}; B1 ({:.10}, {:.10}); B2 ({:.8}, {:.8}) vs brute ({bl:.8}, {bu:.8})",
        b1.lower, b1.upper, b2.lower, b2.upper
    );
    assert!(report(11, "separable Riesz bounds", ok, &detail, t0));
}

#[test]
fn ac12_oblique_dual() {
    let t0 = Instant::now();
    let phi = Generator::separable(3);
    let w = index_window(1, 3.0).unwrap();
    let sys = assemble_moment_system(&phi, &w, &QuadSpec::default()).unwrap();
    let dual = solve_dual(&sys, &phi).unwrap();
    let d = |m| dual.coeff(LatticeIndex::new(0, 0, m)).unwrap();
    let (d0, d1, d2) = (d(0), d(-1), d(-2));
    let eq = (6.0 * d0 + 13.0 * d1 + d2 - 60.0)
        .abs()
        .max((d0 + 54.0 / 13.0 * d1 + d2).abs())
        .max((d0 + 13.0 * d1 + 6.0 * d2).abs());
    let mut prof: f64 = 0.0;
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        let v = hspline::hfun::HFunction::eval(&dual, HPoint::new(1.3, 0.4, t));
        prof = prof.max((v - 1.5 * (40.0 * t * t - 36.0 * t + 5.0)).abs());
    }
    let bio = verify_biorthogonality(&phi, &dual, &w).unwrap();
    let planted = [(LatticeIndex::ZERO, 2.0), (LatticeIndex::new(1, 0, 0), -3.0), (LatticeIndex::new(0, 0, 1), 0.5)];
    let mut f = Combination::new();
    for (g, c) in planted {
        f.push(c, phi.translate(g));
    }
    let win: Vec<LatticeIndex> = (0..=1).flat_map(|k| (-1..=2).map(move |m| LatticeIndex::new(k, 0, m))).collect();
    let r = reconstruct(&f, &phi, &dual, &win).unwrap();
    let rec = r
        .coeffs
        .iter()
        .map(|(g, c)| (c - planted.iter().find(|p| p.0 == *g).map_or(0.0, |p| p.1)).abs())
        .fold(0.0, f64::max);
    let ok = eq <= 1e-10 && prof <= 1e-8 && bio <= 1e-6 && rec <= 1e-6;
    let detail = format!(
        "d = ({d0:.10}, {d1:.10}, {d2:.10}), equations {eq:.1e}, profile {prof:.1e}, biorthogonality {bio:.1e}, reconstruction {rec:.1e}"
    );
    assert!(report(12, "oblique dual", ok, &detail, t0));
}

/// r-sums of the printed integrands on the 101-point λ-grid, shared by 13 and 14.
fn phi2_grid_sums() -> &'static Vec<ISums> {
    static SUMS: OnceLock<Vec<ISums>> = OnceLock::new();
    SUMS.get_or_init(|| lambda_grid(101).into_iter().map(|l| i_sums(l, 1e-9, IForm::Printed).unwrap()).collect())
}

fn random_field(rng: &mut ChaCha8Rng) -> CoeffField {
    let radius = rng.gen_range(1..=3);
    let mut c = CoeffField::new();
    for k in -radius..=radius {
        for l in -radius..=radius {
            c.insert(k, l, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    c
}

/// (pass, detail) for the property part of criterion 13.
fn phi2_properties() -> (bool, String) {
    let sums = phi2_grid_sums();
    let b = upper_bound_phi2();
    let b1 = upper_bound_brackets()[0];
    let max_i1 = sums.iter().map(|s| s.abs_sums[0]).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut conj, mut imag, mut ratio): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let s = &sums[rng.gen_range(0..sums.len())];
        let c = random_field(&mut rng);
        let f = phi2_gram_form_with(s, &c).unwrap();
        conj = conj.max(f.conjugacy_residual());
        imag = imag.max(f.imag.abs() / f.value.abs());
        ratio = ratio.max(f.value / c.norm_sq());
    }
    let ok = (b - 1.715).abs() <= 0.01 && max_i1 <= b1 && conj <= 1e-8 && imag <= 1e-8 && ratio <= b;
    let detail = format!(
        "B {b:.6}; max sum|I1| {max_i1:.6} (≤ {b1:.6}); 100 random fields: conjugacy {conj:.1e}, rel imag {imag:.1e}, max form/|c|² {ratio:.6} (≤ B)"
    );
    (ok, detail)
}

#[test]
fn ac13_phi2_gramian_bounds() {
    let t0 = Instant::now();
    let sums = phi2_grid_sums();
    let (props_ok, props) = phi2_properties();
    let mut lows = [f64::INFINITY; 5];
    for s in sums {
        for (i, v) in s.sums.iter().enumerate() {
            lows[i] = lows[i].min(v.norm());
        }
    }
    let rel: Vec<f64> = lows.iter().zip(REFERENCE_LOWER_ESTIMATES).map(|(v, r)| (v - r).abs() / r).collect();
    let lows_ok = rel.iter().all(|&e| e <= 0.05);
    let detail = format!(
        "{props}; lower estimates j=1,3,5,7,9 {:.4?} vs {:?} (rel dev {:.2?}, ≤ 5%)",
        lows, REFERENCE_LOWER_ESTIMATES, rel
    );
    assert!(report(13, "phi2 Gramian bounds", props_ok && lows_ok, &detail, t0));
}

#[test]
fn ac14_phi2_property_suite_and_psd() {
    let t0 = Instant::now();
    let (props_ok, props) = phi2_properties();
    let win: Vec<(i64, i64)> = (-1..=1).flat_map(|k| (-1..=1).map(move |l| (k, l))).collect();
    let mut min_eig = f64::INFINITY;
    let mut herm: f64 = 0.0;
    for lam in [0.05, 0.25, 0.5, 0.762714, 0.95, 1.0] {
        for g in [GramianWindow::new(lam, &win, &Phi2Family, 1e-8).unwrap(), GramianWindow::new(lam, &win, &Phi1Family, 1e-10).unwrap()] {
            min_eig = min_eig.min(g.min_eigenvalue());
            herm = herm.max(g.hermitian_residual());
        }
    }
    let ok = props_ok && min_eig >= -1e-8 && herm <= 1e-8;
    let detail = format!("{props}; 3x3 windows at 6 lambdas: min eigenvalue {min_eig:.6e} (≥ -1e-8), Hermitian residual {herm:.1e}");
    assert!(report(14, "phi2 property suite and PSD windows", ok, &detail, t0));
}
