use hspline::bspline::bspline_hat;
use hspline::gramian::phi2_bounds::{i_sums, phi2_gram_form_with, upper_bound_phi2, IForm};
use hspline::gramian::{
    a_p, a_p_direct, gramian_form, phi2_gram_form, CoeffField, GramianWindow, Phi1Family, Phi2Family, SeparableFamily,
};
use hspline::rsum::Decay;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(rng: &mut ChaCha8Rng, radius: i64) -> CoeffField {
    let mut c = CoeffField::new();
    for k in -radius..=radius {
        for l in -radius..=radius {
            c.insert(k, l, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    c
}

fn window3() -> Vec<(i64, i64)> {
    (-1..=1).flat_map(|k| (-1..=1).map(move |l| (k, l))).collect()
}

#[test]
fn phi2_form_is_real_and_scales() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = random_field(&mut rng, 1);
    let lam = 0.41;
    let v = gramian_form(lam, &c, &Phi2Family, 1e-9).unwrap();
    assert!(v.imag.abs() <= 1e-8 * v.value.abs(), "{v:?}");
    let alpha = Complex64::new(0.3, -1.7);
    let w = gramian_form(lam, &c.scaled(alpha), &Phi2Family, 1e-9).unwrap();
    assert!((w.value - alpha.norm_sqr() * v.value).abs() <= 1e-12 * w.value.abs());
}

#[test]
fn corrected_blocks_match_generic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_field(&mut rng, 1);
    for lam in [0.23, 0.77] {
        let blocks = phi2_gram_form_with(&i_sums(lam, 1e-10, IForm::Corrected).unwrap(), &c).unwrap();
        let generic = gramian_form(lam, &c, &Phi2Family, 1e-10).unwrap();
        assert!((blocks.value - generic.value).abs() < 1e-8, "{} vs {}", blocks.value, generic.value);
        assert!(blocks.conjugacy_residual() < 1e-12);
    }
}

#[test]
fn printed_blocks_are_conjugate_and_bounded_on_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = upper_bound_phi2();
    let lam = 0.5;
    let sums = i_sums(lam, 1e-9, IForm::Printed).unwrap();
    for _ in 0..20 {
        let c = random_field(&mut rng, 2);
        let f = phi2_gram_form_with(&sums, &c).unwrap();
        assert!(f.conjugacy_residual() <= 1e-8);
        assert!(f.imag.abs() <= 1e-8 * f.value.abs());
        assert!(f.value <= b * c.norm_sq());
    }
}

#[test]
fn single_coefficient_gives_i9_sum() {
    let mut c = CoeffField::new();
    c.insert(2, -1, Complex64::new(1.0, 0.0));
    let f = phi2_gram_form(0.3, &c, 1e-9).unwrap();
    let s = i_sums(0.3, 1e-9, IForm::Printed).unwrap();
    assert_eq!(f.value, s.sum(9).re);
    assert!(f.value > 0.0);
}

#[test]
fn constant_field_near_one_exceeds_published_bound() {
    // every offset contributes with phase ≈ 1 near λ = 1
    let mut c = CoeffField::new();
    for k in 0..10 {
        for l in 0..10 {
            c.insert(k, l, Complex64::new(1.0, 0.0));
        }
    }
    let f = phi2_gram_form_with(&i_sums(1.0, 1e-10, IForm::Corrected).unwrap(), &c).unwrap();
    let ratio = f.value / c.norm_sq();
    assert!(ratio > upper_bound_phi2(), "{ratio}");
    assert!(ratio < 2.0);
}

#[test]
fn windows_are_hermitian_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let win = window3();
    let sep = SeparableFamily { h_hat: |w: f64| bspline_hat(3, w), height: 1.0, decay: Decay::Accelerated { p: 6.0 } };
    for _ in 0..20 {
        let lam: f64 = rng.gen_range(0.01..1.0);
        for g in [
            GramianWindow::new(lam, &win, &Phi1Family, 1e-10).unwrap(),
            GramianWindow::new(lam, &win, &Phi2Family, 1e-8).unwrap(),
            GramianWindow::new(lam, &win, &sep, 1e-10).unwrap(),
        ] {
            assert!(g.hermitian_residual() <= 1e-8);
            assert!(g.min_eigenvalue() >= -1e-8, "lambda {lam}: {:?}", g.eigenvalues());
        }
    }
}

#[test]
fn chi_example_window_respects_digamma_bound() {
    // height-2 boxes overlap their l±1 neighbours: symbol 4p + 2Re(e^{iθ}Σ_r 2e^{πia}sinc a)
    let p = 3usize;
    let fam = SeparableFamily {
        h_hat: move |w: f64| if (0.0..p as f64).contains(&w) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) },
        height: 2.0,
        decay: Decay::Compact { radius: p as i64 + 2 },
    };
    let win: Vec<(i64, i64)> = (0..6).map(|l| (0, l)).collect();
    for lam in [0.3, 0.762714, 0.95] {
        let g = GramianWindow::new(lam, &win, &fam, 0.0).unwrap();
        let lower = 4.0 * p as f64 - 2.0 * a_p(p, lam).unwrap();
        assert!(g.min_eigenvalue() >= lower - 1e-10);
        assert!(g.eigenvalues().last().unwrap() <= &(4.0 * p as f64 + 2.0 * a_p(p, lam).unwrap() + 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn a_p_closed_form_matches_sum(p in 1usize..=10, lam in 0.001f64..0.999) {
        prop_assert!((a_p(p, lam).unwrap() - a_p_direct(p, lam).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn p_minus_a_p_positive(p in 3usize..=12, lam in 0.0f64..=1.0) {
        prop_assert!(p as f64 - a_p(p, lam).unwrap() > 0.0);
    }
}
