use hspline::group::{FundamentalDomain, HPoint, LatticeIndex};
use hspline::splines::{periodization_check, phi1_eval, phi_n_eval, support_box};
use proptest::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

fn point() -> impl Strategy<Value = HPoint> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y, t)| HPoint::new(x, y, t))
}

fn index() -> impl Strategy<Value = LatticeIndex> {
    (-6i64..=6, -6i64..=6, -6i64..=6).prop_map(|(k, l, m)| LatticeIndex::new(k, l, m))
}

proptest! {
    #[test]
    fn group_law_is_associative(p in point(), q in point(), r in point()) {
        let a = (p * q) * r;
        let b = p * (q * r);
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn inverse_and_identity(p in point()) {
        prop_assert!((p * p.inv()).max_abs_diff(&HPoint::IDENTITY) == 0.0);
        prop_assert_eq!(p * HPoint::IDENTITY, p);
    }

    #[test]
    fn lattice_product_is_the_group_product(a in index(), b in index()) {
        prop_assert_eq!(a.mul(b).embed(), a.embed() * b.embed());
        prop_assert_eq!(a.mul(a.inv()), LatticeIndex::ZERO);
    }

    #[test]
    fn phi1_is_scaled_indicator(p in point()) {
        prop_assert_eq!(phi1_eval(p), FRAC_1_SQRT_2 * FundamentalDomain.indicator(p));
    }

    #[test]
    fn phi2_nonnegative_and_supported(p in point()) {
        let v = phi_n_eval(2, p).unwrap();
        prop_assert!(v >= -1e-12, "{v}");
        let b = support_box(2);
        if !b.contains(p) {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn phi1_periodizes_to_constant(x in 0.0f64..2.0, y in 0.0f64..1.0) {
        let s = periodization_check(1, x, y).unwrap();
        prop_assert!((s - FRAC_1_SQRT_2).abs() < 1e-12);
    }
}

#[test]
fn phi2_periodizes_to_one() {
    for &(x, y) in &[(0.3, 0.2), (1.1, 0.7), (1.9, 0.45)] {
        let s = periodization_check(2, x, y).unwrap();
        assert!((s - 1.0).abs() < 1e-4, "({x},{y}): {s}");
    }
}
