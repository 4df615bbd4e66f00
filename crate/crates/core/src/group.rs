//! Group law of the Heisenberg group, the lattice Γ = {(2k, l, m)} and its
//! fundamental domain Q = [0,2]×[0,1]×[0,1].

use std::ops::Mul;

/// A point (x, y, t) of the Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl HPoint {
    pub const IDENTITY: HPoint = HPoint { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        HPoint { x, y, t }
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &HPoint) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.t - other.t).abs())
    }

    pub fn inv(self) -> HPoint {
        group_inv(self)
    }
}

impl Mul for HPoint {
    type Output = HPoint;
    fn mul(self, rhs: HPoint) -> HPoint {
        group_mul(self, rhs)
    }
}

/// (x,y,t)(x',y',t') = (x+x', y+y', t+t'+½(x'y−y'x)).
pub fn group_mul(p: HPoint, q: HPoint) -> HPoint {
    HPoint {
        x: p.x + q.x,
        y: p.y + q.y,
        t: p.t + q.t + 0.5 * (q.x * p.y - q.y * p.x),
    }
}

pub fn group_inv(p: HPoint) -> HPoint {
    HPoint { x: -p.x, y: -p.y, t: -p.t }
}

/// Integer triple (k, l, m) addressing (2k, l, m) ∈ Γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeIndex {
    pub k: i64,
    pub l: i64,
    pub m: i64,
}

impl LatticeIndex {
    pub const ZERO: LatticeIndex = LatticeIndex { k: 0, l: 0, m: 0 };

    pub const fn new(k: i64, l: i64, m: i64) -> Self {
        LatticeIndex { k, l, m }
    }

    pub fn embed(self) -> HPoint {
        HPoint::new(2.0 * self.k as f64, self.l as f64, self.m as f64)
    }

    /// Lattice product; the central coordinate stays an integer.
    pub fn mul(self, o: LatticeIndex) -> LatticeIndex {
        LatticeIndex {
            k: self.k + o.k,
            l: self.l + o.l,
            m: self.m + o.m + o.k * self.l - o.l * self.k,
        }
    }

    pub fn inv(self) -> LatticeIndex {
        LatticeIndex { k: -self.k, l: -self.l, m: -self.m }
    }
}

/// The fundamental domain Q = [0,2]×[0,1]×[0,1] of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FundamentalDomain;

impl FundamentalDomain {
    pub const LO: [f64; 3] = [0.0, 0.0, 0.0];
    pub const HI: [f64; 3] = [2.0, 1.0, 1.0];

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| Self::HI[i] - Self::LO[i]).product()
    }

    /// Membership in the closed box.
    pub fn contains(&self, p: HPoint) -> bool {
        (0.0..=2.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) && (0.0..=1.0).contains(&p.t)
    }

    pub fn indicator(&self, p: HPoint) -> f64 {
        if self.contains(p) {
            1.0
        } else {
            0.0
        }
    }
}

/// p ↦ f(γ⁻¹p).
pub fn left_translate<F>(gamma: HPoint, f: F) -> impl Fn(HPoint) -> f64
where
    F: Fn(HPoint) -> f64,
{
    let g = group_inv(gamma);
    move |p| f(g * p)
}

/// p ↦ f(pγ).
pub fn right_translate<F>(gamma: HPoint, f: F) -> impl Fn(HPoint) -> f64
where
    F: Fn(HPoint) -> f64,
{
    move |p| f(p * gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        let p = HPoint::new(1.0, 2.0, 0.0) * HPoint::new(3.0, 0.0, 0.0);
        assert_eq!(p, HPoint::new(4.0, 2.0, 3.0));
        let q = HPoint::new(0.4, -1.0, 2.0);
        assert_eq!(HPoint::IDENTITY * q, q);
        let r = HPoint::new(1.5, -0.7, 2.3);
        assert!((r * r.inv()).max_abs_diff(&HPoint::IDENTITY) == 0.0);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(group_inv(HPoint::new(1.0, 2.0, 3.0)), HPoint::new(-1.0, -2.0, -3.0));
        let p = HPoint::new(0.3, 0.1, -9.0);
        assert_eq!(group_inv(group_inv(p)), p);
    }

    #[test]
    fn lattice_translation_reduces_to_twisted_shift() {
        let f = |p: HPoint| (p.x * 1.3).sin() + p.y * p.y - 0.2 * p.t;
        let (k, l, m) = (1.0, -2.0, 3.0);
        let lf = left_translate(HPoint::new(2.0 * k, l, m), f);
        let (x, y, t) = (0.3, 0.8, -0.4);
        let expected = f(HPoint::new(x - 2.0 * k, y - l, t - m + 0.5 * (-l * x + 2.0 * k * y)));
        assert!((lf(HPoint::new(x, y, t)) - expected).abs() < 1e-14);
    }

    #[test]
    fn right_translate_of_box_indicator() {
        let q = FundamentalDomain;
        let (u, v, s) = (0.3, -0.2, 0.1);
        let rf = right_translate(HPoint::new(u, v, s), |p| q.indicator(p));
        for &(x, y, t) in &[(0.5, 0.5, 0.5), (1.9, 0.1, 0.9), (0.0, 0.0, 0.0), (1.7, 1.1, 0.95)] {
            let direct = q.indicator(HPoint::new(x + u, y + v, t + s + 0.5 * (u * y - v * x)));
            assert_eq!(rf(HPoint::new(x, y, t)), direct);
        }
    }

    #[test]
    fn lattice_closed_under_product() {
        for k in -3..=3 {
            for l in -3..=3 {
                for m in -3..=3 {
                    let a = LatticeIndex::new(k, l, m);
                    let b = LatticeIndex::new(l, m, k);
                    let prod = a.embed() * b.embed();
                    assert_eq!(prod, a.mul(b).embed());
                    assert_eq!(prod.t.fract(), 0.0);
                }
            }
        }
    }

    #[test]
    fn domain_volume() {
        assert_eq!(FundamentalDomain.volume(), 2.0);
    }
}
