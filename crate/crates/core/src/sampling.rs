//! Deterministic point sets for sampling-based checks.

/// Radical inverse of i in the given base.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// The i-th point of the Halton sequence in [0,1)^d (d ≤ 6), skipping the origin.
pub fn halton(i: u64, d: usize) -> Vec<f64> {
    const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    assert!(d <= BASES.len());
    (0..d).map(|k| radical_inverse(i + 1, BASES[k])).collect()
}

/// Halton points mapped into the box [lo, hi].
pub fn halton_box(count: usize, lo: &[f64], hi: &[f64], skip: u64) -> Vec<Vec<f64>> {
    let d = lo.len();
    (0..count as u64)
        .map(|i| {
            halton(i + skip, d).iter().enumerate().map(|(k, u)| lo[k] + (hi[k] - lo[k]) * u).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(2, 3) - 2.0 / 3.0).abs() < 1e-15);
        let p = halton(0, 2);
        assert_eq!(p, vec![0.5, 1.0 / 3.0]);
    }
}
