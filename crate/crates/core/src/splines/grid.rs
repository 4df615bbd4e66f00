//! Regular sample grids over a box, row-major with the t index fastest.

use crate::error::{Error, Result};
use crate::group::HPoint;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid3D {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub shape: [usize; 3],
    pub samples: Vec<f64>,
}

impl Grid3D {
    pub fn new(lo: [f64; 3], hi: [f64; 3], shape: [usize; 3], samples: Vec<f64>) -> Result<Self> {
        if shape.iter().any(|&s| s == 0) {
            return Err(Error::Domain("grid shape entries must be positive".into()));
        }
        if shape.iter().product::<usize>() != samples.len() {
            return Err(Error::Domain(format!(
                "grid shape {:?} needs {} samples, got {}",
                shape,
                shape.iter().product::<usize>(),
                samples.len()
            )));
        }
        if (0..3).any(|i| !(hi[i] >= lo[i])) {
            return Err(Error::Domain("grid box has hi < lo".into()));
        }
        Ok(Grid3D { lo, hi, shape, samples })
    }

    /// Coordinate of node `i` along `axis`; a single node sits at lo.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.shape[axis];
        if n == 1 {
            self.lo[axis]
        } else {
            self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / (n - 1) as f64
        }
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.shape[1] + j) * self.shape[2] + k
    }

    pub fn point(&self, flat: usize) -> HPoint {
        let k = flat % self.shape[2];
        let j = (flat / self.shape[2]) % self.shape[1];
        let i = flat / (self.shape[1] * self.shape[2]);
        HPoint::new(self.coord(0, i), self.coord(1, j), self.coord(2, k))
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.samples[self.index(i, j, k)]
    }

    /// Fills the grid in parallel; the first error aborts the fill.
    pub fn try_fill<F>(lo: [f64; 3], hi: [f64; 3], shape: [usize; 3], f: F) -> Result<Self>
    where
        F: Fn(HPoint) -> Result<f64> + Sync,
    {
        let mut g = Grid3D::new(lo, hi, shape, vec![0.0; shape.iter().product()])?;
        let pts: Vec<HPoint> = (0..g.samples.len()).map(|n| g.point(n)).collect();
        g.samples = pts.par_iter().map(|&p| f(p)).collect::<Result<Vec<f64>>>()?;
        Ok(g)
    }

    pub fn fill<F: Fn(HPoint) -> f64 + Sync>(lo: [f64; 3], hi: [f64; 3], shape: [usize; 3], f: F) -> Result<Self> {
        Self::try_fill(lo, hi, shape, |p| Ok(f(p)))
    }

    /// Trilinear interpolation; zero outside the box.
    pub fn sample(&self, p: HPoint) -> f64 {
        let c = [p.x, p.y, p.t];
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            if c[a] < self.lo[a] || c[a] > self.hi[a] {
                return 0.0;
            }
            let n = self.shape[a];
            if n == 1 {
                continue;
            }
            let s = (c[a] - self.lo[a]) / (self.hi[a] - self.lo[a]) * (n - 1) as f64;
            let i = (s.floor() as usize).min(n - 2);
            base[a] = i;
            frac[a] = s - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for a in 0..3 {
                let up = corner >> a & 1 == 1;
                if self.shape[a] == 1 {
                    if up {
                        w = 0.0;
                    }
                    continue;
                }
                idx[a] = base[a] + up as usize;
                w *= if up { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                acc += w * self.get(idx[0], idx[1], idx[2]);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_t_fastest() {
        let g = Grid3D::fill([0.0; 3], [1.0, 2.0, 3.0], [2, 3, 4], |p| 100.0 * p.x + 10.0 * p.y + p.t).unwrap();
        assert_eq!(g.samples.len(), 24);
        assert_eq!(g.samples[1], 1.0);
        assert_eq!(g.samples[4], 10.0);
        assert_eq!(g.samples[12], 100.0);
    }

    #[test]
    fn trilinear_is_exact_on_affine_functions() {
        let g = Grid3D::fill([0.0; 3], [1.0; 3], [5, 4, 3], |p| 2.0 * p.x - p.y + 0.5 * p.t + 1.0).unwrap();
        let p = HPoint::new(0.31, 0.77, 0.42);
        assert!((g.sample(p) - (2.0 * 0.31 - 0.77 + 0.21 + 1.0)).abs() < 1e-14);
        assert_eq!(g.sample(HPoint::new(2.0, 0.5, 0.5)), 0.0);
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(Grid3D::new([0.0; 3], [1.0; 3], [2, 2, 2], vec![0.0; 7]).is_err());
    }
}
