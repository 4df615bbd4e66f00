//! B-splines on the Heisenberg group: evaluation, Fourier-side kernels,
//! Gramian and Riesz diagnostics over the lattice {(2k, l, m)}, and oblique
//! duals from finite moment problems.

pub mod bspline;
pub mod duals;
pub mod error;
pub mod gramian;
pub mod group;
pub mod hfun;
pub mod kernels;
pub mod quad;
pub mod rsum;
pub mod sampling;
pub mod specfun;
pub mod splines;

pub use error::{Error, Result};
pub use group::{group_inv, group_mul, FundamentalDomain, HPoint, LatticeIndex};
pub use quad::{QuadResult, QuadSpec};
