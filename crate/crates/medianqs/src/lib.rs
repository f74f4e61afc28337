//! Numerical median quasi-states on the unit 2-sphere.
//!
//! The pipeline approximates the median quasi-state `zeta(f)` of a Lipschitz
//! function `f` by an Aarnes quasi-state over a finite odd point set:
//!
//! 1. equal-area partition of the sphere into `k` regions ([`partition`]),
//! 2. icosahedral geodesic triangulation with `20 N^2` faces ([`triangulation`]),
//! 3. piecewise-linear replacement of `f` at the vertices ([`field`]),
//! 4. Reeb (contour) tree of the PL field ([`reeb`]),
//! 5. subtree counting and median node selection ([`median`]).
//!
//! The reported value comes with a certified error bound
//! `lip * (sqrt(3)(3 - sqrt(5))/N + 7*pi*(13 + 6*sqrt(5))/11 / sqrt(k))`.
//! [`wasserstein`] carries the W1/Winf utilities used to check continuity of
//! the quasi-state in the underlying measure.

pub mod error;
pub mod field;
pub mod function;
pub mod median;
pub mod partition;
pub mod reeb;
pub mod sphere;
pub mod triangulation;
pub mod wasserstein;

pub use error::Error;
pub use field::ScalarField;
pub use function::{InputFunction, Polynomial};
pub use median::{compute, select_parameters, QuasiStateResult};
pub use partition::EqualAreaPartition;
pub use reeb::ReebTree;
pub use sphere::UnitPoint;
pub use triangulation::IcosaTriangulation;
pub use wasserstein::DiscreteMeasure;

/// `Result` alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Curvilinear face diameter coefficient: `sqrt(3) * (3 - sqrt(5))`, about 1.3231.
pub fn tri_diameter_coeff() -> f64 {
    3.0_f64.sqrt() * (3.0 - 5.0_f64.sqrt())
}

/// PL Lipschitz inflation factor: `pi * (13 + 6 sqrt(5)) / 11`, about 7.5445.
pub fn pl_lip_factor() -> f64 {
    std::f64::consts::PI * (13.0 + 6.0 * 5.0_f64.sqrt()) / 11.0
}

/// Partition term coefficient of the certified bound: `7 * pl_lip_factor()`, about 52.81.
pub fn partition_term_coeff() -> f64 {
    7.0 * pl_lip_factor()
}

/// Smallest admissible subdivision depth.
pub const MIN_N: u32 = 46;

/// Practical cap on the subdivision depth; beyond it memory and runtime are
/// out of desk range and `select_parameters` reports a resource error.
pub const MAX_N: u32 = 8192;

/// Smallest admissible region count.
pub const MIN_K: u32 = 237;

/// Region-count cap `k <= K_DENSITY_COEFF * N^2` that keeps every region markable.
pub const K_DENSITY_COEFF: f64 = 0.115744;

/// Guaranteed region inradius coefficient: sampled inradius >= `CAP_INRADIUS_COEFF / sqrt(k)`.
pub const CAP_INRADIUS_COEFF: f64 = 0.77970;

/// Guaranteed region diameter coefficient: sampled diameter <= `REGION_DIAMETER_COEFF / sqrt(k)`.
pub const REGION_DIAMETER_COEFF: f64 = 7.0;
