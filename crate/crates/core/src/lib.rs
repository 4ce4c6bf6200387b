//! Connectivity of filled Julia sets for the unicritical family `z^n + c`
//! with `c = e^{2πiθ}` on the unit circle, and Hausdorff-distance
//! experiments showing that `K(z^n + c)` has no limit as `n → ∞`.
//!
//! The crate is split by concern:
//!
//! * [`exact_angle`] – exact rational rotation arithmetic and the
//!   connected / disconnected / on-circle trichotomy.
//! * [`dynamics`] – floating point iteration, the closed form for
//!   `|P²(0)|`, and the trapping-disk check.
//! * [`raster`] – escape-time rasters of `K`, boundary extraction, and
//!   Multibrot slices in logarithmic coordinates.
//! * [`geometry`] – Hausdorff distances between point clouds and to the
//!   unit circle / closed unit disk.
//! * [`analysis`] – subsequence partitions, star tables, convergence
//!   sweeps and equidistribution statistics.
//! * [`cli`] – the command line surface and the PPM / CSV writers.
//!
//! All distances are planar Euclidean. Every set involved lies in a
//! bounded region around the unit disk, where the Euclidean and chordal
//! metrics on the Riemann sphere are equivalent.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exact_angle;
pub mod geometry;
pub mod raster;

pub use error::{Error, Result};
