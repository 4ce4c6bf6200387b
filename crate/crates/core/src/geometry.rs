//! Hausdorff distances between finite point clouds, and between a cloud
//! and the reference sets `S¹` and the closed unit disk.
//!
//! Nearest-neighbour queries go through a uniform bucket grid with an
//! exhaustive ring search, so every distance equals the one a brute-force
//! scan would produce, bit for bit.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::unit_vector;
use crate::error::{Error, Result};

/// A finite set of points in the plane. Duplicates (exact bit equality)
/// are removed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Complex64>,
    spacing: f64,
}

impl PointCloud {
    /// `spacing` is the pitch of the grid the points came from, or 0 for
    /// analytic samples.
    pub fn new(mut points: Vec<Complex64>, spacing: f64) -> Self {
        let key = |z: &Complex64| (z.re.to_bits(), z.im.to_bits());
        points.sort_unstable_by_key(key);
        points.dedup_by_key(|z| key(z));
        PointCloud { points, spacing: spacing.max(0.0) }
    }

    /// `m` equally spaced points on the circle of the given radius.
    pub fn circle(m: usize, radius: f64) -> Self {
        let points = (0..m).map(|j| radius * unit_vector(j as f64 / m as f64)).collect();
        PointCloud::new(points, 0.0)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The cloud multiplied by `e^{2πi·turns}`.
    pub fn rotated(&self, turns: f64) -> PointCloud {
        let w = unit_vector(turns);
        PointCloud::new(self.points.iter().map(|z| z * w).collect(), self.spacing)
    }

    fn ensure_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyCloud)
        } else {
            Ok(())
        }
    }
}

/// A distance together with a bound on its sampling error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// Uniform bucket grid over a point cloud for exact nearest-neighbour
/// distance queries.
pub struct NearestIndex {
    origin: (f64, f64),
    pitch: f64,
    nx: i64,
    ny: i64,
    cell_start: Vec<u32>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl NearestIndex {
    /// Bucket pitch is `max(spacing, diameter / √|B|)`.
    pub fn new(cloud: &PointCloud) -> Result<Self> {
        cloud.ensure_non_empty()?;
        let pts = cloud.points();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in pts {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let diameter = (x1 - x0).hypot(y1 - y0);
        let mut pitch = f64::max(cloud.spacing(), diameter / (pts.len() as f64).sqrt());
        if !(pitch > 0.0) || !pitch.is_finite() {
            pitch = 1.0;
        }
        let nx = ((x1 - x0) / pitch).floor() as i64 + 1;
        let ny = ((y1 - y0) / pitch).floor() as i64 + 1;
        let cells = (nx * ny) as usize;

        let cell_of = |z: &Complex64| {
            let i = (((z.re - x0) / pitch).floor() as i64).clamp(0, nx - 1);
            let j = (((z.im - y0) / pitch).floor() as i64).clamp(0, ny - 1);
            (j * nx + i) as usize
        };
        let mut counts = vec![0u32; cells + 1];
        for z in pts {
            counts[cell_of(z) + 1] += 1;
        }
        for k in 1..=cells {
            counts[k] += counts[k - 1];
        }
        let cell_start = counts.clone();
        let mut fill = counts;
        let mut xs = vec![0.0; pts.len()];
        let mut ys = vec![0.0; pts.len()];
        for z in pts {
            let cell = cell_of(z);
            let slot = fill[cell] as usize;
            xs[slot] = z.re;
            ys[slot] = z.im;
            fill[cell] += 1;
        }
        Ok(NearestIndex { origin: (x0, y0), pitch, nx, ny, cell_start, xs, ys })
    }

    #[inline]
    fn scan_cell(&self, i: i64, j: i64, qx: f64, qy: f64, best: &mut f64) {
        let cell = (j * self.nx + i) as usize;
        let (lo, hi) = (self.cell_start[cell] as usize, self.cell_start[cell + 1] as usize);
        for k in lo..hi {
            let dx = self.xs[k] - qx;
            let dy = self.ys[k] - qy;
            let d = dx * dx + dy * dy;
            if d < *best {
                *best = d;
            }
        }
    }

    /// Squared distance from `q` to the nearest indexed point. The search
    /// may stop as soon as a point within `sqrt(cutoff_sq)` is found, in
    /// which case the returned value is some distance `≤ cutoff_sq`.
    pub fn nearest_sq_with_cutoff(&self, q: Complex64, cutoff_sq: f64) -> f64 {
        let (qx, qy) = (q.re, q.im);
        let cx = ((qx - self.origin.0) / self.pitch).floor() as i64;
        let cy = ((qy - self.origin.1) / self.pitch).floor() as i64;
        let outside = |c: i64, n: i64| if c < 0 { -c } else if c >= n { c - n + 1 } else { 0 };
        let r_start = outside(cx, self.nx).max(outside(cy, self.ny));
        let r_end = [cx, self.nx - 1 - cx, cy, self.ny - 1 - cy]
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or(0);

        let mut best = f64::INFINITY;
        for r in r_start..=r_end {
            // Unvisited cells are at least r - 1 cells away from q's cell.
            let lb = ((r - 1).max(0) as f64 * self.pitch) * (1.0 - 1e-12);
            if lb * lb >= best {
                break;
            }
            if r == 0 {
                self.scan_cell(cx, cy, qx, qy, &mut best);
            } else {
                let i_lo = (cx - r).max(0);
                let i_hi = (cx + r).min(self.nx - 1);
                for j in [cy - r, cy + r] {
                    if (0..self.ny).contains(&j) {
                        for i in i_lo..=i_hi {
                            self.scan_cell(i, j, qx, qy, &mut best);
                        }
                    }
                }
                let j_lo = (cy - r + 1).max(0);
                let j_hi = (cy + r - 1).min(self.ny - 1);
                for i in [cx - r, cx + r] {
                    if (0..self.nx).contains(&i) {
                        for j in j_lo..=j_hi {
                            self.scan_cell(i, j, qx, qy, &mut best);
                        }
                    }
                }
            }
            if best <= cutoff_sq {
                return best;
            }
        }
        best
    }

    pub fn nearest_sq(&self, q: Complex64) -> f64 {
        self.nearest_sq_with_cutoff(q, -1.0)
    }

    pub fn nearest(&self, q: Complex64) -> f64 {
        self.nearest_sq(q).sqrt()
    }
}

const CHUNK: usize = 2048;

/// `max_{q ∈ queries} d(q, index)` with early termination for queries that
/// cannot raise the running maximum.
fn max_min_distance(queries: &[Complex64], index: &NearestIndex) -> f64 {
    queries
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut local = 0.0f64;
            for &q in chunk {
                let d = index.nearest_sq_with_cutoff(q, local);
                if d > local {
                    local = d;
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// `sup_{a∈A} inf_{b∈B} |a - b|`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    a.ensure_non_empty()?;
    let index = NearestIndex::new(b)?;
    Ok(max_min_distance(a.points(), &index))
}

/// The symmetric Hausdorff distance.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// Hausdorff distance from the cloud to `S¹`.
///
/// The cloud-to-circle half is exact (`||z| - 1|`); the circle-to-cloud
/// half samples `m` equally spaced angles, which costs at most `π/m` plus
/// the cloud spacing.
pub fn hausdorff_to_circle(a: &PointCloud, m: usize) -> Result<DistanceEstimate> {
    a.ensure_non_empty()?;
    if m < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 circle samples, got {m}")));
    }
    let radial = a.points().par_iter().map(|z| (z.norm() - 1.0).abs()).reduce(|| 0.0, f64::max);
    let index = NearestIndex::new(a)?;
    let samples: Vec<Complex64> = (0..m).map(|j| unit_vector(j as f64 / m as f64)).collect();
    let covering = max_min_distance(&samples, &index);
    Ok(DistanceEstimate {
        value: radial.max(covering),
        error_bound: PI / m as f64 + a.spacing(),
    })
}

/// Hausdorff distance from the cloud to the closed unit disk.
///
/// Points outside the disk contribute `|z| - 1` exactly; the disk side is
/// sampled on the square lattice `pitch·ℤ²` clipped to `|w| ≤ 1`.
pub fn hausdorff_to_disk(a: &PointCloud, pitch: f64) -> Result<DistanceEstimate> {
    a.ensure_non_empty()?;
    if !(pitch > 0.0) {
        return Err(Error::InvalidArgument(format!("disk lattice pitch must be positive, got {pitch}")));
    }
    let outside = a.points().par_iter().map(|z| (z.norm() - 1.0).max(0.0)).reduce(|| 0.0, f64::max);
    let index = NearestIndex::new(a)?;
    let k = (1.0 / pitch).floor() as i64;
    let lattice: Vec<Complex64> = (-k..=k)
        .flat_map(|j| (-k..=k).map(move |i| Complex64::new(i as f64 * pitch, j as f64 * pitch)))
        .filter(|w| w.norm() <= 1.0)
        .collect();
    let covering = max_min_distance(&lattice, &index);
    Ok(DistanceEstimate {
        value: outside.max(covering),
        error_bound: pitch / SQRT_2 + a.spacing(),
    })
}

/// `d_H(A, e^{2πi/n}·A)`.
pub fn rotation_symmetry_defect(a: &PointCloud, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    a.ensure_non_empty()?;
    hausdorff(a, &a.rotated(1.0 / n as f64))
}
