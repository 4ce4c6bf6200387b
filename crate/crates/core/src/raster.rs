//! Escape-time rasters of filled Julia sets, boundary extraction, and
//! Multibrot slices in logarithmic coordinates.
//!
//! Pixel `(i, j)` has column `i` counted from `re_min` and row `j` counted
//! from the top (`im_max`); it is represented by the center of its cell.
//! Grids are stored row-major, top row first.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{self, default_escape_radius, iterate_point, pow, tight_escape_radius, unit_vector};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Iteration budget for rasters.
pub const DEFAULT_RASTER_MAX_ITER: u32 = 1_000;

/// Half-width of the default square window `[-1.6, 1.6]²`.
pub const DEFAULT_HALF_WIDTH: f64 = 1.6;

/// A rectangle in the plane sampled by `width × height` pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    width: usize,
    height: usize,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, width: usize, height: usize) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidWindow("bounds must be finite".into()));
        }
        if !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidWindow(format!(
                "need re_min < re_max and im_min < im_max, got [{re_min}, {re_max}] × [{im_min}, {im_max}]"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidWindow(format!("resolution must be positive, got {width}×{height}")));
        }
        if width.checked_mul(height).is_none_or(|p| p > u32::MAX as usize) {
            return Err(Error::InvalidWindow(format!("resolution {width}×{height} is too large")));
        }
        Ok(Window { re_min, re_max, im_min, im_max, width, height })
    }

    /// `[-h, h]²` at `resolution × resolution`.
    pub fn square(half_width: f64, resolution: usize) -> Result<Self> {
        Window::new(-half_width, half_width, -half_width, half_width, resolution, resolution)
    }

    /// The default `[-1.6, 1.6]²` window.
    pub fn default_square(resolution: usize) -> Result<Self> {
        Window::square(DEFAULT_HALF_WIDTH, resolution)
    }

    pub fn re_min(&self) -> f64 {
        self.re_min
    }

    pub fn re_max(&self) -> f64 {
        self.re_max
    }

    pub fn im_min(&self) -> f64 {
        self.im_min
    }

    pub fn im_max(&self) -> f64 {
        self.im_max
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn pitch_re(&self) -> f64 {
        (self.re_max - self.re_min) / self.width as f64
    }

    pub fn pitch_im(&self) -> f64 {
        (self.im_max - self.im_min) / self.height as f64
    }

    /// The larger of the two pixel side lengths.
    pub fn pitch(&self) -> f64 {
        self.pitch_re().max(self.pitch_im())
    }

    pub fn pixel_diagonal(&self) -> f64 {
        self.pitch_re().hypot(self.pitch_im())
    }

    /// Center of pixel `(i, j)`, measured from the window midpoint so that
    /// symmetric windows give exactly symmetric centers.
    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        let mid_re = 0.5 * (self.re_min + self.re_max);
        let mid_im = 0.5 * (self.im_min + self.im_max);
        let x = mid_re + (i as f64 + 0.5 - 0.5 * self.width as f64) * self.pitch_re();
        let y = mid_im - (j as f64 + 0.5 - 0.5 * self.height as f64) * self.pitch_im();
        Complex64::new(x, y)
    }

    /// The pixel whose cell contains `z`, if any.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let i = ((z.re - self.re_min) / self.pitch_re()).floor();
        let j = ((self.im_max - z.im) / self.pitch_im()).floor();
        let inside = (0.0..self.width as f64).contains(&i) && (0.0..self.height as f64).contains(&j);
        inside.then_some((i as usize, j as usize))
    }
}

/// How pixels were tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RasterMode {
    /// The orbit of the pixel center.
    Center,
    /// The orbit of a disk covering the pixel, propagated to first order.
    Footprint,
}

/// Per-pixel escape data. `bounded[k]` holds exactly when
/// `iterations[k] == max_iter`; escaped pixels store the number of map
/// applications they survived.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterGrid {
    window: Window,
    max_iter: u32,
    mode: RasterMode,
    bounded: Vec<bool>,
    iterations: Vec<u32>,
}

impl RasterGrid {
    /// Builds a grid from a bounded mask, e.g. for synthetic tests.
    pub fn from_mask(window: Window, max_iter: u32, bounded: Vec<bool>) -> Result<Self> {
        if bounded.len() != window.pixel_count() {
            return Err(Error::InvalidArgument(format!(
                "mask has {} entries for a {}×{} window",
                bounded.len(),
                window.width(),
                window.height()
            )));
        }
        let iterations = bounded.iter().map(|&b| if b { max_iter } else { 0 }).collect();
        Ok(RasterGrid { window, max_iter: max_iter.max(1), mode: RasterMode::Center, bounded, iterations })
    }

    fn from_rows(window: Window, max_iter: u32, mode: RasterMode, rows: Vec<Vec<u32>>) -> Self {
        let iterations: Vec<u32> = rows.into_iter().flatten().collect();
        let bounded = iterations.iter().map(|&k| k == max_iter).collect();
        RasterGrid { window, max_iter, mode, bounded, iterations }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn max_iter(&self) -> u32 {
        self.max_iter
    }

    pub fn mode(&self) -> RasterMode {
        self.mode
    }

    pub fn bounded(&self) -> &[bool] {
        &self.bounded
    }

    pub fn iterations(&self) -> &[u32] {
        &self.iterations
    }

    pub fn is_bounded(&self, i: usize, j: usize) -> bool {
        self.bounded[j * self.window.width() + i]
    }

    pub fn bounded_count(&self) -> usize {
        self.bounded.iter().filter(|&&b| b).count()
    }

    /// Whether pixel `(i, j)` is bounded together with its four neighbours.
    /// Neighbours outside the window count as unbounded.
    fn is_interior(&self, i: usize, j: usize) -> bool {
        let (w, h) = (self.window.width(), self.window.height());
        self.is_bounded(i, j)
            && i > 0
            && j > 0
            && i + 1 < w
            && j + 1 < h
            && self.is_bounded(i - 1, j)
            && self.is_bounded(i + 1, j)
            && self.is_bounded(i, j - 1)
            && self.is_bounded(i, j + 1)
    }

    /// Number of bounded pixels whose four neighbours are all bounded.
    pub fn interior_count(&self) -> usize {
        let (w, h) = (self.window.width(), self.window.height());
        (0..h).map(|j| (0..w).filter(|&i| self.is_interior(i, j)).count()).sum()
    }

    pub fn has_interior(&self) -> bool {
        let (w, h) = (self.window.width(), self.window.height());
        (0..h).any(|j| (0..w).any(|i| self.is_interior(i, j)))
    }

    /// Centers of all bounded pixels, spacing set to the pixel pitch.
    pub fn bounded_points(&self) -> PointCloud {
        let w = self.window.width();
        let points = self
            .bounded
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| self.window.pixel_center(k % w, k / w))
            .collect();
        PointCloud::new(points, self.window.pitch())
    }
}

fn rasterize<F>(window: &Window, f: F) -> Vec<Vec<u32>>
where
    F: Fn(Complex64) -> u32 + Sync,
{
    (0..window.height())
        .into_par_iter()
        .map(|j| (0..window.width()).map(|i| f(window.pixel_center(i, j))).collect())
        .collect()
}

/// Escape-time raster of `K(P_{n,c})`: each pixel center `z0` is iterated
/// under `z ↦ z^n + c` for up to `max_iter` steps.
pub fn filled_julia_grid(n: u64, c: Complex64, window: &Window, max_iter: u32, escape_radius: f64) -> Result<RasterGrid> {
    dynamics::check_degree(n)?;
    dynamics::check_radius(n, c, escape_radius)?;
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let rows = rasterize(window, |z0| iterate_point(z0, n, c, max_iter, escape_radius).survived());
    Ok(RasterGrid::from_rows(*window, max_iter, RasterMode::Center, rows))
}

/// Subdivision depth for ambiguous footprints.
pub const FOOTPRINT_MAX_DEPTH: u32 = 3;

struct Footprint {
    n: u64,
    c: Complex64,
    max_iter: u32,
    radius: f64,
    max_depth: u32,
}

impl Footprint {
    /// Survived count of the cell with center `z0` and half-sides `hx`, `hy`.
    ///
    /// The cell is replaced by the disk of radius `rho = |(hx, hy)|` around
    /// its center, and the image disk after `k` steps has radius
    /// `rho·|(P^k)'(z0)|`. The cell escapes once that disk lies outside the
    /// escape radius. Once the disk swallows the whole escape disk the
    /// first-order picture is no longer informative, and the cell is split
    /// into four quarters. A cell that is still ambiguous at the maximum
    /// depth is kept as bounded.
    fn cell(&self, z0: Complex64, hx: f64, hy: f64, depth: u32) -> u32 {
        let rho = hx.hypot(hy);
        let mut z = z0;
        let mut derivative = 1.0f64;
        for k in 0..=self.max_iter {
            let m = z.norm();
            if !m.is_finite() {
                return k.saturating_sub(1);
            }
            let spread = rho * derivative;
            if m - spread > self.radius {
                return k.saturating_sub(1);
            }
            if spread >= m + self.radius {
                return self.split(z0, hx, hy, depth);
            }
            if k == self.max_iter {
                break;
            }
            let zn1 = pow(z, self.n - 1);
            derivative *= self.n as f64 * zn1.norm();
            z = zn1 * z + self.c;
        }
        self.max_iter
    }

    fn split(&self, z0: Complex64, hx: f64, hy: f64, depth: u32) -> u32 {
        if depth >= self.max_depth {
            return self.max_iter;
        }
        let (qx, qy) = (0.5 * hx, 0.5 * hy);
        let mut best = 0;
        for (sx, sy) in [(-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            let child = z0 + Complex64::new(sx * qx, sy * qy);
            best = best.max(self.cell(child, qx, qy, depth + 1));
            if best == self.max_iter {
                break;
            }
        }
        best
    }
}

/// Raster of `K(P_{n,c})` in which a pixel counts as bounded unless its
/// whole footprint leaves the tight escape disk.
///
/// Pixel-center sampling misses totally disconnected Julia sets entirely
/// at moderate resolution, because the dust is much finer than a pixel.
/// This mode keeps the pixels that meet `K` to first order.
pub fn footprint_julia_grid(n: u64, c: Complex64, window: &Window, max_iter: u32) -> Result<RasterGrid> {
    dynamics::check_degree(n)?;
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let footprint = Footprint {
        n,
        c,
        max_iter,
        radius: tight_escape_radius(n, c.norm()),
        max_depth: FOOTPRINT_MAX_DEPTH,
    };
    let (hx, hy) = (0.5 * window.pitch_re(), 0.5 * window.pitch_im());
    let rows = rasterize(window, |z0| footprint.cell(z0, hx, hy, 0));
    Ok(RasterGrid::from_rows(*window, max_iter, RasterMode::Footprint, rows))
}

/// Mask of the pixels that approximate `J = ∂K`: bounded pixels with at
/// least one unbounded 4-neighbour. When no bounded pixel has four bounded
/// neighbours the set has empty interior at this resolution, `K = J`, and
/// every bounded pixel is kept. Footprint grids are only built for sets
/// without interior, so they keep every bounded pixel as well.
pub fn boundary_mask(grid: &RasterGrid) -> Result<Vec<bool>> {
    if grid.bounded_count() == 0 {
        return Err(Error::NoJuliaPixels);
    }
    if grid.mode() == RasterMode::Footprint || !grid.has_interior() {
        return Ok(grid.bounded().to_vec());
    }
    let (w, h) = (grid.window().width(), grid.window().height());
    Ok((0..h)
        .flat_map(|j| (0..w).map(move |i| (i, j)))
        .map(|(i, j)| grid.is_bounded(i, j) && !grid.is_interior(i, j))
        .collect())
}

/// Centers of the pixels selected by [`boundary_mask`].
pub fn boundary_extract(grid: &RasterGrid) -> Result<PointCloud> {
    let mask = boundary_mask(grid)?;
    let window = grid.window();
    let w = window.width();
    let points = mask
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| window.pixel_center(k % w, k / w))
        .collect();
    Ok(PointCloud::new(points, window.pitch()))
}

/// The default θ window for Multibrot slices: `Re θ ∈ [-1, 1]`,
/// `Im θ ∈ [-0.15, 0.15]`.
pub fn default_multibrot_window(width: usize, height: usize) -> Result<Window> {
    Window::new(-1.0, 1.0, -0.15, 0.15, width, height)
}

/// `c = e^{2πiθ}` for complex `θ`, so `|c| = e^{-2π Im θ}`.
pub fn log_coordinate(theta: Complex64) -> Complex64 {
    (-std::f64::consts::TAU * theta.im).exp() * unit_vector(theta.re)
}

/// Membership grid of the Multibrot set `M_n` in logarithmic coordinates:
/// pixel `θ` is bounded when the orbit of 0 under `z^n + e^{2πiθ}` stays
/// within `max(2, |c| + 1)` for `max_iter` steps.
pub fn multibrot_log_slice(n: u64, theta_window: &Window, max_iter: u32) -> Result<RasterGrid> {
    dynamics::check_degree(n)?;
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let rows = rasterize(theta_window, |theta| {
        let c = log_coordinate(theta);
        iterate_point(Complex64::new(0.0, 0.0), n, c, max_iter, default_escape_radius(c)).survived()
    });
    Ok(RasterGrid::from_rows(*theta_window, max_iter, RasterMode::Center, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_validation() {
        assert!(Window::new(1.0, -1.0, -1.0, 1.0, 4, 4).is_err());
        assert!(Window::new(-1.0, 1.0, 1.0, 1.0, 4, 4).is_err());
        assert!(Window::new(-1.0, 1.0, -1.0, 1.0, 0, 4).is_err());
        assert!(Window::new(f64::NAN, 1.0, -1.0, 1.0, 4, 4).is_err());
        assert!(Window::new(-1.0, 1.0, -1.0, 1.0, 4, 4).is_ok());
    }

    #[test]
    fn pixel_centers() {
        let w = Window::new(0.0, 4.0, 0.0, 2.0, 4, 2).unwrap();
        assert_eq!(w.pixel_center(0, 0), Complex64::new(0.5, 1.5));
        assert_eq!(w.pixel_center(3, 1), Complex64::new(3.5, 0.5));
        assert_eq!(w.pixel_of(Complex64::new(3.9, 0.1)), Some((3, 1)));
        assert_eq!(w.pixel_of(Complex64::new(0.1, 1.9)), Some((0, 0)));
        assert_eq!(w.pixel_of(Complex64::new(4.1, 1.0)), None);
        assert!((w.pixel_diagonal() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn disk_raster_is_symmetric() {
        let window = Window::default_square(64).unwrap();
        let grid = filled_julia_grid(2, Complex64::new(0.0, 0.0), &window, 500, 2.0).unwrap();
        for j in 0..64 {
            for i in 0..64 {
                assert_eq!(grid.is_bounded(i, j), grid.is_bounded(63 - i, 63 - j));
                let z = window.pixel_center(i, j);
                let expected = z.norm() <= 1.0;
                if (z.norm() - 1.0).abs() > 1e-9 {
                    assert_eq!(grid.is_bounded(i, j), expected, "pixel {z}");
                }
            }
        }
        for (&b, &k) in grid.bounded().iter().zip(grid.iterations()) {
            assert_eq!(b, k == 500);
        }
    }

    #[test]
    fn basilica_contains_its_cycle() {
        let window = Window::default_square(65).unwrap();
        let grid = filled_julia_grid(2, Complex64::new(-1.0, 0.0), &window, 500, 2.0).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)] {
            let (i, j) = window.pixel_of(z).unwrap();
            assert!(grid.is_bounded(i, j));
        }
    }

    #[test]
    fn unsafe_radius_is_rejected() {
        let window = Window::default_square(8).unwrap();
        let c = unit_vector(0.4);
        assert!(matches!(filled_julia_grid(26, c, &window, 100, 1.0), Err(Error::UnsafeEscapeRadius { .. })));
        assert!(matches!(filled_julia_grid(1, c, &window, 100, 3.0), Err(Error::DegreeTooSmall(1))));
    }

    #[test]
    fn dust_has_no_interior() {
        let window = Window::default_square(256).unwrap();
        let c = unit_vector(0.4);
        let grid = filled_julia_grid(26, c, &window, 1000, default_escape_radius(c)).unwrap();
        let disk_pixels = std::f64::consts::PI / (window.pitch() * window.pitch());
        assert!((grid.interior_count() as f64) < 0.01 * disk_pixels);

        let dust = footprint_julia_grid(26, c, &window, 1000).unwrap();
        assert!(dust.bounded_count() > 0);
        let cloud = boundary_extract(&dust).unwrap();
        assert_eq!(cloud.len(), dust.bounded_count());
    }

    #[test]
    fn footprint_contains_center_raster() {
        let window = Window::default_square(96).unwrap();
        let c = unit_vector(0.4);
        for n in [5u64, 25, 27] {
            let radius = tight_escape_radius(n, 1.0);
            let centers = filled_julia_grid(n, c, &window, 300, radius).unwrap();
            let footprint = footprint_julia_grid(n, c, &window, 300).unwrap();
            for (k, &b) in centers.bounded().iter().enumerate() {
                if b {
                    assert!(footprint.bounded()[k], "n={n} pixel {k}");
                }
            }
        }
    }

    #[test]
    fn single_pixel_boundary() {
        let window = Window::new(0.0, 3.0, 0.0, 3.0, 3, 3).unwrap();
        let mut mask = vec![false; 9];
        mask[4] = true;
        let grid = RasterGrid::from_mask(window, 10, mask).unwrap();
        let cloud = boundary_extract(&grid).unwrap();
        assert_eq!(cloud.points(), &[Complex64::new(1.5, 1.5)]);

        let empty = RasterGrid::from_mask(window, 10, vec![false; 9]).unwrap();
        assert!(matches!(boundary_extract(&empty), Err(Error::NoJuliaPixels)));
    }

    #[test]
    fn disk_boundary_is_near_circle() {
        let window = Window::default_square(128).unwrap();
        let grid = filled_julia_grid(2, Complex64::new(0.0, 0.0), &window, 500, 2.0).unwrap();
        let cloud = boundary_extract(&grid).unwrap();
        let d = crate::geometry::hausdorff_to_circle(&cloud, 4096).unwrap();
        assert!(d.value <= 2.0 * window.pixel_diagonal());
    }

    #[test]
    fn multibrot_examples() {
        let c = log_coordinate(Complex64::new(0.25, 0.0));
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let window = Window::new(0.2, 0.3, -0.01, 0.01, 1, 1).unwrap();
        let grid = multibrot_log_slice(2, &window, 1000).unwrap();
        assert!(grid.is_bounded(0, 0));

        // Negative imaginary part gives |c| = e^{2πt}, far outside M_2.
        let window = Window::new(-0.01, 0.01, -1.01, -0.99, 1, 1).unwrap();
        assert!(!multibrot_log_slice(2, &window, 1000).unwrap().is_bounded(0, 0));
        // Positive imaginary part gives a tiny |c|, inside M_2.
        let window = Window::new(-0.01, 0.01, 0.99, 1.01, 1, 1).unwrap();
        assert!(multibrot_log_slice(2, &window, 1000).unwrap().is_bounded(0, 0));
    }

    #[test]
    fn multibrot_mirror_symmetry() {
        let window = default_multibrot_window(128, 32).unwrap();
        let grid = multibrot_log_slice(10, &window, 300).unwrap();
        for j in 0..32 {
            for i in 0..128 {
                assert_eq!(grid.is_bounded(i, j), grid.is_bounded(127 - i, j));
            }
        }
    }

    #[test]
    fn containment_and_annulus() {
        let window = Window::default_square(200).unwrap();
        let diag = window.pixel_diagonal();
        for (theta, n) in [(0.4, 50u64), (0.4, 51), (0.4, 53), (0.3, 60), (0.3, 61)] {
            let c = unit_vector(theta);
            let grid = filled_julia_grid(n, c, &window, 1000, default_escape_radius(c)).unwrap();
            let disconnected = (unit_vector(theta * n as f64) + c).norm() > 1.0;
            for z in grid.bounded_points().points() {
                assert!(z.norm() <= 1.05 + diag, "theta={theta} n={n} z={z}");
                if disconnected {
                    assert!((z.norm() - 1.0).abs() <= 0.1, "theta={theta} n={n} z={z}");
                }
            }
            let footprint = footprint_julia_grid(n, c, &window, 1000).unwrap();
            for z in footprint.bounded_points().points() {
                assert!(z.norm() <= 1.05 + diag, "theta={theta} n={n} z={z}");
            }
        }
        // The footprint over-approximates K, so the annulus is checked on it
        // only for degrees large enough that the dust hugs the circle.
        for n in [101u64, 151] {
            let grid = footprint_julia_grid(n, unit_vector(0.4), &window, 1000).unwrap();
            assert!(grid.bounded_count() > 0);
            for z in grid.bounded_points().points() {
                assert!((z.norm() - 1.0).abs() <= 0.1, "n={n} z={z}");
            }
        }
    }

    #[test]
    fn rasters_are_deterministic() {
        let window = Window::default_square(80).unwrap();
        let c = unit_vector(0.4);
        let a = filled_julia_grid(27, c, &window, 200, 2.0).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| filled_julia_grid(27, c, &window, 200, 2.0).unwrap());
        assert_eq!(a, b);
    }
}
