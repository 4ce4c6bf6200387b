//! Theorem-level experiments: the partition of degrees by the modulus of
//! the second critical iterate, star tables, convergence sweeps measured
//! in the Hausdorff metric, and equidistribution statistics.
//!
//! Degrees are labelled by outcome. `to_disk` holds the `n` with
//! `r_n < 1 - ε` (connected `K`, limit the closed disk) and `to_circle`
//! the `n` with `r_n > 1 + ε` (Cantor `K`, limit the circle).

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use crate::dynamics::{second_iterate_modulus, tight_escape_radius, Angle, RealAngle, UnitCircleParam};
use crate::error::{Error, Result};
use crate::exact_angle::{
    classify_exact, in_exceptional_family, trichotomy, ExceptionalWitness, RationalAngle, Tag, Trichotomy,
};
use crate::geometry::{hausdorff_to_circle, hausdorff_to_disk};
use crate::raster::{boundary_extract, filled_julia_grid, footprint_julia_grid, RasterMode, Window};

/// Largest denominator for which a full period is enumerated.
pub const MAX_PERIOD_SCAN: u64 = 10_000_000;

fn check_range(range: &RangeInclusive<u64>) -> Result<()> {
    if range.is_empty() || *range.start() < 2 {
        return Err(Error::InvalidArgument(format!(
            "degree range {}..{} must be non-empty and start at 2 or above",
            range.start(),
            range.end()
        )));
    }
    Ok(())
}

/// Exact `r_n` from the exact fractional part `f = θ(n-1) mod 1`.
fn exact_modulus(theta: RationalAngle, n: u64) -> f64 {
    second_iterate_modulus(&Angle::Rational(theta), n)
}

/// Coarse trichotomy of `n` for the angle `θ`.
fn coarse(theta: RationalAngle, n: u64) -> Trichotomy {
    trichotomy(theta.rotate(n - 1))
}

fn check_period_size(theta: RationalAngle) -> Result<()> {
    if theta.denominator() > MAX_PERIOD_SCAN {
        return Err(Error::InvalidArgument(format!(
            "denominator {} is too large to scan a full period (limit {MAX_PERIOD_SCAN})",
            theta.denominator()
        )));
    }
    Ok(())
}

/// `min |r_n - 1|` over one period of `n`, ignoring on-circle degrees.
/// Infinite when every degree is on the circle.
pub fn minimum_gap(theta: RationalAngle) -> Result<f64> {
    check_period_size(theta)?;
    let b = theta.denominator();
    let mut gap = f64::INFINITY;
    for m in 0..b {
        let f = theta.rotate(m);
        if trichotomy(f) != Trichotomy::OnCircle {
            gap = gap.min((exact_modulus(theta, m + 1) - 1.0).abs());
        }
    }
    Ok(gap)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    pub epsilon: f64,
    /// Degrees with `r_n < 1 - ε`.
    pub to_disk: Vec<u64>,
    /// Degrees with `r_n > 1 + ε`.
    pub to_circle: Vec<u64>,
    /// Degrees with `r_n = 1` exactly.
    pub boundary: Vec<u64>,
    pub n_start: u64,
    pub n_end: u64,
    /// Set when `θ` is one of the exceptional angles excluded by the theorem.
    pub exceptional: Option<ExceptionalWitness>,
}

/// Splits `n_range` into the `to_disk` / `to_circle` / `boundary` parts.
///
/// `epsilon` defaults to half the minimum gap `min |r_n - 1|` over one
/// period; an explicit value must lie strictly below that gap.
pub fn partition_subsequences(
    theta: RationalAngle,
    n_range: RangeInclusive<u64>,
    epsilon: Option<f64>,
) -> Result<PartitionReport> {
    check_range(&n_range)?;
    let exceptional = in_exceptional_family(theta);
    let gap = minimum_gap(theta)?;
    let epsilon = match epsilon {
        Some(e) if !(e > 0.0) => return Err(Error::InvalidArgument(format!("epsilon must be positive, got {e}"))),
        Some(e) if e >= gap => return Err(Error::EpsilonTooLarge { epsilon: e, gap }),
        Some(e) => e,
        None if gap.is_finite() => 0.5 * gap,
        None => 0.5,
    };
    let mut report = PartitionReport {
        epsilon,
        to_disk: Vec::new(),
        to_circle: Vec::new(),
        boundary: Vec::new(),
        n_start: *n_range.start(),
        n_end: *n_range.end(),
        exceptional,
    };
    for n in n_range {
        if coarse(theta, n) == Trichotomy::OnCircle {
            report.boundary.push(n);
            continue;
        }
        let r = exact_modulus(theta, n);
        if r < 1.0 - epsilon {
            report.to_disk.push(n);
        } else if r > 1.0 + epsilon {
            report.to_circle.push(n);
        } else {
            return Err(Error::EpsilonTooLarge { epsilon, gap });
        }
    }
    Ok(report)
}

/// Connected / disconnected / on-circle symbols for `θ = p/(2q)`, rows
/// indexed by `n` and columns by `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarTable {
    pub q: u64,
    pub ps: Vec<u64>,
    pub ns: Vec<u64>,
    /// `cells[row][col]` for `n = ns[row]`, `p = ps[col]`.
    pub cells: Vec<Vec<Tag>>,
}

impl StarTable {
    pub fn get(&self, n: u64, p: u64) -> Option<Tag> {
        let row = self.ns.iter().position(|&x| x == n)?;
        let col = self.ps.iter().position(|&x| x == p)?;
        Some(self.cells[row][col])
    }

    /// Plain-text layout: a header row of `p` values, then one row per `n`.
    pub fn to_text(&self) -> String {
        let width = self.ps.iter().map(|p| p.to_string().len()).max().unwrap_or(1);
        let label = self.ns.iter().map(|n| n.to_string().len()).max().unwrap_or(1).max(3);
        let mut out = String::new();
        let _ = write!(out, "{:>label$} |", "n\\p");
        for p in &self.ps {
            let _ = write!(out, " {p:>width$}");
        }
        out.push('\n');
        for (n, row) in self.ns.iter().zip(&self.cells) {
            let _ = write!(out, "{n:>label$} |");
            for tag in row {
                let _ = write!(out, " {:>width$}", tag.symbol());
            }
            out.push('\n');
        }
        out
    }

    /// CSV with header `n,<p values>` and one symbol per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for p in &self.ps {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
        for (n, row) in self.ns.iter().zip(&self.cells) {
            let _ = write!(out, "{n}");
            for tag in row {
                let _ = write!(out, ",{}", tag.symbol());
            }
            out.push('\n');
        }
        out
    }
}

/// Classifies `θ = p/(2q)` exactly for every `p` and `n` in range.
pub fn star_table(q: u64, p_range: RangeInclusive<u64>, n_range: RangeInclusive<u64>) -> Result<StarTable> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    check_range(&n_range)?;
    let two_q = q
        .checked_mul(2)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| Error::InvalidArgument(format!("q = {q} is too large")))?;
    let ps: Vec<u64> = p_range.collect();
    let ns: Vec<u64> = n_range.collect();
    let thetas = ps
        .iter()
        .map(|&p| {
            let p = i64::try_from(p).map_err(|_| Error::InvalidArgument(format!("p = {p} is too large")))?;
            RationalAngle::new(p, two_q)
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = ns
        .iter()
        .map(|&n| thetas.iter().map(|&t| classify_exact(t, n).map(|c| c.tag)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(StarTable { q, ps, ns, cells })
}

/// Raster settings for convergence sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterParams {
    pub resolution: usize,
    pub half_width: f64,
    pub max_iter: u32,
    pub circle_samples: usize,
}

impl Default for RasterParams {
    fn default() -> Self {
        RasterParams { resolution: 512, half_width: 1.6, max_iter: 1_000, circle_samples: 4096 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub classification: Tag,
    pub r_n: f64,
    pub dist_to_circle: f64,
    pub dist_to_disk: f64,
    /// `θ = 0` or an exceptional angle: the theorem makes no claim.
    pub excluded_by_theorem: bool,
    /// Footprint mode is used when pixel centers show no interior.
    pub mode: RasterMode,
}

/// Rasterizes `K(P_{n,c})` for each `n` and measures the filled set against
/// the closed disk and its boundary against the circle. Rows are sorted by `n`.
pub fn convergence_sweep(theta: RationalAngle, n_list: &[u64], params: &RasterParams) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty degree list".into()));
    }
    let window = Window::square(params.half_width, params.resolution)?;
    let param = UnitCircleParam::rational(theta);
    let c = param.c();
    let excluded_by_theorem = theta.is_zero() || in_exceptional_family(theta).is_some();
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let classification = classify_exact(theta, n)?.tag;
        let radius = tight_escape_radius(n, c.norm());
        let mut grid = filled_julia_grid(n, c, &window, params.max_iter, radius)?;
        if !grid.has_interior() {
            grid = footprint_julia_grid(n, c, &window, params.max_iter)?;
        }
        let julia = boundary_extract(&grid)?;
        let filled = grid.bounded_points();
        rows.push(SweepRow {
            n,
            classification,
            r_n: exact_modulus(theta, n),
            dist_to_circle: hausdorff_to_circle(&julia, params.circle_samples)?.value,
            dist_to_disk: hausdorff_to_disk(&filled, window.pitch())?.value,
            excluded_by_theorem,
            mode: grid.mode(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquidistStats {
    pub samples: u64,
    /// Fraction of `n ≤ N` with `θ(n-1) mod 1 ∈ (1/3, 2/3)`.
    pub connected_fraction: f64,
    /// Kolmogorov–Smirnov distance between the empirical law of
    /// `cos(2π θ(n-1))` and the arcsine law `1 - arccos(x)/π`.
    pub sup_cdf_gap: f64,
    /// A convergent `p/q` with `q ≤ √N` and `|θ - p/q|·N ≤ 1/(2q)`, i.e.
    /// `θ` is indistinguishable from a rational at this sample size.
    pub rational_like: Option<(u64, u64)>,
    /// Bound on the error of each reduced angle `θ(n-1) mod 1`.
    pub reduction_error: f64,
}

/// Convergents `p/q` of `x ∈ [0, 1)` with `q ≤ q_max`.
fn convergents(x: f64, q_max: u64) -> Vec<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut rest = x;
    let mut out = Vec::new();
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let (p2, q2) = match (a.checked_mul(p1).and_then(|v| v.checked_add(p0)), a.checked_mul(q1).and_then(|v| v.checked_add(q0))) {
            (Some(p), Some(q)) => (p, q),
            _ => break,
        };
        if q2 > q_max {
            break;
        }
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - rest.floor();
        if frac < 1e-12 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}

/// Statistics of `f_n = θ(n-1) mod 1` for `n = 1..=N`.
pub fn equidistribution_stats(theta: &RealAngle, n_max: u64) -> Result<EquidistStats> {
    if n_max < 1_000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 samples, got {n_max}")));
    }
    let mut xs = Vec::with_capacity(n_max as usize);
    let mut connected = 0u64;
    for n in 1..=n_max {
        let f = theta.rotate(n - 1);
        if 3.0 * f > 1.0 && 3.0 * f < 2.0 {
            connected += 1;
        }
        xs.push((std::f64::consts::TAU * f).cos());
    }
    xs.sort_unstable_by(f64::total_cmp);
    let total = n_max as f64;
    let arcsine = |x: f64| 1.0 - x.clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
    let sup_cdf_gap = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = arcsine(x);
            (i as f64 / total - f).abs().max(((i + 1) as f64 / total - f).abs())
        })
        .fold(0.0, f64::max);

    let q_max = (total.sqrt()).floor() as u64;
    let value = theta.value();
    let rational_like = convergents(value, q_max)
        .into_iter()
        .find(|&(p, q)| (value - p as f64 / q as f64).abs() * total <= 0.5 / q as f64);

    Ok(EquidistStats {
        samples: n_max,
        connected_fraction: connected as f64 / total,
        sup_cdf_gap,
        rational_like,
        reduction_error: total * 2f64.powi(-104) + f64::EPSILON,
    })
}

/// Minimal period of `n ↦` (connected, disconnected, on-circle) for a
/// rational angle. It always divides the denominator of `θ`.
pub fn period_of_classification(theta: RationalAngle) -> Result<u64> {
    if theta.is_zero() {
        return Err(Error::ZeroAngle);
    }
    check_period_size(theta)?;
    let b = theta.denominator();
    let pattern: Vec<Trichotomy> = (0..b).map(|m| trichotomy(theta.rotate(m))).collect();
    let mut divisors: Vec<u64> = (1..=b).take_while(|d| d * d <= b).filter(|&d| b.is_multiple_of(d)).collect();
    let large: Vec<u64> = divisors.iter().rev().map(|d| b / d).collect();
    divisors.extend(large);
    divisors.sort_unstable();
    divisors.dedup();
    let period = divisors
        .into_iter()
        .find(|&d| (0..b as usize).all(|m| pattern[m] == pattern[(m + d as usize) % b as usize]))
        .unwrap_or(b);
    Ok(period)
}

/// A connected and a disconnected degree within one period starting at
/// `n_start`, if both occur.
pub fn oscillation_witness(theta: RationalAngle, n_start: u64) -> Result<Option<(u64, u64)>> {
    let period = period_of_classification(theta)?;
    let n_start = n_start.max(2);
    let window = n_start..n_start + period;
    let connected = window.clone().find(|&n| coarse(theta, n) == Trichotomy::Inside);
    let disconnected = window.clone().find(|&n| coarse(theta, n) == Trichotomy::Outside);
    Ok(connected.zip(disconnected))
}
