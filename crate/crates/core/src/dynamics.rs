//! Floating point iteration of `P_{n,c}(z) = z^n + c`.
//!
//! Powers are taken by binary exponentiation. For parameters on the unit
//! circle the angle of `c^n` is reduced exactly (rational angles) or in
//! double-double arithmetic (real angles) before any trigonometry, so
//! `|c^n + c|` stays accurate for `n` in the millions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact_angle::RationalAngle;

/// Iteration budget for classification tables.
pub const DEFAULT_MAX_ITER: u32 = 10_000;

/// `z^n` by repeated squaring.
pub fn pow(mut z: Complex64, mut n: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= z;
        }
        n >>= 1;
        if n > 0 {
            z *= z;
        }
    }
    acc
}

#[inline]
pub fn eval_map(z: Complex64, n: u64, c: Complex64) -> Complex64 {
    pow(z, n) + c
}

/// `max(2, |c| + 1)`: beyond this radius `|z^n + c| > |z|` for every `n ≥ 2`.
pub fn default_escape_radius(c: Complex64) -> f64 {
    f64::max(2.0, c.norm() + 1.0)
}

/// The root `r ≥ 1` of `r^n = r + |c|`, rounded up.
///
/// For `|z| > r` we get `|z^n + c| ≥ |z|^n - |c| > |z|` with the excess
/// growing at every step, so such orbits escape. This radius is much
/// tighter than [`default_escape_radius`] when `n` is large.
pub fn tight_escape_radius(n: u64, c_modulus: f64) -> f64 {
    let g = |r: f64| r.powf(n as f64) - r - c_modulus;
    let (mut lo, mut hi) = (1.0f64, f64::max(2.0, c_modulus + 1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi * (1.0 + 1e-12)
}

pub(crate) fn check_degree(n: u64) -> Result<()> {
    if n < 2 {
        Err(Error::DegreeTooSmall(n))
    } else {
        Ok(())
    }
}

pub(crate) fn check_radius(n: u64, c: Complex64, escape_radius: f64) -> Result<()> {
    let minimum = tight_escape_radius(n, c.norm());
    if !(escape_radius >= minimum * (1.0 - 1e-9)) {
        return Err(Error::UnsafeEscapeRadius { radius: escape_radius, minimum });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Angles

/// Double-double arithmetic, just enough for argument reduction.
mod dd {
    #[derive(Clone, Copy, Debug)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    impl Dd {
        pub fn from(x: f64) -> Dd {
            Dd { hi: x, lo: 0.0 }
        }

        pub fn add(self, o: Dd) -> Dd {
            let (s, e) = two_sum(self.hi, o.hi);
            quick_two_sum(s, e + self.lo + o.lo)
        }

        pub fn mul_f64(self, m: f64) -> Dd {
            let (p, e) = two_prod(self.hi, m);
            quick_two_sum(p, e + self.lo * m)
        }

        pub fn recip(self) -> Dd {
            let one = Dd::from(1.0);
            let q1 = 1.0 / self.hi;
            let r = one.add(self.mul_f64(-q1));
            let q2 = r.hi / self.hi;
            let r = r.add(self.mul_f64(-q2));
            let q3 = r.hi / self.hi;
            quick_two_sum(q1, q2).add(Dd::from(q3))
        }

        /// Fractional part in `[0, 1)`.
        pub fn fract(self) -> Dd {
            let mut x = self.add(Dd::from(-self.hi.floor()));
            while x.hi < 0.0 || (x.hi == 0.0 && x.lo < 0.0) {
                x = x.add(Dd::from(1.0));
            }
            while x.hi >= 1.0 {
                x = x.add(Dd::from(-1.0));
            }
            x
        }
    }
}

use dd::Dd;

/// A real angle in turns, stored as an unevaluated double-double sum in
/// `[0, 1)`. Used for irrational `θ`.
#[derive(Clone, Copy, Debug)]
pub struct RealAngle {
    hi: f64,
    lo: f64,
}

impl RealAngle {
    pub fn from_f64(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("angle {theta} is not finite")));
        }
        Ok(Self::from_dd(Dd::from(theta)))
    }

    fn from_dd(x: Dd) -> Self {
        let x = x.fract();
        RealAngle { hi: x.hi, lo: x.lo }
    }

    /// Fractional part of the continued fraction `[a0; a1, a2, ...]`,
    /// evaluated in double-double precision.
    pub fn from_continued_fraction(terms: &[u64]) -> Result<Self> {
        let (&last, rest) = terms
            .split_last()
            .ok_or_else(|| Error::InvalidArgument("empty continued fraction".into()))?;
        if terms[1..].contains(&0) {
            return Err(Error::InvalidArgument(
                "continued fraction terms after the first must be positive".into(),
            ));
        }
        let mut value = Dd::from(last as f64);
        for &a in rest.iter().rev() {
            value = Dd::from(a as f64).add(value.recip());
        }
        Ok(Self::from_dd(value))
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    /// `m·θ mod 1`, reduced in double-double before rounding to `f64`.
    /// Exact in the leading part for `m < 2^53`.
    pub fn rotate(&self, m: u64) -> f64 {
        let x = Dd { hi: self.hi, lo: self.lo }.mul_f64(m as f64).fract();
        let f = x.hi + x.lo;
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Angle {
    Rational(RationalAngle),
    Real(RealAngle),
}

impl Angle {
    /// `m·θ mod 1` as a float in `[0, 1)`.
    pub fn rotation(&self, m: u64) -> f64 {
        match self {
            Angle::Rational(t) => t.rotate(m).to_f64(),
            Angle::Real(t) => t.rotate(m),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Angle::Rational(t) => t.to_f64(),
            Angle::Real(t) => t.value(),
        }
    }

    pub fn as_rational(&self) -> Option<RationalAngle> {
        match self {
            Angle::Rational(t) => Some(*t),
            Angle::Real(_) => None,
        }
    }
}

impl From<RationalAngle> for Angle {
    fn from(t: RationalAngle) -> Self {
        Angle::Rational(t)
    }
}

impl From<RealAngle> for Angle {
    fn from(t: RealAngle) -> Self {
        Angle::Real(t)
    }
}

/// `e^{2πi·turns}`.
///
/// The angle is first reduced to `[-1/2, 1/2]`, symmetrically in the sign
/// of `turns`, and quarter turns are returned exactly.
pub fn unit_vector(turns: f64) -> Complex64 {
    let t = turns - turns.round();
    let quarters = 4.0 * t;
    if quarters == quarters.round() {
        return match quarters as i64 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            -1 => Complex64::new(0.0, -1.0),
            _ => Complex64::new(-1.0, 0.0),
        };
    }
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// A parameter `c = e^{2πiθ}` together with its angle.
#[derive(Clone, Copy, Debug)]
pub struct UnitCircleParam {
    angle: Angle,
    c: Complex64,
}

impl UnitCircleParam {
    pub fn new(angle: Angle) -> Self {
        UnitCircleParam { angle, c: unit_vector(angle.value()) }
    }

    pub fn rational(theta: RationalAngle) -> Self {
        Self::new(Angle::Rational(theta))
    }

    pub fn real(theta: RealAngle) -> Self {
        Self::new(Angle::Real(theta))
    }

    pub fn angle(&self) -> &Angle {
        &self.angle
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// `c^n`, with the angle `nθ` reduced before the trigonometry.
    pub fn power(&self, n: u64) -> Complex64 {
        unit_vector(self.angle.rotation(n))
    }

    /// `P_{n,c}(c) = c^n + c`.
    pub fn second_iterate(&self, n: u64) -> Complex64 {
        self.power(n) + self.c
    }
}

/// `2|cos(πf)| = √(2 + 2cos 2πf)`, exact at multiples of 1/6.
pub fn modulus_from_rotation(f: RationalAngle) -> f64 {
    let (a, b) = (f.numerator(), f.denominator());
    match (a, b) {
        (0, 1) => 2.0,
        (1, 2) => 0.0,
        (1, 3) | (2, 3) => 1.0,
        (1, 6) | (5, 6) => 3f64.sqrt(),
        _ => {
            // cos(πf) = sin(π(1/2 - f)), with 1/2 - f = (b - 2a) / 2b exact.
            let half_gap = (b as f64 - 2.0 * a as f64) / (2.0 * b as f64);
            2.0 * (PI * half_gap).sin().abs()
        }
    }
}

fn modulus_from_turns(f: f64) -> f64 {
    2.0 * (PI * (0.5 - f)).sin().abs()
}

/// `r_n = |c^n + c| = √(2 + 2cos(2πθ(n-1)))`.
pub fn second_iterate_modulus(theta: &Angle, n: u64) -> f64 {
    let m = n.saturating_sub(1);
    match theta {
        Angle::Rational(t) => modulus_from_rotation(t.rotate(m)),
        Angle::Real(t) => modulus_from_turns(t.rotate(m)),
    }
}

// ---------------------------------------------------------------------------
// Orbits

/// Outcome of iterating a single starting point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointOrbit {
    pub escaped: bool,
    /// Index `k` of the first iterate with `|z_k| > R`, or `max_iter`.
    pub iterations_used: u32,
    pub final_modulus: f64,
    pub non_finite: bool,
}

impl PointOrbit {
    /// Number of map applications whose result stayed inside the escape disk.
    pub fn survived(&self) -> u32 {
        if self.escaped {
            self.iterations_used.saturating_sub(1)
        } else {
            self.iterations_used
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitResult {
    pub escaped: bool,
    pub iterations_used: u32,
    pub final_modulus: f64,
    /// `|P²(0)| = |c^n + c|`.
    pub r_n: f64,
    pub non_finite: bool,
}

/// Brent-style exact-repeat detector: compares against a snapshot taken at
/// powers of two. A float orbit that repeats bitwise is periodic forever.
struct CycleCheck {
    saved: Complex64,
    next_save: u32,
}

impl CycleCheck {
    fn new(z: Complex64) -> Self {
        CycleCheck { saved: z, next_save: 1 }
    }

    #[inline]
    fn repeats(&mut self, k: u32, z: Complex64) -> bool {
        if z == self.saved {
            return true;
        }
        if k >= self.next_save {
            self.saved = z;
            self.next_save = self.next_save.saturating_mul(2);
        }
        false
    }
}

/// Iterates `z_{k+1} = z_k^n + c` from `z0`; no argument validation.
pub fn iterate_point(z0: Complex64, n: u64, c: Complex64, max_iter: u32, escape_radius: f64) -> PointOrbit {
    let r2 = escape_radius * escape_radius;
    if !(z0.re.is_finite() && z0.im.is_finite()) {
        return PointOrbit { escaped: true, iterations_used: 0, final_modulus: f64::INFINITY, non_finite: true };
    }
    if z0.norm_sqr() > r2 {
        return PointOrbit { escaped: true, iterations_used: 0, final_modulus: z0.norm(), non_finite: false };
    }
    let mut z = z0;
    let mut cycle = CycleCheck::new(z);
    for k in 1..=max_iter {
        z = eval_map(z, n, c);
        let m2 = z.norm_sqr();
        if !m2.is_finite() {
            return PointOrbit { escaped: true, iterations_used: k, final_modulus: f64::INFINITY, non_finite: true };
        }
        if m2 > r2 {
            return PointOrbit { escaped: true, iterations_used: k, final_modulus: m2.sqrt(), non_finite: false };
        }
        if cycle.repeats(k, z) {
            break;
        }
    }
    PointOrbit { escaped: false, iterations_used: max_iter, final_modulus: z.norm(), non_finite: false }
}

/// Iterates the critical orbit `0, c, c^n + c, ...` of `P_{n,c}` for an
/// arbitrary complex `c`.
pub fn orbit_bounded(c: Complex64, n: u64, max_iter: u32, escape_radius: f64) -> Result<OrbitResult> {
    check_degree(n)?;
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    check_radius(n, c, escape_radius)?;
    let orbit = iterate_point(Complex64::new(0.0, 0.0), n, c, max_iter, escape_radius);
    Ok(OrbitResult {
        escaped: orbit.escaped,
        iterations_used: orbit.iterations_used,
        final_modulus: orbit.final_modulus,
        r_n: eval_map(c, n, c).norm(),
        non_finite: orbit.non_finite,
    })
}

/// A point of the critical orbit. `exact_angle` is set while the orbit
/// provably sits on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitPoint {
    pub value: Complex64,
    pub exact_angle: Option<RationalAngle>,
}

#[derive(Clone, Copy, Debug)]
enum OrbitState {
    Start,
    OnCircle(RationalAngle),
    Free(Complex64),
}

/// The critical orbit `z_1 = c, z_2, z_3, ...` of `P_{n,c}` for `c` on the
/// unit circle.
///
/// For rational `θ` the orbit is followed exactly while it stays on `S¹`:
/// a point at angle `φ` maps to `e^{2πinφ} + c`, which lies on `S¹` iff
/// `nφ - θ ≡ ±1/3`, and then equals `e^{2πi(θ ± 1/6)}`. The fixed points on
/// `S¹` are repelling with multiplier `n`, so float iteration alone cannot
/// follow such orbits.
#[derive(Clone, Debug)]
pub struct CriticalOrbit {
    param: UnitCircleParam,
    n: u64,
    index: u64,
    state: OrbitState,
}

impl CriticalOrbit {
    pub fn new(param: UnitCircleParam, n: u64) -> Self {
        CriticalOrbit { param, n, index: 0, state: OrbitState::Start }
    }
}

impl Iterator for CriticalOrbit {
    type Item = OrbitPoint;

    fn next(&mut self) -> Option<OrbitPoint> {
        let c = self.param.c();
        self.state = match self.state {
            OrbitState::Start => match self.param.angle() {
                Angle::Rational(t) => OrbitState::OnCircle(*t),
                Angle::Real(_) => OrbitState::Free(c),
            },
            OrbitState::OnCircle(phi) => {
                let theta = self.param.angle().as_rational().expect("on-circle states need a rational angle");
                let image = phi.rotate(self.n);
                let gap = image.difference(&theta);
                if gap == RationalAngle::ONE_THIRD {
                    OrbitState::OnCircle(theta.offset_sixths(1))
                } else if gap == RationalAngle::TWO_THIRDS {
                    OrbitState::OnCircle(theta.offset_sixths(-1))
                } else {
                    OrbitState::Free(unit_vector(image.to_f64()) + c)
                }
            }
            OrbitState::Free(z) => {
                if self.index == 1 {
                    OrbitState::Free(self.param.second_iterate(self.n))
                } else {
                    OrbitState::Free(eval_map(z, self.n, c))
                }
            }
        };
        self.index += 1;
        Some(match self.state {
            OrbitState::OnCircle(phi) => OrbitPoint { value: unit_vector(phi.to_f64()), exact_angle: Some(phi) },
            OrbitState::Free(z) => OrbitPoint { value: z, exact_angle: None },
            OrbitState::Start => unreachable!(),
        })
    }
}

/// Escape test for the critical orbit of a unit-circle parameter, using
/// [`CriticalOrbit`] (exact while on `S¹`, floating point afterwards).
pub fn critical_orbit(param: &UnitCircleParam, n: u64, max_iter: u32, escape_radius: f64) -> Result<OrbitResult> {
    check_degree(n)?;
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    check_radius(n, param.c(), escape_radius)?;
    let r_n = second_iterate_modulus(param.angle(), n);
    let r2 = escape_radius * escape_radius;
    let mut last_on_circle: Option<RationalAngle> = None;
    let mut cycle: Option<CycleCheck> = None;
    let mut z = Complex64::new(0.0, 0.0);
    for (k, point) in (1..=max_iter).zip(CriticalOrbit::new(*param, n)) {
        z = point.value;
        if let Some(phi) = point.exact_angle {
            if last_on_circle == Some(phi) {
                break;
            }
            last_on_circle = Some(phi);
            continue;
        }
        let m2 = z.norm_sqr();
        if !m2.is_finite() {
            return Ok(OrbitResult { escaped: true, iterations_used: k, final_modulus: f64::INFINITY, r_n, non_finite: true });
        }
        if m2 > r2 {
            return Ok(OrbitResult { escaped: true, iterations_used: k, final_modulus: m2.sqrt(), r_n, non_finite: false });
        }
        match cycle.as_mut() {
            Some(check) => {
                if check.repeats(k, z) {
                    break;
                }
            }
            None => cycle = Some(CycleCheck::new(z)),
        }
    }
    Ok(OrbitResult { escaped: false, iterations_used: max_iter, final_modulus: z.norm(), r_n, non_finite: false })
}

// ---------------------------------------------------------------------------
// Trapping disks

/// `η + 1 - (1 + η^n)^n`. When `r_n` is at most this margin, `D_η` is
/// forward invariant under `P²`.
pub fn trap_margin(eta: f64, n: u64) -> f64 {
    let growth = (n as f64 * eta.powf(n as f64).ln_1p()).exp_m1();
    eta - growth
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapRegime {
    /// `r_n < 1 - ε`: `P²` should map `D_{1-ε}` into itself.
    Attracting,
    /// `r_n > 1 + ε`: `P²` should push `D_{1-ε/2}` out past `1 + ε/2`.
    Repelling,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapReport {
    pub regime: TrapRegime,
    pub r_n: f64,
    /// Attracting: every sample of `D_{1-ε}` maps into `D_{1-ε}`.
    /// Repelling: every sample of `D_{1-ε/2}` maps to modulus `≥ 1 + ε/2`.
    pub invariant_holds: bool,
    /// Largest image modulus (attracting) or smallest (repelling).
    pub worst_modulus: f64,
    /// The same check on the other disk: `D_{1-ε/2}` when attracting,
    /// `D_{1-ε}` when repelling.
    pub alternate_radius: f64,
    pub alternate_holds: bool,
    pub alternate_worst: f64,
    pub samples: usize,
}

/// `sample_count` equally spaced points on `|z| = radius` followed by
/// `sample_count` uniform random points of the disk.
fn disk_samples(radius: f64, sample_count: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut points = Vec::with_capacity(2 * sample_count);
    for j in 0..sample_count {
        points.push(radius * unit_vector(j as f64 / sample_count as f64));
    }
    for _ in 0..sample_count {
        let r = radius * rng.random::<f64>().sqrt();
        points.push(r * unit_vector(rng.random::<f64>()));
    }
    points
}

/// Samples the trapping-disk statement for `(θ, n, ε)`.
pub fn verify_trap(theta: &Angle, n: u64, epsilon: f64, sample_count: usize, seed: u64) -> Result<TrapReport> {
    check_degree(n)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    let r_n = second_iterate_modulus(theta, n);
    let regime = if r_n < 1.0 - epsilon {
        TrapRegime::Attracting
    } else if r_n > 1.0 + epsilon {
        TrapRegime::Repelling
    } else {
        return Err(Error::InconclusiveTrap { r_n, epsilon });
    };
    let c = UnitCircleParam::new(*theta).c();
    let second = |z: Complex64| eval_map(eval_map(z, n, c), n, c).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (primary, alternate) = match regime {
        TrapRegime::Attracting => (1.0 - epsilon, 1.0 - epsilon / 2.0),
        TrapRegime::Repelling => (1.0 - epsilon / 2.0, 1.0 - epsilon),
    };
    let mut run = |radius: f64| -> (bool, f64) {
        let images = disk_samples(radius, sample_count, &mut rng).into_iter().map(second);
        match regime {
            TrapRegime::Attracting => {
                let worst = images.fold(0.0f64, f64::max);
                (worst < radius, worst)
            }
            TrapRegime::Repelling => {
                let worst = images.fold(f64::INFINITY, f64::min);
                (worst >= 1.0 + epsilon / 2.0, worst)
            }
        }
    };
    let (invariant_holds, worst_modulus) = run(primary);
    let (alternate_holds, alternate_worst) = run(alternate);
    Ok(TrapReport {
        regime,
        r_n,
        invariant_holds,
        worst_modulus,
        alternate_radius: alternate,
        alternate_holds,
        alternate_worst,
        samples: 2 * sample_count,
    })
}
