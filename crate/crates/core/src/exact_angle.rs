//! Exact arithmetic on rational angles `θ ∈ [0, 1)` (measured in turns).
//!
//! Everything here is integer arithmetic. The boundary of the
//! connected / disconnected trichotomy sits at `θ(n-1) ≡ 1/3, 2/3 (mod 1)`,
//! which floating point cannot decide reliably for large `n`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::dynamics::{self, UnitCircleParam};
use crate::error::{Error, Result};

/// Largest accepted denominator. Hexagon offsets multiply the denominator
/// by up to 6, which must still fit in a `u64`.
pub const MAX_DENOMINATOR: u64 = 1 << 60;

/// Iteration budget of the numerical fallback used for on-circle transient
/// cases.
pub const TRANSIENT_MAX_ITER: u32 = 10_000;

/// A reduced fraction `numerator / denominator` in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    numerator: u64,
    denominator: u64,
}

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle { numerator: 0, denominator: 1 };
    pub const ONE_THIRD: RationalAngle = RationalAngle { numerator: 1, denominator: 3 };
    pub const TWO_THIRDS: RationalAngle = RationalAngle { numerator: 2, denominator: 3 };

    /// Canonical representative of `numerator / denominator` modulo 1.
    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        Self::from_wide(numerator as i128, denominator as i128)
    }

    fn from_wide(numerator: i128, denominator: i128) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (numerator, denominator) = if denominator < 0 {
            (-numerator, -denominator)
        } else {
            (numerator, denominator)
        };
        let residue = numerator.rem_euclid(denominator);
        let g = residue.gcd(&denominator);
        let (num, den) = (residue / g, denominator / g);
        if den as u128 > MAX_DENOMINATOR as u128 {
            return Err(Error::InvalidArgument(format!(
                "reduced denominator {den} exceeds {MAX_DENOMINATOR}"
            )));
        }
        Ok(RationalAngle { numerator: num as u64, denominator: den as u64 })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `m·θ mod 1`, exactly.
    pub fn rotate(&self, m: u64) -> RationalAngle {
        let den = self.denominator as u128;
        let residue = (self.numerator as u128 * m as u128) % den;
        let g = residue.gcd(&den);
        RationalAngle {
            numerator: (residue / g) as u64,
            denominator: (den / g) as u64,
        }
    }

    /// `θ + k/6 mod 1`.
    pub fn offset_sixths(&self, k: i64) -> RationalAngle {
        let b = self.denominator as i128;
        let num = 6 * self.numerator as i128 + k as i128 * b;
        Self::from_wide(num, 6 * b).expect("denominator bounded by 6·MAX_DENOMINATOR")
    }

    /// `θ - other mod 1`.
    pub fn difference(&self, other: &RationalAngle) -> RationalAngle {
        let l = (self.denominator as u128).lcm(&(other.denominator as u128));
        let lhs = self.numerator as u128 * (l / self.denominator as u128);
        let rhs = other.numerator as u128 * (l / other.denominator as u128);
        let residue = (lhs + l - rhs) % l;
        let g = residue.gcd(&l);
        let den = l / g;
        // Both inputs are canonical, so `den` divides lcm(b1, b2); callers only
        // subtract angles whose denominators divide 6·MAX_DENOMINATOR.
        RationalAngle {
            numerator: (residue / g) as u64,
            denominator: u64::try_from(den).expect("difference denominator fits in u64"),
        }
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for RationalAngle {
    type Err = Error;

    /// Accepts `a/b` or a bare integer `a` (which reduces to 0).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidArgument(format!("not a fraction: {s:?}")))
        };
        match s.split_once('/') {
            Some((a, b)) => RationalAngle::new(parse(a)?, parse(b)?),
            None => RationalAngle::new(parse(s)?, 1),
        }
    }
}

/// Canonical reduced fraction `numerator / denominator mod 1`.
pub fn reduce(numerator: i64, denominator: i64) -> Result<RationalAngle> {
    RationalAngle::new(numerator, denominator)
}

/// `θ·m mod 1` computed without floating point.
pub fn fractional_rotation(theta: RationalAngle, m: u64) -> RationalAngle {
    theta.rotate(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Connected,
    Disconnected,
    /// `P(c)` lands on a fixed point of the unit circle; the critical orbit
    /// never leaves `S¹`.
    OnCircleFixed,
    /// `P(c)` lies on `S¹` but the orbit leaves the circle afterwards.
    OnCircleTransient,
}

impl Tag {
    pub fn is_on_circle(&self) -> bool {
        matches!(self, Tag::OnCircleFixed | Tag::OnCircleTransient)
    }

    /// Star-table glyph.
    pub fn symbol(&self) -> char {
        match self {
            Tag::Connected => '*',
            Tag::Disconnected => '.',
            Tag::OnCircleFixed | Tag::OnCircleTransient => 'o',
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Tag::Connected => "Connected",
            Tag::Disconnected => "Disconnected",
            Tag::OnCircleFixed => "OnCircleFixed",
            Tag::OnCircleTransient => "OnCircleTransient",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Connected" => Ok(Tag::Connected),
            "Disconnected" => Ok(Tag::Disconnected),
            "OnCircleFixed" => Ok(Tag::OnCircleFixed),
            "OnCircleTransient" => Ok(Tag::OnCircleTransient),
            other => Err(Error::InvalidArgument(format!("unknown classification {other:?}"))),
        }
    }
}

/// Coarse trichotomy of `f = θ(n-1) mod 1`, the sign of `cos(2πf) + 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Trichotomy {
    Inside,
    Outside,
    OnCircle,
}

pub fn trichotomy(f: RationalAngle) -> Trichotomy {
    // Compare 3·num against den and 2·den.
    let three_num = 3 * f.numerator as u128;
    let den = f.denominator as u128;
    if three_num == den || three_num == 2 * den {
        Trichotomy::OnCircle
    } else if three_num > den && three_num < 2 * den {
        Trichotomy::Inside
    } else {
        Trichotomy::Outside
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub tag: Tag,
    /// `θ(n-1) mod 1`.
    pub fractional_part: RationalAngle,
    pub witness: Option<ExceptionalWitness>,
    /// Outcome of the numerical critical-orbit fallback; only set for
    /// [`Tag::OnCircleTransient`].
    pub numerically_bounded: Option<bool>,
}

impl Classification {
    /// Whether `K(P_{n,c})` is connected, taking the numerical fallback
    /// into account for transient on-circle cases.
    pub fn is_connected(&self) -> bool {
        match self.tag {
            Tag::Connected | Tag::OnCircleFixed => true,
            Tag::Disconnected => false,
            Tag::OnCircleTransient => self.numerically_bounded.unwrap_or(false),
        }
    }
}

/// Witness that `(n, θ)` belongs to the exceptional family:
/// `n = 6p` and `θ = (3q + sign) / (3(6p - 1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExceptionalWitness {
    pub p: u64,
    pub q: i128,
    pub sign: i8,
}

impl ExceptionalWitness {
    /// The angle `(3q + sign) / (3(6p - 1))`, reduced.
    pub fn angle(&self) -> Result<RationalAngle> {
        let num = 3 * self.q + self.sign as i128;
        let den = 3 * (6 * self.p as i128 - 1);
        RationalAngle::from_wide(num, den)
    }

    pub fn degree(&self) -> u64 {
        6 * self.p
    }
}

fn check_degree(n: u64) -> Result<()> {
    if n < 2 {
        Err(Error::DegreeTooSmall(n))
    } else {
        Ok(())
    }
}

/// Exact classification of the pair `(θ, n)`.
///
/// On-circle cases are split into fixed (exceptional) and transient ones;
/// transient cases carry the verdict of the numerical critical-orbit check.
pub fn classify_exact(theta: RationalAngle, n: u64) -> Result<Classification> {
    classify_with_budget(theta, n, TRANSIENT_MAX_ITER)
}

pub fn classify_with_budget(theta: RationalAngle, n: u64, max_iter: u32) -> Result<Classification> {
    check_degree(n)?;
    let f = theta.rotate(n - 1);
    let tag = match trichotomy(f) {
        Trichotomy::Inside => Tag::Connected,
        Trichotomy::Outside => Tag::Disconnected,
        Trichotomy::OnCircle => {
            if is_exceptional(theta, n).is_some() {
                Tag::OnCircleFixed
            } else {
                Tag::OnCircleTransient
            }
        }
    };
    let witness = if tag == Tag::OnCircleFixed { is_exceptional(theta, n) } else { None };
    let numerically_bounded = if tag == Tag::OnCircleTransient {
        let param = UnitCircleParam::rational(theta);
        let radius = dynamics::default_escape_radius(param.c());
        let orbit = dynamics::critical_orbit(&param, n, max_iter, radius)?;
        Some(!orbit.escaped)
    } else {
        None
    };
    Ok(Classification { tag, fractional_part: f, witness, numerically_bounded })
}

/// Angles (in turns) of the hexagon vertices `a, a₀, b₀, b` built on `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HexagonAngles {
    pub a: RationalAngle,
    pub a0: RationalAngle,
    pub b0: RationalAngle,
    pub b: RationalAngle,
}

/// `θ + 1/6, θ + 1/3, θ - 1/3, θ - 1/6` modulo 1.
///
/// `a₀, b₀` are the two points of `S¹ ∩ (S¹ - c)` and `a = a₀ + c`,
/// `b = b₀ + c` are the only points of `S¹` that `P` can send back to `S¹`.
pub fn hexagon_points(theta: RationalAngle) -> HexagonAngles {
    HexagonAngles {
        a: theta.offset_sixths(1),
        a0: theta.offset_sixths(2),
        b0: theta.offset_sixths(-2),
        b: theta.offset_sixths(-1),
    }
}

/// Decides membership of `(n, θ)` in the exceptional family by the two
/// congruences
///
/// * `θ(n-1) ≡ sign/3 (mod 1)` (the critical value lands on `a` or `b`), and
/// * `(θ + sign/6)·n ≡ θ + sign/3 (mod 1)` (that point is fixed),
///
/// and, on success, solves for `p = n/6` and `q = θ(n-1) - sign/3`.
pub fn is_exceptional(theta: RationalAngle, n: u64) -> Option<ExceptionalWitness> {
    if n < 2 {
        return None;
    }
    let f = theta.rotate(n - 1);
    let sign: i8 = if f == RationalAngle::ONE_THIRD {
        1
    } else if f == RationalAngle::TWO_THIRDS {
        -1
    } else {
        return None;
    };

    // Work in units of 1/(6b).
    let a = theta.numerator as i128;
    let b = theta.denominator as i128;
    let s = sign as i128;
    let modulus = 6 * b;
    let n_red = (n as i128).rem_euclid(modulus);
    let lhs = (6 * a + s * b) * n_red;
    let rhs = 6 * a + 2 * s * b;
    if (lhs - rhs).rem_euclid(modulus) != 0 {
        return None;
    }
    if n % 6 != 0 {
        // Implied by the two congruences; kept as a guard.
        return None;
    }

    let turns = theta.numerator as u128 * (n - 1) as u128;
    let whole = (turns / theta.denominator as u128) as i128;
    let q = if sign > 0 { whole } else { whole + 1 };
    Some(ExceptionalWitness { p: n / 6, q, sign })
}

/// All `n ∈ [2, n_max]` for which `(n, θ)` is exceptional.
pub fn exceptional_powers(theta: RationalAngle, n_max: u64) -> Vec<u64> {
    if theta.denominator % 3 != 0 || n_max < 6 {
        return Vec::new();
    }
    (6..=n_max)
        .step_by(6)
        .filter(|&n| is_exceptional(theta, n).is_some())
        .collect()
}

/// Whether `θ = (3q ± 1) / (3(6p - 1))` for some `p ≥ 1`, `q ∈ ℤ`; returns
/// the witness with the smallest `p`.
///
/// `θ(6p - 1) mod 1` is periodic in `p` with period dividing the
/// denominator, so one period of `p` is searched.
pub fn in_exceptional_family(theta: RationalAngle) -> Option<ExceptionalWitness> {
    if theta.denominator % 3 != 0 {
        return None;
    }
    (1..=theta.denominator).find_map(|p| is_exceptional(theta, 6 * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle(a: i64, b: i64) -> RationalAngle {
        RationalAngle::new(a, b).unwrap()
    }

    /// Adds θ to itself `m` times, reducing mod 1 at each step.
    fn rotation_by_repeated_addition(theta: RationalAngle, m: u64) -> RationalAngle {
        let b = theta.denominator();
        let mut acc = 0u64;
        for _ in 0..m {
            acc = (acc + theta.numerator()) % b;
        }
        angle(acc as i64, b as i64)
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(4, 10).unwrap(), angle(2, 5));
        assert_eq!((reduce(4, 10).unwrap().numerator(), reduce(4, 10).unwrap().denominator()), (2, 5));
        assert_eq!(reduce(-1, 3).unwrap().to_string(), "2/3");
        assert_eq!(reduce(26, 30).unwrap().to_string(), "13/15");
        assert_eq!(reduce(3, -4).unwrap().to_string(), "1/4");
        assert_eq!(reduce(7, 7).unwrap(), RationalAngle::ZERO);
    }

    #[test]
    fn reduce_rejects_zero_denominator() {
        assert!(matches!(reduce(1, 0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn parse_fraction() {
        assert_eq!("13/15".parse::<RationalAngle>().unwrap(), angle(13, 15));
        assert_eq!("0/1".parse::<RationalAngle>().unwrap(), RationalAngle::ZERO);
        assert_eq!("5".parse::<RationalAngle>().unwrap(), RationalAngle::ZERO);
        assert!("1/x".parse::<RationalAngle>().is_err());
        assert!("1/0".parse::<RationalAngle>().is_err());
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(fractional_rotation(angle(1, 2), 3), angle(1, 2));
        // 13·425 = 5525 = 368·15 + 5
        assert_eq!(fractional_rotation(angle(13, 15), 425), angle(1, 3));
        assert_eq!(fractional_rotation(angle(13, 15), 425), rotation_by_repeated_addition(angle(13, 15), 425));
        assert_eq!(fractional_rotation(angle(2, 5), 29), angle(3, 5));
        assert_eq!(fractional_rotation(angle(2, 5), 29), rotation_by_repeated_addition(angle(2, 5), 29));
    }

    #[test]
    fn rotation_does_not_overflow() {
        let theta = RationalAngle::new(MAX_DENOMINATOR as i64 - 1, MAX_DENOMINATOR as i64).unwrap();
        let r = theta.rotate(u64::MAX);
        assert!(r.numerator() < r.denominator());
    }

    #[test]
    fn classify_examples() {
        let c = classify_exact(angle(13, 15), 426).unwrap();
        assert_eq!(c.tag, Tag::OnCircleFixed);
        assert_eq!(c.fractional_part, angle(1, 3));
        assert!(c.is_connected());

        let c = classify_exact(angle(1, 2), 4).unwrap();
        assert_eq!(c.tag, Tag::Connected);
        assert_eq!(c.fractional_part, angle(1, 2));

        let c = classify_exact(angle(1, 2), 5).unwrap();
        assert_eq!(c.tag, Tag::Disconnected);
        assert_eq!(c.fractional_part, RationalAngle::ZERO);

        let c = classify_exact(angle(2, 5), 30).unwrap();
        assert_eq!(c.tag, Tag::Connected);
        assert_eq!(c.fractional_part, angle(3, 5));
    }

    #[test]
    fn classify_rejects_small_degree() {
        assert!(matches!(classify_exact(angle(1, 2), 1), Err(Error::DegreeTooSmall(1))));
    }

    #[test]
    fn transient_carries_numerical_verdict() {
        // θ = 1/3, n = 2: f = 1/3 but 2 is not a multiple of 6.
        let c = classify_exact(angle(1, 3), 2).unwrap();
        assert_eq!(c.tag, Tag::OnCircleTransient);
        assert!(c.numerically_bounded.is_some());
        assert!(c.witness.is_none());
    }

    #[test]
    fn hexagon_examples() {
        let h = hexagon_points(RationalAngle::ZERO);
        assert_eq!((h.a, h.a0, h.b0, h.b), (angle(1, 6), angle(1, 3), angle(2, 3), angle(5, 6)));
        let h = hexagon_points(angle(1, 15));
        assert_eq!((h.a, h.a0, h.b0, h.b), (angle(7, 30), angle(2, 5), angle(11, 15), angle(9, 10)));
        let h = hexagon_points(angle(1, 2));
        assert_eq!((h.a, h.a0, h.b0, h.b), (angle(2, 3), angle(5, 6), angle(1, 6), angle(1, 3)));
    }

    #[test]
    fn hexagon_matches_geometry() {
        // a₀ and b₀ lie on both S¹ and S¹ - c; a = a₀ + c and b = b₀ + c are on S¹.
        let theta = angle(3, 17);
        let h = hexagon_points(theta);
        let unit = |t: RationalAngle| {
            let x = std::f64::consts::TAU * t.to_f64();
            num_complex::Complex64::new(x.cos(), x.sin())
        };
        let c = unit(theta);
        for (p, p0) in [(h.a, h.a0), (h.b, h.b0)] {
            assert!(((unit(p0) + c).norm() - 1.0).abs() < 1e-12);
            assert!((unit(p0) + c - unit(p)).norm() < 1e-12);
        }
    }

    #[test]
    fn exceptional_examples() {
        assert_eq!(
            is_exceptional(angle(1, 15), 6),
            Some(ExceptionalWitness { p: 1, q: 0, sign: 1 })
        );
        assert_eq!(
            is_exceptional(angle(13, 15), 426),
            Some(ExceptionalWitness { p: 71, q: 368, sign: 1 })
        );
        assert_eq!(is_exceptional(angle(2, 5), 30), None);
        // 14/15 at n = 426: f = 2/3, the minus branch.
        let w = is_exceptional(angle(14, 15), 426).unwrap();
        assert_eq!(w.sign, -1);
        assert_eq!(w.angle().unwrap(), angle(14, 15));
    }

    #[test]
    fn exceptional_witness_reconstructs_angle() {
        for b in 1..=60i64 {
            for a in 0..b {
                let theta = angle(a, b);
                for n in 2..=200u64 {
                    if let Some(w) = is_exceptional(theta, n) {
                        assert_eq!(n % 6, 0);
                        assert_eq!(w.degree(), n);
                        assert_eq!(w.angle().unwrap(), theta, "θ={theta} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn exceptional_powers_examples() {
        let powers = exceptional_powers(angle(1, 15), 200);
        assert!(powers.contains(&6) && powers.contains(&66) && powers.contains(&156));
        // f(n) = 1/3 ⇔ n ≡ 6 (mod 15); together with 6 | n this is n ≡ 6 (mod 30).
        assert_eq!(powers, vec![6, 36, 66, 96, 126, 156, 186]);
        assert!(exceptional_powers(angle(1, 2), 1000).is_empty());
        assert!(exceptional_powers(angle(2, 5), 1000).is_empty());
    }

    #[test]
    fn family_membership() {
        assert!(in_exceptional_family(angle(1, 15)).is_some());
        assert!(in_exceptional_family(angle(1, 3)).is_some());
        assert!(in_exceptional_family(angle(2, 3)).is_some());
        // 3(6p - 1) carries exactly one factor of 3 and 3q ± 1 carries none.
        assert!(in_exceptional_family(angle(1, 9)).is_none());
        assert!(in_exceptional_family(angle(2, 5)).is_none());
        assert!(in_exceptional_family(RationalAngle::ZERO).is_none());
    }

    #[test]
    fn family_membership_matches_closed_form() {
        // Enumerate (3q ± 1) / (3(6p - 1)) directly for small p.
        let mut family = std::collections::HashSet::new();
        for p in 1..=40i64 {
            let den = 3 * (6 * p - 1);
            for q in 0..den {
                for s in [-1, 1] {
                    family.insert(angle(3 * q + s, den));
                }
            }
        }
        for b in 1..=30i64 {
            for a in 0..b {
                let theta = angle(a, b);
                if theta.denominator() as i64 != b {
                    continue;
                }
                // Any member with denominator ≤ 30 appears with p ≤ 40.
                assert_eq!(
                    in_exceptional_family(theta).is_some(),
                    family.contains(&theta),
                    "θ = {theta}"
                );
            }
        }
    }

    #[test]
    fn trichotomy_boundaries() {
        assert_eq!(trichotomy(angle(1, 3)), Trichotomy::OnCircle);
        assert_eq!(trichotomy(angle(2, 3)), Trichotomy::OnCircle);
        assert_eq!(trichotomy(angle(1, 2)), Trichotomy::Inside);
        assert_eq!(trichotomy(angle(333, 1000)), Trichotomy::Outside);
        assert_eq!(trichotomy(angle(334, 1000)), Trichotomy::Inside);
        assert_eq!(trichotomy(RationalAngle::ZERO), Trichotomy::Outside);
    }

    #[test]
    fn difference_wraps() {
        assert_eq!(angle(1, 6).difference(&angle(1, 3)), angle(5, 6));
        assert_eq!(angle(2, 3).difference(&angle(1, 3)), angle(1, 3));
    }
}
