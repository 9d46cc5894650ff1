//! Exact rational numbers used for every fuzzy-metric value and scale parameter.
//!
//! Values are stored as `Ratio<i128>`. Arithmetic is overflow-checked and
//! panics instead of wrapping, so a certificate is never produced from a
//! silently wrong value. Comparisons never overflow.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number.
///
/// The representation may be unreduced on hot paths (see [`Rational::raw`]);
/// equality, ordering, hashing and formatting all act on the reduced value.
#[derive(Clone, Copy)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

impl Rational {
    /// Builds `numer/denom` in lowest terms. Panics if `denom == 0`.
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    /// Builds `numer/denom` without reducing. Intended for evaluation loops
    /// where only comparisons follow. `denom` must be positive.
    #[inline]
    pub fn raw(numer: i128, denom: i128) -> Self {
        debug_assert!(denom > 0);
        Rational(Ratio::new_raw(numer, denom))
    }

    pub fn from_int(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational(Ratio::zero())
    }

    pub fn one() -> Self {
        Rational(Ratio::one())
    }

    pub fn half() -> Self {
        Rational::new(1, 2)
    }

    /// Numerator of the reduced form.
    pub fn numer(&self) -> i128 {
        *self.reduced().0.numer()
    }

    /// Denominator of the reduced form (always positive).
    pub fn denom(&self) -> i128 {
        *self.reduced().0.denom()
    }

    /// Numerator as stored, possibly unreduced.
    #[inline]
    pub fn numer_raw(&self) -> i128 {
        *self.0.numer()
    }

    /// Denominator as stored, possibly unreduced.
    #[inline]
    pub fn denom_raw(&self) -> i128 {
        *self.0.denom()
    }

    pub fn reduced(&self) -> Self {
        let (n, d) = (*self.0.numer(), *self.0.denom());
        let g = n.gcd(&d);
        if g <= 1 {
            *self
        } else {
            Rational(Ratio::new_raw(n / g, d / g))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.numer().is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.reduced().0.is_integer()
    }

    /// Largest integer not exceeding `self`.
    pub fn floor(&self) -> i128 {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> i128 {
        self.0.numer().div_ceil(self.0.denom())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `1 - self`, the threshold complement used throughout (`1 - r`).
    pub fn complement(&self) -> Self {
        Rational::one() - *self
    }

    /// True when `0 <= self <= 1`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Rational::one()
    }

    /// True when `0 < self < 1`.
    pub fn in_open_unit_interval(&self) -> bool {
        self.is_positive() && *self < Rational::one()
    }

    pub fn checked_add(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_add(&rhs.0).map(Rational)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_sub(&rhs.0).map(Rational)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_mul(&rhs.0).map(Rational)
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        self.0.checked_div(&rhs.0).map(Rational)
    }

    /// Lossy conversion for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n as i128)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (*self.0.numer(), *self.0.denom());
        let (c, d) = (*other.0.numer(), *other.0.denom());
        if b == d {
            return a.cmp(&c);
        }
        // denominators are positive, so a/b ? c/d  <=>  a*d ? c*b
        match (a.checked_mul(d), c.checked_mul(b)) {
            (Some(lhs), Some(rhs)) => lhs.cmp(&rhs),
            _ => self.0.cmp(&other.0),
        }
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let r = self.reduced();
        r.0.numer().hash(state);
        r.0.denom().hash(state);
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:literal) => {
        impl $trait for Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(&rhs)
                    .expect(concat!("rational overflow in ", $what))
            }
        }
    };
}

checked_binop!(Add, add, checked_add, "addition");
checked_binop!(Sub, sub, checked_sub, "subtraction");
checked_binop!(Mul, mul, checked_mul, "multiplication");

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        self.checked_div(&rhs).expect("rational overflow in division")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if *r.0.denom() == 1 {
            write!(f, "{}", r.0.numer())
        } else {
            write!(f, "{}/{}", r.0.numer(), r.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q` or a bare integer `p`. Decimal points, exponents and
    /// zero denominators are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseRationalError {
            input: s.to_string(),
            reason,
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(err("empty"));
        }
        let parse_int = |part: &str| -> Result<i128, ParseRationalError> {
            let digits = part.strip_prefix('-').unwrap_or(part);
            let digits = digits.strip_prefix('+').unwrap_or(digits);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("expected p/q with integer p and q"));
            }
            part.parse::<i128>().map_err(|_| err("integer out of range"))
        };
        match s.split_once('/') {
            None => Ok(Rational::from_int(parse_int(s)?)),
            Some((n, d)) => {
                let n = parse_int(n.trim())?;
                let d = parse_int(d.trim())?;
                if d == 0 {
                    return Err(err("zero denominator"));
                }
                Ok(Rational::new(n, d))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl<'de> Visitor<'de> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a \"p/q\" string or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_int(v as i128))
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Shorthand for `Rational::new`, used heavily in tests.
pub fn q(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}
