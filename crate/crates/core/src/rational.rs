//! Exact rationals and nearest-integer rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A fraction `num / den` kept in lowest terms with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };
    pub const HALF: Rational = Rational { num: 1, den: 2 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduce(num as i128, den as i128))
    }

    pub fn from_int(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    fn reduce(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = gcd(num, den).max(1);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Rational {
            num: i64::try_from(num).expect("rational numerator overflow"),
            den: i64::try_from(den).expect("rational denominator overflow"),
        }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i64 {
        -(-self.num).div_euclid(self.den)
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// True when the value is `k + 1/2` for some integer `k`.
    pub fn is_half_integer(&self) -> bool {
        self.den == 2
    }

    pub fn abs(&self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den,
        }
    }

    pub fn mul_int(&self, k: u64) -> Self {
        Self::reduce(self.num as i128 * k as i128, self.den as i128)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Nearest integer, reporting both neighbours at a half-integer.
    pub fn nint(&self) -> Rounding {
        if self.is_half_integer() {
            let lo = self.floor();
            Rounding::Tie {
                floor: lo,
                ceil: lo + 1,
            }
        } else {
            // num/den + 1/2 floored; den != 2 so no tie
            let twice = Self::reduce(2 * self.num as i128 + self.den as i128, 2 * self.den as i128);
            Rounding::Exact(twice.floor())
        }
    }
}

/// Result of rounding a rational to the nearest integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Exact(i64),
    Tie { floor: i64, ceil: i64 },
}

impl Rounding {
    pub fn lo(&self) -> i64 {
        match *self {
            Rounding::Exact(v) => v,
            Rounding::Tie { floor, .. } => floor,
        }
    }

    pub fn hi(&self) -> i64 {
        match *self {
            Rounding::Exact(v) => v,
            Rounding::Tie { ceil, .. } => ceil,
        }
    }

    pub fn is_tie(&self) -> bool {
        matches!(self, Rounding::Tie { .. })
    }

    /// Admissible values in ascending order.
    pub fn choices(&self) -> impl Iterator<Item = i64> {
        self.lo()..=self.hi()
    }
}

pub fn nint(r: Rational) -> Rounding {
    r.nint()
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Self {
        Self::reduce(
            self.num as i128 * rhs.den as i128 + rhs.num as i128 * self.den as i128,
            self.den as i128 * rhs.den as i128,
        )
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Self {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Self {
        Self::reduce(
            self.num as i128 * rhs.num as i128,
            self.den as i128 * rhs.den as i128,
        )
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.num != 0, "division by zero rational");
        Self::reduce(
            self.num as i128 * rhs.den as i128,
            self.den as i128 * rhs.num as i128,
        )
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Parses `NUM/DEN` or a bare integer. Decimal notation is rejected.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("expected NUM/DEN, got {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: i64 = n.parse().map_err(|_| bad())?;
        let den: i64 = d.parse().map_err(|_| bad())?;
        Rational::new(num, den)
    }
}

/// A rational known to lie in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Proportion(Rational);

impl Proportion {
    pub const HALF: Proportion = Proportion(Rational::HALF);

    pub fn new(r: Rational) -> Result<Self> {
        if r < Rational::ZERO || r > Rational::ONE {
            return Err(Error::InvalidProportion(r.to_string()));
        }
        Ok(Proportion(r))
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> Proportion {
        Proportion(Rational::ONE - self.0)
    }

    pub fn is_at_most_half(&self) -> bool {
        self.0 <= Rational::HALF
    }
}

impl FromStr for Proportion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Proportion::new(s.parse()?)
    }
}

impl fmt::Display for Proportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
