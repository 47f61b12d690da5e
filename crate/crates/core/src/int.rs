//! Arbitrary-precision integers with an inline machine-word fast path.
//!
//! Values that fit in an `i64` are stored inline and never touch the heap;
//! anything larger spills to [`BigInt`]. The representation is canonical
//! (a `Big` never holds a value that fits in `i64`), so derived equality and
//! hashing are value-based.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Int(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64),
    Big(BigInt),
}

impl Int {
    pub const fn small(v: i64) -> Self {
        Int(Repr::Small(v))
    }

    pub fn zero() -> Self {
        Int::small(0)
    }

    pub fn one() -> Self {
        Int::small(1)
    }

    fn from_big(b: BigInt) -> Self {
        match b.to_i64() {
            Some(v) => Int(Repr::Small(v)),
            None => Int(Repr::Big(b)),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match &self.0 {
            Repr::Small(v) => BigInt::from(*v),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1))
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(v) => v.signum() as i32,
            Repr::Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Int {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Int {
        self * self
    }

    /// Floor division; panics on a zero divisor.
    pub fn div_floor(&self, other: &Int) -> Int {
        assert!(!other.is_zero(), "integer division by zero");
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if !(*a == i64::MIN && *b == -1) {
                return Int::small(Integer::div_floor(a, b));
            }
        }
        Int::from_big(Integer::div_floor(&self.to_bigint(), &other.to_bigint()))
    }

    /// Remainder with the sign of the divisor (pairs with [`Int::div_floor`]).
    pub fn mod_floor(&self, other: &Int) -> Int {
        assert!(!other.is_zero(), "integer division by zero");
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if !(*a == i64::MIN && *b == -1) {
                return Int::small(Integer::mod_floor(a, b));
            }
        }
        Int::from_big(Integer::mod_floor(&self.to_bigint(), &other.to_bigint()))
    }

    /// Exact division; the caller guarantees `other` divides `self`.
    pub fn div_exact(&self, other: &Int) -> Int {
        let q = self.div_floor(other);
        debug_assert!((&q * other) == *self, "inexact division");
        q
    }

    /// Least integer `a` with `|a - self/den| <= 1/2`, for `den > 0`.
    pub fn round_half_down_div(&self, den: &Int) -> Int {
        debug_assert!(den.signum() > 0);
        // ceil((2n - d) / 2d) = -floor((d - 2n) / 2d)
        let two = Int::small(2);
        let num = den - &(&two * self);
        let q = num.div_floor(&(&two * den));
        -q
    }

    pub fn gcd(&self, other: &Int) -> Int {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if *a != i64::MIN && *b != i64::MIN {
                return Int::small(Integer::gcd(a, b));
            }
        }
        Int::from_big(Integer::gcd(&self.to_bigint(), &other.to_bigint()))
    }

    /// Residue in `[0, m)` as a `u64`; `m` must be positive and fit a word.
    pub fn rem_u64(&self, m: u64) -> u64 {
        match &self.0 {
            Repr::Small(v) => v.rem_euclid(m as i64) as u64,
            Repr::Big(b) => Integer::mod_floor(b, &BigInt::from(m)).to_u64().expect("residue fits"),
        }
    }

    pub fn pow(&self, e: u32) -> Int {
        let mut acc = Int::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Default for Int {
    fn default() -> Self {
        Int::zero()
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::small(v)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Self {
        Int::small(v as i64)
    }
}

impl From<u64> for Int {
    fn from(v: u64) -> Self {
        Int::from_big(BigInt::from(v))
    }
}

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Self {
        Int::from_big(v)
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_bigint().cmp(&other.to_bigint()),
        }
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident, $big:expr) => {
        impl<'a> $trait<&'a Int> for &'a Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
                    if let Some(v) = a.$checked(*b) {
                        return Int::small(v);
                    }
                }
                let f: fn(BigInt, BigInt) -> BigInt = $big;
                Int::from_big(f(self.to_bigint(), rhs.to_bigint()))
            }
        }
        impl $trait<Int> for Int {
            type Output = Int;
            fn $method(self, rhs: Int) -> Int {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Int> for Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Int> for &'a Int {
            type Output = Int;
            fn $method(self, rhs: Int) -> Int {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add, |a, b| a + b);
binop!(Sub, sub, checked_sub, |a, b| a - b);
binop!(Mul, mul, checked_mul, |a, b| a * b);

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match &self.0 {
            Repr::Small(v) => match v.checked_neg() {
                Some(n) => Int::small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Repr::Big(b) => Int::from_big(-b.clone()),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Int {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Int::from_big(BigInt::from_str(s)?))
    }
}

impl Zero for Int {
    fn zero() -> Self {
        Int::small(0)
    }
    fn is_zero(&self) -> bool {
        Int::is_zero(self)
    }
}

impl One for Int {
    fn one() -> Self {
        Int::small(1)
    }
}
