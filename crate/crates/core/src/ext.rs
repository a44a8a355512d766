//! Extended-range magnitudes: `mantissa * 2^exponent` with an `i64` exponent.
//!
//! Lengths such as `exp(-2^40)` and traces such as `exp(2^40)` are far outside
//! the range of any IEEE format but their logarithms are ordinary numbers, and
//! every formula in this crate only needs products, ratios, sums of positive
//! terms and logarithms of such values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{ldexp, Real};

/// Nonnegative extended-range number.
///
/// Invariant: `mantissa` is `0` (and then `exponent == 0`) or lies in `[1, 2)`.
#[derive(Clone, Copy)]
pub struct ExtScalar<T> {
    mantissa: T,
    exponent: i64,
}

impl<T: Real> ExtScalar<T> {
    pub fn zero() -> Self {
        ExtScalar { mantissa: T::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        ExtScalar { mantissa: T::one(), exponent: 0 }
    }

    fn normalize(m: T, e: i64) -> Self {
        if m == T::zero() {
            return Self::zero();
        }
        let (sig, ex, _) = m.integer_decode();
        let bits = 64 - sig.leading_zeros() as i64;
        let shift = ex as i64 + bits - 1;
        ExtScalar { mantissa: ldexp(m, -shift), exponent: e + shift }
    }

    /// Converts a nonnegative finite float.
    ///
    /// # Panics
    /// On negative, NaN or infinite input.
    pub fn from_float(x: T) -> Self {
        Self::try_from_float(x).unwrap_or_else(|| panic!("ExtScalar::from_float({x:?})"))
    }

    pub fn try_from_float(x: T) -> Option<Self> {
        if !x.is_finite() || x < T::zero() {
            return None;
        }
        Some(Self::normalize(x, 0))
    }

    /// `exp(x)`; `x = -inf` gives zero.
    pub fn from_ln(x: T) -> Self {
        if x == T::neg_infinity() {
            return Self::zero();
        }
        assert!(x.is_finite(), "ExtScalar::from_ln({x:?})");
        let ln2 = T::LN_2();
        let k = (x / ln2).floor();
        let r = (-k).mul_add(ln2, x);
        let e = k.to_i64().expect("exponent fits i64");
        Self::normalize(r.exp(), e)
    }

    /// `2^x` for a float exponent.
    pub fn from_log2(x: T) -> Self {
        let k = x.floor();
        let e = k.to_i64().expect("exponent fits i64");
        Self::normalize((x - k).exp2(), e)
    }

    /// `sig * 2^exp2` from an integer significand.
    pub fn from_parts(sig: u64, exp2: i64) -> Self {
        let m = T::from_u64(sig).expect("significand representable");
        Self::normalize(m, exp2)
    }

    /// Integer significand and binary exponent with `value = sig * 2^exp2`.
    pub fn to_parts(&self) -> (u64, i64) {
        if self.is_zero() {
            return (0, 0);
        }
        let (sig, ex, _) = self.mantissa.integer_decode();
        (sig, self.exponent + ex as i64)
    }

    pub fn mantissa(&self) -> T {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == T::zero()
    }

    /// Nearest float; saturates to `inf` or `0` outside the float range.
    pub fn to_float(&self) -> T {
        ldexp(self.mantissa, self.exponent)
    }

    pub fn ln(&self) -> T {
        if self.is_zero() {
            return T::neg_infinity();
        }
        let e = T::from_i64(self.exponent).unwrap();
        e.mul_add(T::LN_2(), self.mantissa.ln())
    }

    pub fn log2(&self) -> T {
        if self.is_zero() {
            return T::neg_infinity();
        }
        T::from_i64(self.exponent).unwrap() + self.mantissa.log2()
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let odd = self.exponent.rem_euclid(2);
        let m = (self.mantissa * T::lit((1 << odd) as f64)).sqrt();
        Self::normalize(m, (self.exponent - odd) / 2)
    }

    pub fn powf(&self, p: T) -> Self {
        if p == T::zero() {
            return Self::one();
        }
        if self.is_zero() {
            return *self;
        }
        Self::from_ln(self.ln() * p)
    }

    pub fn recip(&self) -> Self {
        Self::one() / *self
    }

    /// Multiplies by `2^k` exactly.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        ExtScalar { mantissa: self.mantissa, exponent: self.exponent + k }
    }

    pub fn mul_float(&self, x: T) -> Self {
        *self * Self::from_float(x)
    }

    /// `self - other` when `self >= other`.
    pub fn checked_sub(&self, other: Self) -> Option<Self> {
        match self.cmp(&other) {
            Ordering::Less => None,
            Ordering::Equal => Some(Self::zero()),
            Ordering::Greater => Some(Self::diff_ordered(*self, other)),
        }
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: Self) -> Self {
        if *self >= other {
            Self::diff_ordered(*self, other)
        } else {
            Self::diff_ordered(other, *self)
        }
    }

    fn diff_ordered(big: Self, small: Self) -> Self {
        if small.is_zero() {
            return big;
        }
        let d = big.exponent - small.exponent;
        if d > 128 {
            return big;
        }
        Self::normalize(big.mantissa - ldexp(small.mantissa, -d), big.exponent)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl<T: Real> PartialEq for ExtScalar<T> {
    fn eq(&self, other: &Self) -> bool {
        self.exponent == other.exponent && self.mantissa == other.mantissa
    }
}

impl<T: Real> Eq for ExtScalar<T> {}

impl<T: Real> PartialOrd for ExtScalar<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for ExtScalar<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exponent
                .cmp(&other.exponent)
                .then(self.mantissa.partial_cmp(&other.mantissa).unwrap()),
        }
    }
}

impl<T: Real> Mul for ExtScalar<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let m = self.mantissa * rhs.mantissa;
        let e = self.exponent + rhs.exponent;
        if m >= T::lit(2.0) {
            ExtScalar { mantissa: m / T::lit(2.0), exponent: e + 1 }
        } else {
            ExtScalar { mantissa: m, exponent: e }
        }
    }
}

impl<T: Real> Div for ExtScalar<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "ExtScalar division by zero");
        if self.is_zero() {
            return self;
        }
        let m = self.mantissa / rhs.mantissa;
        let e = self.exponent - rhs.exponent;
        if m < T::one() {
            ExtScalar { mantissa: m * T::lit(2.0), exponent: e - 1 }
        } else {
            ExtScalar { mantissa: m, exponent: e }
        }
    }
}

impl<T: Real> Add for ExtScalar<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (big, small) = if self >= rhs { (self, rhs) } else { (rhs, self) };
        if small.is_zero() {
            return big;
        }
        let d = big.exponent - small.exponent;
        if d > 128 {
            return big;
        }
        Self::normalize(big.mantissa + ldexp(small.mantissa, -d), big.exponent)
    }
}

impl<T: Real> fmt::Debug for ExtScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}*2^{}", self.mantissa, self.exponent)
    }
}

impl<T: Real + fmt::Display> fmt::Display for ExtScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.to_float();
        if x.is_finite() && (self.is_zero() || x != T::zero()) {
            write!(f, "{x}")
        } else {
            write!(f, "exp({})", self.ln())
        }
    }
}

/// Signed extended-range number, used for matrix entries.
#[derive(Clone, Copy)]
pub struct SignedExt<T> {
    neg: bool,
    mag: ExtScalar<T>,
}

impl<T: Real> PartialEq for SignedExt<T> {
    fn eq(&self, other: &Self) -> bool {
        self.neg == other.neg && self.mag == other.mag
    }
}

impl<T: Real> SignedExt<T> {
    pub fn new(neg: bool, mag: ExtScalar<T>) -> Self {
        SignedExt { neg: neg && !mag.is_zero(), mag }
    }

    pub fn pos(mag: ExtScalar<T>) -> Self {
        Self::new(false, mag)
    }

    pub fn zero() -> Self {
        Self::pos(ExtScalar::zero())
    }

    pub fn one() -> Self {
        Self::pos(ExtScalar::one())
    }

    pub fn from_float(x: T) -> Self {
        Self::new(x < T::zero(), ExtScalar::from_float(x.abs()))
    }

    pub fn to_float(&self) -> T {
        let v = self.mag.to_float();
        if self.neg {
            -v
        } else {
            v
        }
    }

    pub fn abs(&self) -> ExtScalar<T> {
        self.mag
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    /// `-1`, `0` or `1`.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }
}

impl<T: Real> Neg for SignedExt<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(!self.neg, self.mag)
    }
}

impl<T: Real> Add for SignedExt<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.neg == rhs.neg {
            return Self::new(self.neg, self.mag + rhs.mag);
        }
        match self.mag.cmp(&rhs.mag) {
            Ordering::Equal => Self::zero(),
            Ordering::Greater => Self::new(self.neg, self.mag.abs_diff(rhs.mag)),
            Ordering::Less => Self::new(rhs.neg, self.mag.abs_diff(rhs.mag)),
        }
    }
}

impl<T: Real> Sub for SignedExt<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Mul for SignedExt<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.neg != rhs.neg, self.mag * rhs.mag)
    }
}

impl<T: Real> Div for SignedExt<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.neg != rhs.neg, self.mag / rhs.mag)
    }
}

impl<T: Real> fmt::Debug for SignedExt<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", if self.neg { "-" } else { "+" }, self.mag)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Parts {
    mantissa: u64,
    exp2: i64,
}

/// Serialized as `{"mantissa": <integer significand>, "exp2": <binary exponent>}`.
impl serde::Serialize for ExtScalar<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (mantissa, exp2) = self.to_parts();
        Parts { mantissa, exp2 }.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for ExtScalar<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = Parts::deserialize(d)?;
        if p.mantissa >= 1 << 53 {
            return Err(serde::de::Error::custom("mantissa exceeds 53 bits"));
        }
        Ok(ExtScalar::from_parts(p.mantissa, p.exp2))
    }
}
