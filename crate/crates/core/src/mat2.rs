use std::ops::{Add, Mul, Neg, Sub};

use crate::ext::SignedExt;
use crate::scalar::Real;

/// Minimal ring interface for 2x2 matrix entries.
pub trait Ring: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
}

impl<T: Real> Ring for T {
    fn zero() -> Self {
        T::zero()
    }
    fn one() -> Self {
        T::one()
    }
}

impl<T: Real> Ring for SignedExt<T> {
    fn zero() -> Self {
        SignedExt::zero()
    }
    fn one() -> Self {
        SignedExt::one()
    }
}

/// `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Ring> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn diag(x: S, y: S) -> Self {
        Mat2::new(x, S::zero(), S::zero(), y)
    }

    pub fn trace(&self) -> S {
        self.a + self.d
    }

    pub fn det(&self) -> S {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv_sl2(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    /// `g * self * g^-1` for `g` of determinant one.
    pub fn conj(&self, g: &Self) -> Self {
        *g * *self * g.inv_sl2()
    }
}

impl<S: Ring> Mul for Mat2<S> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Mat2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

impl<T: Real> Mat2<SignedExt<T>> {
    pub fn from_float(m: &Mat2<T>) -> Self {
        Mat2::new(
            SignedExt::from_float(m.a),
            SignedExt::from_float(m.b),
            SignedExt::from_float(m.c),
            SignedExt::from_float(m.d),
        )
    }

    /// Entrywise conversion; overflowing entries become infinite.
    pub fn to_float(&self) -> Mat2<T> {
        Mat2::new(self.a.to_float(), self.b.to_float(), self.c.to_float(), self.d.to_float())
    }
}

impl<T: Real> Mat2<T> {
    /// Möbius action on a finite point.
    pub fn apply(&self, z: T) -> T {
        (self.a * z + self.b) / (self.c * z + self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_inverse() {
        let m = Mat2::new(2.0, 3.0, 1.0, 2.0);
        assert_eq!(m.det(), 1.0);
        assert_eq!(m * m.inv_sl2(), Mat2::identity());
    }

    #[test]
    fn signed_ext_matches_float() {
        let m = Mat2::new(2.0, -3.0, -1.0, 2.0);
        let e = Mat2::<SignedExt<f64>>::from_float(&m);
        let p = (e * e).to_float();
        assert_eq!(p, m * m);
        assert_eq!(e.trace().to_float(), 4.0);
    }
}
