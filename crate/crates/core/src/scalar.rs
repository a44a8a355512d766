use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar accepted by the numeric layer.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}

/// `x * 2^k` without intermediate overflow for large |k|.
pub(crate) fn ldexp<T: Real>(mut x: T, mut k: i64) -> T {
    let step = T::lit(2f64.powi(60));
    let inv = T::lit(2f64.powi(-60));
    while k > 60 {
        x = x * step;
        k -= 60;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -60 {
        x = x * inv;
        k += 60;
        if x == T::zero() {
            return x;
        }
    }
    x * T::lit(2f64.powi(k as i32))
}
