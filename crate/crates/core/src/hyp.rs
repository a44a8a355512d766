//! Half-plane toolkit: cross-ratios, trace and length conversion, collar
//! widths, the Grötzsch modulus, the quadrilateral modulus `h` and the
//! constants used by the quasiconformal lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{domain, FnsError, Result};
use crate::ext::ExtScalar;
use crate::scalar::Real;

/// A point of `R ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> BoundaryPoint<T> {
    pub fn finite(x: T) -> Result<Self> {
        if x.is_finite() {
            Ok(BoundaryPoint::Finite(x))
        } else {
            domain(format!("boundary point {x:?} is not finite; use Infinity"))
        }
    }

    /// Image under `z -> (a z + b)/(c z + d)`.
    pub fn mobius(self, a: T, b: T, c: T, d: T) -> Self {
        match self {
            BoundaryPoint::Infinity => {
                if c == T::zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(a / c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = c * x + d;
                if den == T::zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((a * x + b) / den)
                }
            }
        }
    }
}

/// Intersection angle between two geodesics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleData<T> {
    pub theta: T,
    pub sin_theta: T,
    pub cos_theta: T,
}

impl<T: Real> AngleData<T> {
    pub fn from_sin_cos(sin_theta: T, cos_theta: T) -> Self {
        AngleData { theta: sin_theta.atan2(cos_theta), sin_theta, cos_theta }
    }
}

/// Switch points between exact formulas and their asymptotic forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchThresholds<T> {
    /// `trace_to_length` uses `2(ln tr - tr^-2)` above this trace.
    pub trace: T,
    /// `collar_half_width` uses `ln(4/l) + l^2/48` below this length.
    pub small_length: T,
    /// `collar_half_width` works in the log domain above this length.
    pub large_length: T,
    /// `quad_modulus_h` uses the logarithmic expansion above this argument.
    pub modulus: T,
}

impl<T: Real> Default for BranchThresholds<T> {
    fn default() -> Self {
        BranchThresholds {
            trace: T::lit(1e8),
            small_length: T::lit(1e-8),
            large_length: T::lit(40.0),
            modulus: T::lit(1e8),
        }
    }
}

/// `χ(a,b,c,d) = (a-c)(b-d) / ((a-d)(b-c))`, with the limiting forms at `∞`.
pub fn cross_ratio<T: Real>(
    a: BoundaryPoint<T>,
    b: BoundaryPoint<T>,
    c: BoundaryPoint<T>,
    d: BoundaryPoint<T>,
) -> Result<T> {
    use BoundaryPoint::*;
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i] == pts[j] {
                return Err(FnsError::Degenerate(format!(
                    "cross-ratio points {i} and {j} coincide"
                )));
            }
        }
    }
    Ok(match (a, b, c, d) {
        (Infinity, Finite(b), Finite(c), Finite(d)) => (b - d) / (b - c),
        (Finite(a), Infinity, Finite(c), Finite(d)) => (a - c) / (a - d),
        (Finite(a), Finite(b), Infinity, Finite(d)) => (b - d) / (a - d),
        (Finite(a), Finite(b), Finite(c), Infinity) => (a - c) / (b - c),
        (Finite(a), Finite(b), Finite(c), Finite(d)) => (a - c) * (b - d) / ((a - d) * (b - c)),
        _ => unreachable!("at most one point is infinite once distinctness holds"),
    })
}

/// Translation length `2 arccosh(y)` from the half-trace excess `u = y - 1 >= 0`.
///
/// Working with `u` keeps full relative accuracy for short curves.
pub fn half_trace_excess_to_length<T: Real>(u: ExtScalar<T>) -> ExtScalar<T> {
    let two = T::lit(2.0);
    if u.is_zero() {
        return u;
    }
    if u > ExtScalar::from_float(T::lit(5e7)) {
        let y = u + ExtScalar::one();
        let y2 = (y * y).to_float();
        let corr = if y2.is_finite() { T::lit(0.25) / y2 } else { T::zero() };
        return ExtScalar::from_float(two * (y.ln() + T::LN_2() - corr));
    }
    let u = u.to_float();
    ExtScalar::from_float(two * (u + (u * (two + u)).sqrt()).ln_1p())
}

/// Translation length of a hyperbolic isometry from `|trace|`.
///
/// ```text
/// l = 2 arccosh(|tr| / 2)
/// ```
pub fn trace_to_length<T: Real>(tr: ExtScalar<T>) -> Result<ExtScalar<T>> {
    trace_to_length_with(tr, &BranchThresholds::default())
}

pub fn trace_to_length_with<T: Real>(
    tr: ExtScalar<T>,
    th: &BranchThresholds<T>,
) -> Result<ExtScalar<T>> {
    let two = ExtScalar::from_float(T::lit(2.0));
    if tr < two {
        return Err(FnsError::Elliptic(tr.to_float().to_f64().unwrap_or(f64::NAN)));
    }
    if tr == two {
        return Ok(ExtScalar::zero());
    }
    if tr.to_float() > th.trace {
        let t2 = (tr * tr).to_float();
        let corr = if t2.is_finite() { T::one() / t2 } else { T::zero() };
        return Ok(ExtScalar::from_float(T::lit(2.0) * (tr.ln() - corr)));
    }
    let half = tr.to_float() / T::lit(2.0);
    Ok(half_trace_excess_to_length(ExtScalar::from_float(half - T::one())))
}

/// Half-width `w(l) = arcsinh(1 / sinh(l/2))` of the standard collar.
pub fn collar_half_width<T: Real>(l: ExtScalar<T>) -> Result<ExtScalar<T>> {
    collar_half_width_with(l, &BranchThresholds::default())
}

pub fn collar_half_width_with<T: Real>(
    l: ExtScalar<T>,
    th: &BranchThresholds<T>,
) -> Result<ExtScalar<T>> {
    if l.is_zero() {
        return domain("collar of a zero-length curve");
    }
    if l.to_float() < th.small_length {
        let ln4 = T::lit(4.0).ln();
        let x = l.to_float();
        return Ok(ExtScalar::from_float(ln4 - l.ln() + x * x / T::lit(48.0)));
    }
    let x = l.to_float();
    if x > th.large_length {
        // 1/sinh(x/2) = 2e^{-x/2}/(1 - e^{-x}) and arcsinh(y) = y - y^3/6 + ...
        let y = ExtScalar::from_ln(T::LN_2() - x / T::lit(2.0));
        return Ok(y);
    }
    Ok(ExtScalar::from_float((T::one() / (x / T::lit(2.0)).sinh()).asinh()))
}

/// Arithmetic-geometric mean.
///
/// Stops when `|a - b| < 1e-16 a`, when an iteration no longer changes the
/// pair, or after 64 iterations.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    let tol = T::lit(1e-16);
    for _ in 0..64 {
        if (a - b).abs() < tol * a {
            break;
        }
        let na = (a + b) / T::lit(2.0);
        let nb = (a * b).sqrt();
        if na == a && nb == b {
            break;
        }
        a = na;
        b = nb;
    }
    (a + b) / T::lit(2.0)
}

fn mu_pair<T: Real>(r: T, rp: T) -> T {
    T::FRAC_PI_2() * agm(T::one(), rp) / agm(T::one(), r)
}

/// Modulus of the Grötzsch ring `D \ [0, r]`.
///
/// ```text
/// mu(r) = (pi/2) K(r') / K(r),  r' = sqrt(1 - r^2)
/// ```
pub fn groetzsch_mu<T: Real>(r: T) -> Result<T> {
    if !(r > T::zero() && r < T::one()) {
        return domain(format!("groetzsch_mu needs 0 < r < 1, got {r:?}"));
    }
    let rp = ((T::one() - r) * (T::one() + r)).sqrt();
    Ok(mu_pair(r, rp))
}

/// Modulus of the half-plane quadrilateral with vertices `∞, -1, 0, t`.
pub fn quad_modulus_h<T: Real>(t: ExtScalar<T>) -> Result<T> {
    quad_modulus_h_with(t, &BranchThresholds::default())
}

pub fn quad_modulus_h_with<T: Real>(t: ExtScalar<T>, th: &BranchThresholds<T>) -> Result<T> {
    if t.is_zero() {
        return domain("quad_modulus_h needs t > 0");
    }
    let pi = T::PI();
    if t.to_float() > th.modulus {
        let tp1 = t + ExtScalar::one();
        let inv = tp1.recip().to_float();
        return Ok((T::lit(16.0).ln() + tp1.ln()) / pi - inv / (T::lit(2.0) * pi));
    }
    let t = t.to_float();
    let r = (T::one() / (T::one() + t)).sqrt();
    let rp = (t / (T::one() + t)).sqrt();
    Ok(T::lit(2.0) / pi * mu_pair(r, rp))
}

/// Left endpoint bound for the image of `x1` under a positive twist of size `t`.
///
/// ```text
/// m - sqrt(e^{2t} + m^2),  m = (x1 + x2)/2
/// ```
pub fn twist_endpoint_bound<T: Real>(x1: T, x2: T, t: T) -> Result<T> {
    check_normalized(x1, x2)?;
    if !(t >= T::zero()) {
        return domain(format!("twist_endpoint_bound needs t >= 0, got {t:?}"));
    }
    if t == T::zero() {
        return Ok(x1);
    }
    let m = (x1 + x2) / T::lit(2.0);
    let r = t.exp().hypot(m);
    if m > T::zero() {
        let et = t.exp();
        Ok(-(et / (m + r)) * et)
    } else {
        Ok(m - r)
    }
}

fn check_normalized<T: Real>(x1: T, x2: T) -> Result<()> {
    if !(x1 < T::zero() && T::zero() < x2) {
        return domain(format!("need x1 < 0 < x2, got ({x1:?}, {x2:?})"));
    }
    let p = -x1 * x2;
    if (p - T::one()).abs() > T::lit(1e-9) {
        return domain(format!("need x1*x2 = -1, got {:?}", -p));
    }
    Ok(())
}

/// Angle between the imaginary axis and the geodesic from `x1` to `x2`,
/// normalized to pass through `i`.
///
/// `sin θ = 2/(|x1|+|x2|)`, `cos θ = (|x1|-|x2|)/(|x1|+|x2|)`.
pub fn angle_from_endpoints<T: Real>(x1: T, x2: T) -> Result<AngleData<T>> {
    check_normalized(x1, x2)?;
    Ok(angle_from_axis(x1, x2))
}

/// Same angle for any geodesic with endpoints `x1 < 0 < x2`.
pub fn angle_from_axis<T: Real>(x1: T, x2: T) -> AngleData<T> {
    let (a, b) = (x1.abs(), x2.abs());
    let s = a + b;
    AngleData::from_sin_cos(T::lit(2.0) * (a * b).sqrt() / s, (a - b) / s)
}

/// Angle from its cosine.
pub fn angle_from_cos<T: Real>(c: T) -> AngleData<T> {
    let c = c.max(-T::one()).min(T::one());
    AngleData::from_sin_cos(((T::one() - c) * (T::one() + c)).sqrt(), c)
}

/// The constant `K(ρ)` of the quasiconformal lower bound.
///
/// ```text
/// s = sqrt(1 - ρ^2),  q = s/(1 - s)
/// K = (1 - s) / ((1 + s)(sqrt(1 + q^2) + q))
/// ```
pub fn k_constant<T: Real>(rho: T) -> Result<T> {
    if !(rho > T::zero() && rho <= T::one()) {
        return domain(format!("k_constant needs 0 < rho <= 1, got {rho:?}"));
    }
    let s = ((T::one() - rho) * (T::one() + rho)).sqrt();
    let q = s / (T::one() - s);
    Ok((T::one() - s) / ((T::one() + s) * (q.hypot(T::one()) + q)))
}

/// `(1 + s)/(1 - s)` with `s = sqrt(1 - ρ^2)`, the reference argument of `h`.
pub fn angle_modulus_argument<T: Real>(rho: T) -> Result<T> {
    if !(rho > T::zero() && rho <= T::one()) {
        return domain(format!("angle argument needs 0 < rho <= 1, got {rho:?}"));
    }
    let s = ((T::one() - rho) * (T::one() + rho)).sqrt();
    Ok((T::one() + s) / (T::one() - s))
}
