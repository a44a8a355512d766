use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};
use crate::Ext;

/// Length of the `n`-th law-indexed curve (`n >= 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LengthLaw {
    /// `exp(-rate * n)`.
    ExpLinear { rate: f64 },
    /// `exp(-2^n)`.
    ExpDouble,
    Constant { value: f64 },
    /// `slope * n`.
    Linear { slope: f64 },
    Table { values: Vec<Ext> },
}

impl LengthLaw {
    pub fn exp_linear() -> Self {
        LengthLaw::ExpLinear { rate: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = match self {
            LengthLaw::ExpLinear { rate } => !(*rate > 0.0 && rate.is_finite()),
            LengthLaw::ExpDouble => false,
            LengthLaw::Constant { value } => !(*value > 0.0 && value.is_finite()),
            LengthLaw::Linear { slope } => !(*slope > 0.0 && slope.is_finite()),
            LengthLaw::Table { values } => values.is_empty() || values.iter().any(|v| v.is_zero()),
        };
        if bad {
            return Err(FnsError::Config(format!("invalid length law {self:?}")));
        }
        Ok(())
    }

    pub fn length(&self, n: usize) -> Result<Ext> {
        if n == 0 {
            return Err(FnsError::Range("law indices start at 1".into()));
        }
        Ok(match self {
            LengthLaw::ExpLinear { rate } => Ext::from_ln(-rate * n as f64),
            LengthLaw::ExpDouble => {
                if n > 62 {
                    return Err(FnsError::Range(format!("exp(-2^{n}) exceeds the exponent range")));
                }
                Ext::from_ln(-(2f64.powi(n as i32)))
            }
            LengthLaw::Constant { value } => Ext::from_float(*value),
            LengthLaw::Linear { slope } => Ext::from_float(slope * n as f64),
            LengthLaw::Table { values } => *values
                .get(n - 1)
                .ok_or_else(|| FnsError::Range(format!("table has no entry {n}")))?,
        })
    }

    /// `|ln l_n|`, available beyond the representable range of `length`.
    pub fn abs_ln(&self, n: usize) -> Result<f64> {
        match self {
            LengthLaw::ExpLinear { rate } => Ok(rate * n as f64),
            LengthLaw::ExpDouble => Ok(2f64.powi(n.min(2000) as i32)),
            _ => Ok(self.length(n)?.ln().abs()),
        }
    }

    /// `ln |ln l_n|`.
    pub fn ln_abs_ln(&self, n: usize) -> Result<f64> {
        match self {
            LengthLaw::ExpLinear { rate } => Ok((rate * n as f64).ln()),
            LengthLaw::ExpDouble => Ok(n as f64 * std::f64::consts::LN_2),
            _ => Ok(self.abs_ln(n)?.ln()),
        }
    }

    /// Supremum over all indices; `None` when unbounded.
    pub fn sup(&self) -> Option<f64> {
        match self {
            LengthLaw::ExpLinear { rate } => Some((-rate).exp()),
            LengthLaw::ExpDouble => Some((-2f64).exp()),
            LengthLaw::Constant { value } => Some(*value),
            LengthLaw::Linear { .. } => None,
            LengthLaw::Table { values } => values.iter().max().map(|v| v.to_float()),
        }
    }

    /// Positive infimum over all indices, if any.
    pub fn inf_positive(&self) -> Option<f64> {
        match self {
            LengthLaw::ExpLinear { .. } | LengthLaw::ExpDouble => None,
            LengthLaw::Constant { value } => Some(*value),
            LengthLaw::Linear { slope } => Some(*slope),
            LengthLaw::Table { values } => values.iter().min().map(|v| v.to_float()),
        }
    }

    /// Whether the law certifies `l_n -> 0`.
    pub fn tends_to_zero(&self) -> bool {
        matches!(self, LengthLaw::ExpLinear { .. } | LengthLaw::ExpDouble)
    }
}

/// Twist attached to the `n`-th law-indexed curve, possibly in terms of its length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TwistLaw {
    Zero,
    /// `ln |ln l_n|`.
    LogLog,
    /// `factor * |ln l_n|`.
    LogScaled { factor: f64 },
    /// `exp(rate * n)`.
    Exp { rate: f64 },
    /// `slope * n`.
    Linear { slope: f64 },
    Table { values: Vec<f64> },
}

impl TwistLaw {
    pub fn value(&self, n: usize, len: &LengthLaw) -> Result<f64> {
        Ok(match self {
            TwistLaw::Zero => 0.0,
            TwistLaw::LogLog => len.ln_abs_ln(n)?,
            TwistLaw::LogScaled { factor } => factor * len.abs_ln(n)?,
            TwistLaw::Exp { rate } => (rate * n as f64).exp(),
            TwistLaw::Linear { slope } => slope * n as f64,
            TwistLaw::Table { values } => *values
                .get(n.checked_sub(1).ok_or_else(|| FnsError::Range("law indices start at 1".into()))?)
                .ok_or_else(|| FnsError::Range(format!("table has no entry {n}")))?,
        })
    }

    /// `ln |value|` without overflow; `-inf` for zero.
    pub fn ln_abs(&self, n: usize, len: &LengthLaw) -> Result<f64> {
        match self {
            TwistLaw::Exp { rate } => Ok(rate * n as f64),
            TwistLaw::LogScaled { factor } => Ok(factor.abs().ln() + len.ln_abs_ln(n)?),
            _ => Ok(self.value(n, len)?.abs().ln()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_laws() {
        let l = LengthLaw::exp_linear();
        assert!((l.length(4).unwrap().ln() + 4.0).abs() < 1e-14);
        let d = LengthLaw::ExpDouble;
        let c39 = d.length(39).unwrap();
        assert!((c39.ln() + 2f64.powi(39)).abs() < 1e-3);
        assert!(c39.exponent() < -(2f64.powi(39) / std::f64::consts::LN_2) as i64 + 2);
        assert!(l.length(0).is_err());
        assert_eq!(LengthLaw::Linear { slope: 1.0 }.sup(), None);
        assert!(LengthLaw::ExpDouble.tends_to_zero());
    }

    #[test]
    fn twist_laws() {
        let l = LengthLaw::exp_linear();
        assert!((TwistLaw::LogLog.value(10, &l).unwrap() - 10f64.ln()).abs() < 1e-14);
        assert_eq!(TwistLaw::LogScaled { factor: 1.0 }.value(7, &l).unwrap(), 7.0);
        assert_eq!(TwistLaw::Exp { rate: 1.0 }.ln_abs(1000, &l).unwrap(), 1000.0);
    }
}
