use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

/// A nonnegative magnitude stored as its natural logarithm.
///
/// Zero is represented by `-∞`. Products become sums of logs, so weights
/// like `k^{|α|}` or `δ_n^{-n}` are combined without overflow. Serializes
/// as the log value, `null` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub struct LogMagnitude(f64);

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude(f64::NEG_INFINITY);
    pub const ONE: LogMagnitude = LogMagnitude(0.0);

    /// Log of `|m|`.
    pub fn from_magnitude(m: f64) -> Self {
        let m = m.abs();
        if m == 0.0 {
            Self::ZERO
        } else {
            Self(m.ln())
        }
    }

    /// Panics on NaN.
    pub fn from_log(log_value: f64) -> Self {
        assert!(!log_value.is_nan(), "log magnitude must not be NaN");
        Self(log_value)
    }

    pub fn log_value(self) -> f64 {
        self.0
    }

    /// `exp(log_value)`; may be `+∞` when the magnitude exceeds `f64::MAX`.
    pub fn magnitude(self) -> f64 {
        self.0.exp()
    }

    /// The magnitude when it is nonzero and representable as a finite `f64`.
    pub fn finite_magnitude(self) -> Option<f64> {
        let m = self.magnitude();
        (m > 0.0 && m.is_finite()).then_some(m)
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    /// Multiply by `e^{log_factor}`.
    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::from_log(self.0 + log_factor)
        }
    }
}

impl Mul for LogMagnitude {
    type Output = LogMagnitude;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            Self::ZERO
        } else {
            Self::from_log(self.0 + rhs.0)
        }
    }
}

impl Eq for LogMagnitude {}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogMagnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<Option<f64>> for LogMagnitude {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Self::ZERO, Self::from_log)
    }
}

impl From<LogMagnitude> for Option<f64> {
    fn from(v: LogMagnitude) -> Self {
        (!v.is_zero()).then_some(v.0)
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "exp({})", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_magnitude() {
        for m in [1e-300, 3.5e-7, 1.0, 2.0, 6.02e23, 1e300] {
            let lm = LogMagnitude::from_magnitude(m);
            assert!((lm.magnitude() - m).abs() <= 1e-12 * m, "{m}");
        }
        assert!(LogMagnitude::from_magnitude(0.0).is_zero());
        assert_eq!(
            LogMagnitude::from_magnitude(-3.0),
            LogMagnitude::from_magnitude(3.0)
        );
    }

    #[test]
    fn zero_absorbs_products() {
        let z = LogMagnitude::ZERO;
        assert!((z * LogMagnitude::from_log(1e6)).is_zero());
        assert!(z.scale_log(50.0).is_zero());
        assert!(z < LogMagnitude::from_log(-1e300));
    }

    #[test]
    fn huge_products_stay_finite() {
        // 40^40 · 10^300 is far beyond f64 but fine as a log.
        let a = LogMagnitude::from_log(40.0 * 40f64.ln());
        let b = LogMagnitude::from_magnitude(1e300);
        let p = a * b;
        assert!(p.log_value().is_finite());
        assert_eq!(p.finite_magnitude(), None);
    }

    #[test]
    fn json_uses_null_for_zero() {
        assert_eq!(serde_json::to_string(&LogMagnitude::ZERO).unwrap(), "null");
        assert_eq!(serde_json::to_string(&LogMagnitude::ONE).unwrap(), "0.0");
        let back: LogMagnitude = serde_json::from_str("null").unwrap();
        assert!(back.is_zero());
    }
}
