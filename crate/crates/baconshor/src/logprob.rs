//! Probabilities carried in the natural-log domain.
//!
//! Optimal code-block failure probabilities reach 1e-28 and below, and the
//! binomial tails behind them involve terms far smaller still, so every
//! probability in this crate is stored as its natural logarithm. Probability
//! zero is represented by `ln = -inf`.

use crate::error::{Error, Result};

/// A probability stored as its natural logarithm (`ln <= 0`).
///
/// Ordering of `LogProb` values equals ordering of the underlying
/// probabilities; `LogProb::ZERO` (ln = -inf) sorts below everything else.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

/// `ln` values this close above zero are treated as rounding residue of an
/// exact probability 1 and clamped; anything larger is rejected.
const LN_ONE_SLACK: f64 = 1e-12;

impl LogProb {
    /// Probability zero.
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    /// Probability one.
    pub const ONE: LogProb = LogProb(0.0);

    /// Wraps a natural-log value, requiring `ln <= 0` up to rounding residue.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln > LN_ONE_SLACK {
            return Err(Error::OutOfRange {
                name: "ln_value",
                value: ln,
                requirement: "must satisfy ln <= 0 (a probability)",
            });
        }
        Ok(LogProb(ln.min(0.0)))
    }

    /// Converts a linear-domain probability in `[0, 1]`.
    pub fn from_prob(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "probability",
                value: p,
                requirement: "must lie in [0, 1]",
            });
        }
        Ok(LogProb(p.ln()))
    }

    /// The natural logarithm of the probability (`-inf` for zero).
    pub fn ln_value(self) -> f64 {
        self.0
    }

    /// The linear-domain probability. Underflows to `0.0` below ~1e-308.
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Probability that at least one of two independent events occurs:
    /// `p + q - p*q`, evaluated without cancellation for small inputs.
    pub fn union_independent(self, other: LogProb) -> LogProb {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        // p + q - p*q = s * (1 - pq/s) with s = p + q; pq/s <= min(p,q) <= 1.
        let s = log_sum_exp(self.0, other.0);
        let correction = (self.0 + other.0 - s).exp();
        LogProb((s + (-correction).ln_1p()).min(0.0))
    }
}

/// `ln(exp(a) + exp(b))` without overflow or underflow.
pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_matches_probabilities() {
        let a = LogProb::from_prob(0.1).unwrap();
        let b = LogProb::from_prob(0.2).unwrap();
        assert!(a < b);
        assert!(LogProb::ZERO < a);
        assert!(b < LogProb::ONE);
    }

    #[test]
    fn rejects_positive_ln() {
        assert!(LogProb::from_ln(0.5).is_err());
        assert!(LogProb::from_ln(f64::NAN).is_err());
        assert_eq!(LogProb::from_ln(5e-13).unwrap(), LogProb::ONE);
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(LogProb::from_prob(-0.1).is_err());
        assert!(LogProb::from_prob(1.5).is_err());
    }

    #[test]
    fn union_inclusion_exclusion() {
        let a = LogProb::from_prob(0.1).unwrap();
        let b = LogProb::from_prob(0.2).unwrap();
        let c = a.union_independent(b);
        assert!((c.prob() - 0.28).abs() < 1e-15);
    }

    #[test]
    fn union_with_zero_is_identity() {
        let x = LogProb::from_prob(0.37).unwrap();
        assert_eq!(LogProb::ZERO.union_independent(x), x);
        assert_eq!(x.union_independent(LogProb::ZERO), x);
    }

    #[test]
    fn union_tiny_magnitudes_without_cancellation() {
        // 5.9e-20 + 1.1e-19: the cross term is ~6.5e-39 and must not disturb
        // the leading digits.
        let a = LogProb::from_ln((5.9e-20f64).ln()).unwrap();
        let b = LogProb::from_ln((1.1e-19f64).ln()).unwrap();
        let c = a.union_independent(b);
        let expected = (5.9e-20f64 + 1.1e-19).ln();
        assert!((c.ln_value() - expected).abs() < 1e-12);
    }

    #[test]
    fn union_of_ones_is_one() {
        assert_eq!(LogProb::ONE.union_independent(LogProb::ONE), LogProb::ONE);
    }

    #[test]
    fn union_bounds() {
        // max(p, q) <= union <= p + q for a spread of magnitudes.
        for &la in &[-0.1, -2.0, -40.0, -300.0] {
            for &lb in &[-0.3, -7.0, -55.0, -200.0] {
                let a = LogProb::from_ln(la).unwrap();
                let b = LogProb::from_ln(lb).unwrap();
                let u = a.union_independent(b);
                assert!(u >= a.max(b));
                assert!(u.ln_value() <= log_sum_exp(la, lb) + 1e-15);
            }
        }
    }

    #[test]
    fn log_sum_exp_extremes() {
        assert_eq!(log_sum_exp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(-1000.0, f64::NEG_INFINITY), -1000.0);
        let v = log_sum_exp(-1e6, -1e6);
        assert!((v - (-1e6 + std::f64::consts::LN_2)).abs() < 1e-9);
    }
}
