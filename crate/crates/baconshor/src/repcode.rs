//! Failure probabilities of the classical repetition code under iid bit flips.
//!
//! A length-m repetition code decoded by majority vote fails when at least
//! (m+1)/2 bits flip. Both Bacon-Shor failure formulas are compositions of the
//! binomial tail computed here with the odd-parity probability `odd_prob`.

use crate::error::{Error, Result};
use crate::logprob::{log_sum_exp, LogProb};
use std::sync::OnceLock;

/// Per-bit flip probability of a repetition-code bit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BitErrorRate(f64);

impl BitErrorRate {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange {
                name: "bit error rate",
                value: x,
                requirement: "must lie in [0, 1]",
            });
        }
        Ok(BitErrorRate(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Probability that a run of `n` iid flips with probability `p` has odd
/// parity: `(1 - (1-2p)^n) / 2`.
///
/// For p < 1/2 the power is evaluated as `expm1(n * log1p(-2p))` so the
/// result stays accurate down to `p*n << 1`.
pub fn odd_prob(p: f64, n: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            requirement: "must lie in [0, 1]",
        });
    }
    if n == 0 {
        return Err(Error::TooSmall {
            name: "n",
            value: 0,
            min: 1,
        });
    }
    if p <= 0.5 {
        // (1-2p)^n = exp(n ln(1-2p)); 1 - that, halved, without cancellation.
        Ok(0.5 * (-f64::exp_m1(n as f64 * f64::ln_1p(-2.0 * p))))
    } else {
        // 1-2p is negative; magnitude <= 1 so the direct power is safe.
        Ok(0.5 * (1.0 - (1.0 - 2.0 * p).powi(n as i32)))
    }
}

fn require_odd(name: &'static str, m: u64) -> Result<()> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::NotOddPositive { name, value: m });
    }
    Ok(())
}

/// Exact majority-vote failure probability of a length-`m` repetition code:
/// the binomial tail `sum_{k=(m+1)/2..=m} C(m,k) x^k (1-x)^(m-k)`, in log
/// domain.
///
/// Terms are accumulated by log-sum-exp with log-binomial coefficients, so the
/// result is meaningful down to `ln ~ -1e6`. `m` must be odd: majority vote
/// has no tie-breaking convention for even lengths.
pub fn rep_fail_exact(x: BitErrorRate, m: u64) -> Result<LogProb> {
    require_odd("m", m)?;
    let x = x.value();
    if x == 0.0 {
        return Ok(LogProb::ZERO);
    }
    if x == 1.0 {
        return Ok(LogProb::ONE);
    }
    let ln_x = x.ln();
    let ln_1mx = (-x).ln_1p();
    let k0 = (m + 1) / 2;

    // First term is the largest for x < 1/2; successive term ratios are
    // bounded by rho = x/(1-x), which lets the loop stop once the geometric
    // remainder is negligible.
    let mut ln_term = ln_binomial(m, k0) + k0 as f64 * ln_x + (m - k0) as f64 * ln_1mx;
    let mut acc = ln_term;
    let ln_rho = ln_x - ln_1mx;
    for k in (k0 + 1)..=m {
        // term(k) / term(k-1) = (m-k+1)/k * x/(1-x)
        ln_term += ((m - k + 1) as f64 / k as f64).ln() + ln_rho;
        acc = log_sum_exp(acc, ln_term);
        if ln_rho < 0.0 {
            // Remaining tail < term * rho/(1-rho).
            let ln_remainder = ln_term + ln_rho - (-ln_rho.exp()).ln_1p();
            if ln_remainder < acc - 45.0 {
                break;
            }
        }
    }
    LogProb::from_ln(acc)
}

/// Large-`m` closed form for the repetition-code failure probability:
/// `sqrt(2/(pi m)) * sqrt(x(1-x)/(1-2x)^2) * [4x(1-x)]^(m/2)`.
///
/// Valid for `0 < x < 1/2` (the prefactor has a pole at `x = 1/2`); accuracy
/// improves as `1/m`.
pub fn rep_fail_asymptotic(x: BitErrorRate, m: u64) -> Result<LogProb> {
    require_odd("m", m)?;
    if m < 3 {
        return Err(Error::TooSmall {
            name: "m",
            value: m,
            min: 3,
        });
    }
    let x = x.value();
    if !(x > 0.0 && x < 0.5) {
        return Err(Error::OutOfRange {
            name: "bit error rate",
            value: x,
            requirement: "asymptotic form requires 0 < x < 1/2",
        });
    }
    let ln_x = x.ln();
    let ln_1mx = (-x).ln_1p();
    let ln = 0.5 * (2.0 / (std::f64::consts::PI * m as f64)).ln()
        + 0.5 * (ln_x + ln_1mx - 2.0 * (-2.0 * x).ln_1p())
        + m as f64 / 2.0 * (4f64.ln() + ln_x + ln_1mx);
    LogProb::from_ln(ln.min(0.0))
}

const LN_FACTORIAL_TABLE_LEN: usize = 1024;

fn ln_factorial_table() -> &'static [f64; LN_FACTORIAL_TABLE_LEN] {
    static TABLE: OnceLock<[f64; LN_FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0f64; LN_FACTORIAL_TABLE_LEN];
        // Kahan-compensated cumulative sum of ln(i).
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in 1..LN_FACTORIAL_TABLE_LEN {
            let y = (i as f64).ln() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            t[i] = sum;
        }
        t
    })
}

/// `ln(n!)`: tabulated for small `n`, Stirling series beyond the table.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACTORIAL_TABLE_LEN {
        return ln_factorial_table()[n as usize];
    }
    // Stirling series for ln Gamma(n+1); at n >= 1024 the dropped term
    // 1/(1680 n^7) is below 1e-24.
    let z = n as f64;
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    z * z.ln() - z
        + 0.5 * (2.0 * std::f64::consts::PI * z).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln C(n, k)`.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
