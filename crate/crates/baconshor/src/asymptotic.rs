//! Lambert-W machinery and closed-form estimates of the optimal code size
//! and failure probability, for unbiased and for highly biased noise.

use crate::bs2d::FailureReport;
use crate::error::{Error, Result};
use crate::logprob::LogProb;

/// Relative residual target for the Lambert-W solver.
const LAMBERT_TOL: f64 = 1e-13;

/// Principal-branch Lambert W for `z >= 0`: the `w >= 0` with `w*e^w = z`.
///
/// Halley iteration from a series-based initial guess, safeguarded by a
/// shrinking bracket so convergence is unconditional. The residual satisfies
/// `|w*e^w - z| <= 1e-12 * max(1, z)`.
pub fn lambert_w(z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::OutOfRange {
            name: "z",
            value: z,
            requirement: "principal branch requires z >= 0",
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }

    // Bracket: f(w) = w e^w - z has f(0) < 0, and w = max(1, ln z) gives
    // f >= 0 since ln z * z >= z for z >= e.
    let mut lo = 0.0f64;
    let mut hi = z.ln().max(1.0);

    let mut w = if z > std::f64::consts::E {
        // Three-term asymptotic expansion as the starting point.
        let l1 = z.ln();
        let l2 = l1.ln();
        (l1 - l2 + l2 / l1).clamp(lo, hi)
    } else {
        // Near zero W(z) ~ z/(1+z); adequate anywhere on (0, e].
        (z / (1.0 + z)).clamp(lo, hi)
    };

    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= LAMBERT_TOL * z.max(1.0) {
            return Ok(w);
        }
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        // Halley step for f(w) = w e^w - z.
        let fp = ew * (w + 1.0);
        let fpp = ew * (w + 2.0);
        let denom = fp - 0.5 * f * fpp / fp;
        let mut next = w - f / denom;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if next == w {
            break;
        }
        w = next;
    }
    Ok(w)
}

/// Three-term asymptotic expansion of `W` at a large argument:
/// `ln s - ln ln s + ln ln s / ln s`, for `s > e`.
pub fn lambert_w_series(sqrt_b: f64) -> Result<f64> {
    if !(sqrt_b > std::f64::consts::E) {
        return Err(Error::OutOfRange {
            name: "sqrt_b",
            value: sqrt_b,
            requirement: "series requires sqrt_b > e",
        });
    }
    let l1 = sqrt_b.ln();
    let l2 = l1.ln();
    Ok(l1 - l2 + l2 / l1)
}

/// `A = ln^2(2)/8`, the coefficient of `1/p` in the optimal unbiased
/// log-failure probability.
pub fn unbiased_coefficient_a() -> f64 {
    let ln2 = std::f64::consts::LN_2;
    ln2 * ln2 / 8.0
}

/// `C = ln[(2/(pi ln 2))^(1/2) exp(ln^2(2)/8)]`, the constant term.
pub fn unbiased_coefficient_c() -> f64 {
    0.5 * (2.0 / (std::f64::consts::PI * std::f64::consts::LN_2)).ln() + unbiased_coefficient_a()
}

/// Closed-form optimum for unbiased noise (`p_x = p_z = p`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnbiasedOptimum {
    pub p: f64,
    /// Real-valued optimal linear size, `ln 2 / (4p)`.
    pub n_real: f64,
    /// Estimated per-type failure probability at the optimum.
    pub ln_fail: LogProb,
    /// Coefficient of `-1/p` in the log failure probability.
    pub coeff_a: f64,
    /// Coefficient of `ln p` (exactly 1/2).
    pub coeff_b: f64,
    /// Constant term; `exp(C)` is the prefactor multiplying `sqrt(p)`.
    pub coeff_c: f64,
}

/// Evaluates the optimal-code estimate
/// `(2/(pi ln2))^(1/2) exp(ln^2(2)/8) * sqrt(p) * exp(-ln^2(2)/(8p))`
/// together with the real-valued optimal size `n = ln2/(4p)`.
pub fn unbiased_optimal(p: f64) -> Result<UnbiasedOptimum> {
    if !(p > 0.0 && p < 0.1) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            requirement: "estimate is for 0 < p < 0.1",
        });
    }
    let a = unbiased_coefficient_a();
    let c = unbiased_coefficient_c();
    let ln_fail = -a / p + 0.5 * p.ln() + c;
    Ok(UnbiasedOptimum {
        p,
        n_real: std::f64::consts::LN_2 / (4.0 * p),
        ln_fail: LogProb::from_ln(ln_fail)?,
        coeff_a: a,
        coeff_b: 0.5,
        coeff_c: c,
    })
}

/// Solution of the constrained minimization for biased noise, in the scaled
/// variables `Z = 4 p_z n` and `X = 4 p_x m`.
///
/// At the optimum `Z e^Z = sqrt(b)`, `X = e^{-Z} = Z/sqrt(b)`, and the
/// objective `F = Z ln X` attains `F_min = -Z^2`. The Lagrange multiplier is
/// eliminated analytically, so only the closure variables are carried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedSolution {
    pub bias: f64,
    pub z: f64,
    pub x: f64,
}

impl BiasedSolution {
    /// Optimal aspect ratio `m/n = sqrt(b)`.
    pub fn aspect_ratio(&self) -> f64 {
        self.bias.sqrt()
    }

    /// Minimum of the objective `F = Z ln X`, equal to `-Z^2`.
    pub fn f_min(&self) -> f64 {
        -self.z * self.z
    }

    /// Leading term of the optimal log failure probability,
    /// `-W^2(sqrt b) / (8 p_z)`.
    pub fn leading_ln_fail(&self, p_z: f64) -> f64 {
        self.f_min() / (8.0 * p_z)
    }
}

/// Solves `Z e^Z = sqrt(b)` for the scaled optimum under bias `b >= 1`.
pub fn biased_solution(bias: f64) -> Result<BiasedSolution> {
    if !(bias >= 1.0) {
        return Err(Error::OutOfRange {
            name: "bias",
            value: bias,
            requirement: "biased solution requires b >= 1",
        });
    }
    let sqrt_b = bias.sqrt();
    let z = lambert_w(sqrt_b)?;
    Ok(BiasedSolution {
        bias,
        z,
        x: z / sqrt_b,
    })
}

/// Real-valued optimal code dimensions for biased noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedDims {
    pub m_real: f64,
    pub n_real: f64,
}

/// `n = W(sqrt b)/(4 p_z)` and `m = sqrt(b) W(sqrt b)/(4 p_z)`.
pub fn biased_dims(p_z: f64, bias: f64) -> Result<BiasedDims> {
    if !(p_z > 0.0 && p_z < 0.5) {
        return Err(Error::OutOfRange {
            name: "p_z",
            value: p_z,
            requirement: "must lie in (0, 0.5)",
        });
    }
    let sol = biased_solution(bias)?;
    let n_real = sol.z / (4.0 * p_z);
    Ok(BiasedDims {
        m_real: sol.aspect_ratio() * n_real,
        n_real,
    })
}

/// Closed-form failure estimate at the biased optimum.
///
/// The base form is the exponentiated pair
/// `Z-type: (1 - Z/sqrt(b))^(sqrt(b) Z/(8 p_z))` and
/// `X-type: (1 - exp(-e^{-Z}))^(Z/(8 p_z))`.
/// With `with_prefactors` the Z-type is multiplied by
/// `(2 p_z/pi)^(1/2) Z^{-1} e^{Z^3/8}` and the X-type by
/// `(2 p_z/pi)^(1/2) b^{-1/4}`. With `resummed_correction` the factor
/// `e^{Z^3/8}` is replaced by `exp(Z^2 (1 - e^{-p_z Z})/(8 p_z))`, which sums
/// the `p_z Z` corrections to all orders (only meaningful when prefactors are
/// on).
pub fn biased_fail_estimate(
    p_z: f64,
    bias: f64,
    with_prefactors: bool,
    resummed_correction: bool,
) -> Result<FailureReport> {
    if !(p_z > 0.0 && p_z < 0.5) {
        return Err(Error::OutOfRange {
            name: "p_z",
            value: p_z,
            requirement: "must lie in (0, 0.5)",
        });
    }
    let sol = biased_solution(bias)?;
    let (z, sqrt_b) = (sol.z, bias.sqrt());

    let mut ln_zf = (sqrt_b * z / (8.0 * p_z)) * (-z / sqrt_b).ln_1p();
    let mut ln_xf = (z / (8.0 * p_z)) * (-(-(-z).exp()).exp()).ln_1p();
    if with_prefactors {
        let common = 0.5 * (2.0 * p_z / std::f64::consts::PI).ln();
        let z_correction = if resummed_correction {
            z * z * (-f64::exp_m1(-p_z * z)) / (8.0 * p_z)
        } else {
            z * z * z / 8.0
        };
        ln_zf += common - z.ln() + z_correction;
        ln_xf += common - 0.25 * bias.ln();
    }
    Ok(FailureReport::new(
        LogProb::from_ln(ln_zf.min(0.0))?,
        LogProb::from_ln(ln_xf.min(0.0))?,
    ))
}
