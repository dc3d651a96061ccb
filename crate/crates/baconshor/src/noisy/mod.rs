//! Repetition-code recovery with noisy syndrome measurements: analytic
//! failure-rate upper bounds, self-avoiding walk/cycle enumeration behind the
//! combinatorial bound, and a spacetime minimum-weight-matching decoder
//! simulation.

mod matching;
mod saw;
mod simulate;

pub use matching::{cylinder_distance, mwpm, SpacetimeCoord};
pub use saw::{sac_count, saw_count, SAC_MAX_LEN, SAW_MAX_LEN};
pub use simulate::{
    decode_history, spacetime_simulate, MatchResult, SpacetimeEdge, SpacetimeHistory,
    SpacetimeSummary,
};

use crate::bs2d::{CodeShape2D, NoiseModel};
use crate::error::{Error, Result};
use crate::repcode::odd_prob;

/// Connective constant of self-avoiding walks on the square lattice.
pub const CONNECTIVE_CONSTANT: f64 = 2.6381585;
/// Subleading exponent in the walk-count growth law.
pub const SAW_EXPONENT: f64 = 11.0 / 32.0;
/// Amplitude of the walk-count growth law.
pub const SAW_AMPLITUDE: f64 = 1.17704;

/// Per-round error probabilities of the idealized noisy-syndrome model: each
/// data bit and each syndrome bit of the Z-protecting repetition code flips
/// independently with `p_tilde_z` per measurement round (and likewise
/// `p_tilde_x` for the X-protecting code).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySyndromeModel {
    pub p_tilde_z: f64,
    pub p_tilde_x: f64,
}

impl NoisySyndromeModel {
    pub fn new(p_tilde_z: f64, p_tilde_x: f64) -> Result<Self> {
        for (name, p) in [("p_tilde_z", p_tilde_z), ("p_tilde_x", p_tilde_x)] {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::OutOfRange {
                    name,
                    value: p,
                    requirement: "must lie in [0, 0.5]",
                });
            }
        }
        Ok(NoisySyndromeModel {
            p_tilde_z,
            p_tilde_x,
        })
    }

    /// Derives the per-round rates from the physical noise and code shape:
    /// `p_tilde_z = OddProb(p_z, n)`, `p_tilde_x = OddProb(p_x, m)`.
    pub fn from_noise(noise: &NoiseModel, shape: CodeShape2D) -> Result<Self> {
        NoisySyndromeModel::new(
            odd_prob(noise.p_z(), shape.n())?,
            odd_prob(noise.p_x(), shape.m())?,
        )
    }
}

/// Natural log of the per-unit-time logical failure rate bound
/// `gamma * m^(beta+1) * [4 mu^2 p(1-p)]^(m/2) / (1 - sqrt(4 mu^2 e^(2 beta/m) p(1-p)))`.
///
/// Returns `-inf` for `p = 0`. The bound is a rate, not a probability, and
/// can exceed one where it is loose. Errors with `DivergentBound` when the
/// geometric-series argument reaches one.
pub fn fail_rate_bound(p_tilde: f64, length: u64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_tilde) {
        return Err(Error::OutOfRange {
            name: "p_tilde",
            value: p_tilde,
            requirement: "must lie in [0, 0.5]",
        });
    }
    if length == 0 || length % 2 == 0 {
        return Err(Error::NotOddPositive {
            name: "length",
            value: length,
        });
    }
    if p_tilde == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let m = length as f64;
    let mu2_4 = 4.0 * CONNECTIVE_CONSTANT * CONNECTIVE_CONSTANT;
    let core = mu2_4 * p_tilde * (1.0 - p_tilde);
    let geom_arg = core * (2.0 * SAW_EXPONENT / m).exp();
    if geom_arg >= 1.0 {
        return Err(Error::DivergentBound { argument: geom_arg });
    }
    Ok(SAW_AMPLITUDE.ln() + (SAW_EXPONENT + 1.0) * m.ln() + 0.5 * m * core.ln()
        - (-geom_arg.sqrt()).ln_1p())
}

/// Optimal scaling of the unbiased noisy-syndrome bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnbiasedNoisyOptimum {
    /// Root `y* = p*m` of `ln[mu^2(1 - e^(-4y))] + 4y/(e^(4y) - 1) = 0`.
    pub pm_star: f64,
    /// Real-valued optimal length `pm_star / p`.
    pub m_star: f64,
    /// Coefficient of `1/p` in the optimized ln failure-rate bound,
    /// `(pm_star/2) ln[mu^2 (1 - e^(-4 pm_star))]`.
    pub ln_rate_coefficient: f64,
    /// The simpler bound variant `-1/(8 mu^2 e)` obtained from
    /// `p_tilde <= p m` and `4 mu^2 p m = 1/e`.
    pub simple_variant: f64,
}

/// Minimizes the unbiased noisy-syndrome rate bound over the code length.
///
/// Requires `p` small enough that the optimal length `pm_star / p` is at
/// least 3.
pub fn unbiased_noisy_optimum(p: f64) -> Result<UnbiasedNoisyOptimum> {
    let mu2 = CONNECTIVE_CONSTANT * CONNECTIVE_CONSTANT;
    let f = |y: f64| (mu2 * (-f64::exp_m1(-4.0 * y))).ln() + 4.0 * y / f64::exp_m1(4.0 * y);
    let (mut lo, mut hi) = (1e-4, 1.0);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::Internal(
            "unbiased noisy optimum: fixed bracket does not straddle the root".into(),
        ));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pm_star = 0.5 * (lo + hi);

    if !(p > 0.0) || pm_star / p < 3.0 {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            requirement: "requires 0 < p <= pm_star/3 so the optimal length is >= 3",
        });
    }
    Ok(UnbiasedNoisyOptimum {
        pm_star,
        m_star: pm_star / p,
        ln_rate_coefficient: 0.5 * pm_star * (mu2 * (-f64::exp_m1(-4.0 * pm_star))).ln(),
        simple_variant: -1.0 / (8.0 * mu2 * std::f64::consts::E),
    })
}

/// Solution of the biased noisy-syndrome optimization in the scaled variables
/// `Z = 4 mu^2 p_z n`, `X = 4 mu^2 p_x m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyAsymptotics {
    pub bias: f64,
    /// Root of `Z = b ln^2(Z) exp(1/ln Z)` in `[1/e, 1)`.
    pub z: f64,
    /// `X = exp(-2 W(sqrt(b/(4Z))))`.
    pub x: f64,
    /// Objective minimum `F_min = Z ln X = -2 Z W(sqrt(b/(4Z)))`.
    pub f_min: f64,
    /// Lower bound on the coefficient of `1/p_z` in `-ln(failure rate)`:
    /// `Z W(sqrt(b/(4Z))) / (4 mu^2)`.
    pub a_tilde: f64,
    /// Optimal aspect ratio `m/n ~ 4 W^2(sqrt(b/(4Z)))`.
    pub aspect: f64,
}

impl NoisyAsymptotics {
    /// Ratio of the ideal-syndrome coefficient to the noisy one as given by
    /// the displayed formula `(mu^2 / 2Z) W^2(sqrt b) / W(sqrt(b/4Z))`.
    pub fn coefficient_ratio_vs_ideal(&self) -> Result<f64> {
        let w_ideal = crate::asymptotic::lambert_w(self.bias.sqrt())?;
        let w_noisy = crate::asymptotic::lambert_w((self.bias / (4.0 * self.z)).sqrt())?;
        let mu2 = CONNECTIVE_CONSTANT * CONNECTIVE_CONSTANT;
        Ok(mu2 / (2.0 * self.z) * w_ideal * w_ideal / w_noisy)
    }
}

/// Solves the biased noisy-syndrome optimum for `b >= 1`.
///
/// `Z(1) = 1/e` exactly; for larger bias the root is found by bisection on
/// `[1/e, 1)`, where the defect function is strictly decreasing.
pub fn biased_noisy_solution(bias: f64) -> Result<NoisyAsymptotics> {
    if !(bias >= 1.0) {
        return Err(Error::OutOfRange {
            name: "bias",
            value: bias,
            requirement: "requires b >= 1",
        });
    }
    let inv_e = std::f64::consts::E.recip();
    let z = if bias == 1.0 {
        inv_e
    } else {
        let g = |z: f64| bias * z.ln().powi(2) * (1.0 / z.ln()).exp() - z;
        let (mut lo, mut hi) = (inv_e, 1.0 - 1e-12);
        debug_assert!(g(lo) > 0.0 && g(hi) < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let w = crate::asymptotic::lambert_w((bias / (4.0 * z)).sqrt())?;
    let mu2 = CONNECTIVE_CONSTANT * CONNECTIVE_CONSTANT;
    Ok(NoisyAsymptotics {
        bias,
        z,
        x: (-2.0 * w).exp(),
        f_min: -2.0 * z * w,
        a_tilde: z * w / (4.0 * mu2),
        aspect: 4.0 * w * w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_zero_rate_at_zero_noise() {
        assert_eq!(fail_rate_bound(0.0, 21).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn bound_diverges_past_pole() {
        // 4 mu^2 * p(1-p) alone already exceeds one at p = 0.05.
        let err = fail_rate_bound(0.05, 21).unwrap_err();
        assert!(matches!(err, Error::DivergentBound { argument } if argument >= 1.0));
    }

    #[test]
    fn bound_frozen_value() {
        // Direct high-precision evaluation of the displayed expression at
        // p_tilde = 0.001, m = 21.
        let v = fail_rate_bound(0.001, 21).unwrap();
        assert!((v - (-33.174308983522508)).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn bound_validates_inputs() {
        assert!(fail_rate_bound(0.6, 21).is_err());
        assert!(fail_rate_bound(0.01, 20).is_err());
        assert!(fail_rate_bound(0.01, 0).is_err());
    }

    #[test]
    fn noisy_model_from_noise() {
        let noise = NoiseModel::new(0.001, 0.01).unwrap();
        let shape = CodeShape2D::new(9, 5).unwrap();
        let m = NoisySyndromeModel::from_noise(&noise, shape).unwrap();
        assert!((m.p_tilde_z - odd_prob(0.01, 5).unwrap()).abs() < 1e-16);
        assert!((m.p_tilde_x - odd_prob(0.001, 9).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn unbiased_optimum_constants() {
        let opt = unbiased_noisy_optimum(0.001).unwrap();
        assert!((opt.pm_star - 0.0139682).abs() < 1e-5);
        assert!((opt.ln_rate_coefficient - (-0.00679079)).abs() < 1e-6);
        assert!((opt.simple_variant - (-0.00660714)).abs() < 1e-6);
        assert!((opt.m_star - opt.pm_star / 0.001).abs() < 1e-12);
    }

    #[test]
    fn unbiased_optimum_rejects_large_p() {
        // pm_star / p < 3 for p = 0.01.
        assert!(unbiased_noisy_optimum(0.01).is_err());
        assert!(unbiased_noisy_optimum(0.0).is_err());
    }

    #[test]
    fn biased_solution_unit_bias_closed_form() {
        let sol = biased_noisy_solution(1.0).unwrap();
        assert_eq!(sol.z, std::f64::consts::E.recip());
        assert!((-sol.f_min - 0.3678794411714423).abs() < 1e-12);
        // W(sqrt(e/4)) = 1/2 exactly, so a_tilde(1) = 1/(8 mu^2 e).
        let mu2 = CONNECTIVE_CONSTANT * CONNECTIVE_CONSTANT;
        assert!((sol.a_tilde - 1.0 / (8.0 * mu2 * std::f64::consts::E)).abs() < 1e-9);
        assert!((sol.aspect - 1.0).abs() < 1e-10);
    }

    #[test]
    fn biased_solution_printed_table() {
        for &(b, z, minus_f) in &[
            (1e2, 0.7046, 2.01255),
            (1e4, 0.8428, 4.92966),
            (1e6, 0.8994, 8.48426),
        ] {
            let sol = biased_noisy_solution(b).unwrap();
            assert!((sol.z - z).abs() < 1e-4, "Z({b}) = {}", sol.z);
            assert!((-sol.f_min - minus_f).abs() < 1e-5, "-F_min({b}) = {}", -sol.f_min);
        }
    }

    #[test]
    fn biased_solution_constraint_residual() {
        // Z ln X = b X ln Z to relative 1e-8.
        for &b in &[1.0, 3.0, 1e2, 1e4, 1e6, 1e8] {
            let s = biased_noisy_solution(b).unwrap();
            let lhs = s.z * s.x.ln();
            let rhs = b * s.x * s.z.ln();
            assert!(
                ((lhs - rhs) / lhs.abs()).abs() <= 1e-8,
                "residual at b={b}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn biased_solution_monotonicity() {
        let mut prev_z = 0.0;
        let mut prev_at = 0.0;
        for &b in &[1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6] {
            let s = biased_noisy_solution(b).unwrap();
            assert!(s.z >= std::f64::consts::E.recip() && s.z < 1.0);
            assert!(s.z >= prev_z);
            assert!(s.a_tilde > prev_at, "a_tilde not increasing at b={b}");
            prev_z = s.z;
            prev_at = s.a_tilde;
        }
    }

    #[test]
    fn biased_solution_rejects_low_bias() {
        assert!(biased_noisy_solution(0.99).is_err());
    }

    #[test]
    fn coefficient_ratio_is_slowly_increasing() {
        let mut prev = 0.0;
        for &b in &[1e2, 1e4, 1e6] {
            let r = biased_noisy_solution(b)
                .unwrap()
                .coefficient_ratio_vs_ideal()
                .unwrap();
            assert!(r > prev);
            prev = r;
        }
    }
}
