//! Integer search for the failure-minimizing odd code dimensions.
//!
//! The closed-form estimates predict real-valued optimal dimensions; the true
//! optimum is found by evaluating the exact combined failure probability on
//! every odd pair inside a multiplicative window around that seed. The
//! objective evaluations are two binomial tails each, cheap enough that the
//! exhaustive scan is certifiable and trivially parallel.

use crate::asymptotic::biased_dims;
use crate::bs2d::{combined_fail, x_fail_exact, z_fail_exact, CodeShape2D, FailureReport, NoiseModel};
use crate::error::{Error, Result};
use crate::logprob::LogProb;
use crate::{asymptotic, bs2d};
use rayon::prelude::*;

/// Window for the integer search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Real-valued (m, n) seed, normally the asymptotic prediction.
    pub center: (f64, f64),
    /// Multiplicative half-width: the window is `[center/span, center*span]`.
    pub span_factor: f64,
    /// Hard cap on either dimension.
    pub max_dim: u64,
}

pub const DEFAULT_SPAN_FACTOR: f64 = 3.0;
pub const DEFAULT_MAX_DIM: u64 = 40_001;

impl SearchConfig {
    pub fn new(center: (f64, f64), span_factor: f64, max_dim: u64) -> Result<Self> {
        if !(span_factor > 1.0) {
            return Err(Error::OutOfRange {
                name: "span_factor",
                value: span_factor,
                requirement: "must exceed 1",
            });
        }
        if max_dim < 3 {
            return Err(Error::TooSmall {
                name: "max_dim",
                value: max_dim,
                min: 3,
            });
        }
        if !(center.0 >= 1.0 && center.1 >= 1.0 && center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::OutOfRange {
                name: "center",
                value: center.0.min(center.1),
                requirement: "seed dimensions must be finite and >= 1",
            });
        }
        Ok(SearchConfig {
            center,
            span_factor,
            max_dim,
        })
    }

    /// Seeds the window from the closed-form optimum for this noise model.
    ///
    /// For bias below one the roles of the two axes are mirrored before
    /// solving, since the closed form assumes `p_z >= p_x`.
    pub fn for_noise(noise: &NoiseModel, span_factor: f64, max_dim: u64) -> Result<Self> {
        let (p_x, p_z) = (noise.p_x(), noise.p_z());
        if p_x <= 0.0 || p_z <= 0.0 {
            return Err(Error::OutOfRange {
                name: "noise",
                value: p_x.min(p_z),
                requirement: "optimizer requires p_x, p_z in (0, 0.5)",
            });
        }
        let bias = p_z / p_x;
        let center = if bias >= 1.0 {
            let d = biased_dims(p_z, bias)?;
            (d.m_real, d.n_real)
        } else {
            let d = biased_dims(p_x, 1.0 / bias)?;
            (d.n_real, d.m_real)
        };
        SearchConfig::new((center.0.max(1.0), center.1.max(1.0)), span_factor, max_dim)
    }
}

/// Result of the windowed integer search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumResult {
    pub m: u64,
    pub n: u64,
    pub report: FailureReport,
    /// Set when the argmin touches the window edge; the caller should widen
    /// the span (or raise `max_dim`) and re-run.
    pub boundary_hit: bool,
}

/// What the integer search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Probability of any logical error, `zf + xf - zf*xf`.
    Combined,
    /// The larger of the two per-type failure probabilities.
    WorstType,
}

fn odd_at_most(v: u64) -> u64 {
    if v % 2 == 0 {
        v.saturating_sub(1)
    } else {
        v
    }
}

fn odd_at_least(v: u64) -> u64 {
    if v % 2 == 0 {
        v + 1
    } else {
        v
    }
}

fn window(center: f64, span: f64, max_dim: u64) -> (u64, u64) {
    let lo = odd_at_least(((center / span).floor() as u64).max(1));
    let hi = odd_at_most(((center * span).ceil() as u64).min(max_dim)).max(lo);
    (lo, hi)
}

/// Exhaustively evaluates every odd `(m, n)` pair in the window and returns
/// the minimizer. Ties are broken by smaller block size `m*n`, then smaller
/// `m`; the parallel reduction uses the same total order as a serial scan, so
/// the result is independent of thread count.
pub fn optimize_shape(noise: &NoiseModel, cfg: &SearchConfig) -> Result<OptimumResult> {
    optimize_shape_with(noise, cfg, Objective::Combined)
}

/// As `optimize_shape`, with an explicit objective.
pub fn optimize_shape_with(
    noise: &NoiseModel,
    cfg: &SearchConfig,
    objective: Objective,
) -> Result<OptimumResult> {
    if noise.p_x() <= 0.0 || noise.p_z() <= 0.0 {
        return Err(Error::OutOfRange {
            name: "noise",
            value: noise.p_x().min(noise.p_z()),
            requirement: "optimizer requires p_x, p_z in (0, 0.5)",
        });
    }
    let (m_lo, m_hi) = window(cfg.center.0, cfg.span_factor, cfg.max_dim);
    let (n_lo, n_hi) = window(cfg.center.1, cfg.span_factor, cfg.max_dim);
    if m_lo > m_hi || n_lo > n_hi {
        return Err(Error::EmptyWindow {
            detail: format!(
                "m in [{m_lo}, {m_hi}], n in [{n_lo}, {n_hi}] from center {:?}",
                cfg.center
            ),
        });
    }

    let ns: Vec<u64> = (n_lo..=n_hi).step_by(2).collect();
    // The column-parity rate only depends on n; hoist it out of the pair loop.
    let z_rates: Vec<f64> = ns
        .iter()
        .map(|&n| crate::repcode::odd_prob(noise.p_z(), n))
        .collect::<Result<_>>()?;

    // Candidate key: (objective ln, block size, m). Lexicographic min.
    let best = (m_lo..=m_hi)
        .step_by(2)
        .par_bridge()
        .map(|m| -> Result<(f64, u64, u64, u64)> {
            let x_rate = crate::repcode::odd_prob(noise.p_x(), m)?;
            let xf_for_m = crate::repcode::BitErrorRate::new(x_rate)?;
            let mut local: Option<(f64, u64, u64, u64)> = None;
            for (i, &n) in ns.iter().enumerate() {
                let zf = crate::repcode::rep_fail_exact(
                    crate::repcode::BitErrorRate::new(z_rates[i])?,
                    m,
                )?;
                let xf = crate::repcode::rep_fail_exact(xf_for_m, n)?;
                let score = match objective {
                    Objective::Combined => combined_fail(zf, xf).ln_value(),
                    Objective::WorstType => zf.ln_value().max(xf.ln_value()),
                };
                let key = (score, m * n, m, n);
                if local.map_or(true, |b| candidate_lt(key, b)) {
                    local = Some(key);
                }
            }
            Ok(local.expect("window nonempty"))
        })
        .try_reduce_with(|a, b| Ok(if candidate_lt(a, b) { a } else { b }))
        .transpose()?
        .ok_or_else(|| Error::EmptyWindow {
            detail: "no candidates evaluated".into(),
        })?;

    let (_, _, m, n) = best;
    let shape = CodeShape2D::new(m, n)?;
    let report = bs2d::failure_report(noise, shape)?;
    let boundary_hit = (m == m_lo && m_lo > 1) || m == m_hi || (n == n_lo && n_lo > 1) || n == n_hi;
    Ok(OptimumResult {
        m,
        n,
        report,
        boundary_hit,
    })
}

fn candidate_lt(a: (f64, u64, u64, u64), b: (f64, u64, u64, u64)) -> bool {
    (a.0, a.1, a.2, a.3) < (b.0, b.1, b.2, b.3)
}

/// One row of a parameter sweep: the exact integer optimum next to the
/// closed-form estimate and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p_z: f64,
    pub p_x: f64,
    pub bias: f64,
    pub m: u64,
    pub n: u64,
    /// ln of the exact combined failure at the integer optimum.
    pub ln_fail_opt: f64,
    /// ln of the combined closed-form estimate.
    pub ln_fail_estimate: f64,
    /// estimate / exact, in linear domain.
    pub ratio: f64,
    pub boundary_hit: bool,
}

/// Combined closed-form estimate for a noise point: the symmetric formula at
/// unit bias, the prefactor form otherwise.
pub fn combined_estimate(noise: &NoiseModel) -> Result<LogProb> {
    let bias = noise.bias().ok_or(Error::OutOfRange {
        name: "p_x",
        value: 0.0,
        requirement: "estimate requires p_x > 0",
    })?;
    if bias == 1.0 {
        let f = asymptotic::unbiased_optimal(noise.p_z())?.ln_fail;
        Ok(combined_fail(f, f))
    } else if bias > 1.0 {
        Ok(asymptotic::biased_fail_estimate(noise.p_z(), bias, true, false)?.combined)
    } else {
        // Mirrored noise has the same combined failure.
        Ok(asymptotic::biased_fail_estimate(noise.p_x(), 1.0 / bias, true, false)?.combined)
    }
}

/// Runs the optimizer over a grid of noise points. Deterministic: rows come
/// back in input order regardless of parallelism.
pub fn sweep(points: &[NoiseModel], span_factor: f64, max_dim: u64) -> Result<Vec<SweepRow>> {
    if points.is_empty() {
        return Err(Error::EmptyWindow {
            detail: "sweep grid is empty".into(),
        });
    }
    points
        .iter()
        .map(|noise| {
            let cfg = SearchConfig::for_noise(noise, span_factor, max_dim)?;
            let opt = optimize_shape(noise, &cfg)?;
            let estimate = combined_estimate(noise)?;
            let ln_exact = opt.report.combined.ln_value();
            let ln_est = estimate.ln_value();
            Ok(SweepRow {
                p_z: noise.p_z(),
                p_x: noise.p_x(),
                bias: noise.bias().unwrap_or(f64::INFINITY),
                m: opt.m,
                n: opt.n,
                ln_fail_opt: ln_exact,
                ln_fail_estimate: ln_est,
                ratio: (ln_est - ln_exact).exp(),
                boundary_hit: opt.boundary_hit,
            })
        })
        .collect()
}
