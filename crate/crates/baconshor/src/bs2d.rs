//! Exact failure probabilities of the 2D Bacon-Shor code, plus a seeded
//! Monte Carlo decoder simulation and a brute-force oracle for small blocks.
//!
//! The block is an `n x m` lattice (n rows of m qubits). The logical Z
//! operator acts on one row (weight m) and the logical X operator on one
//! column (weight n). Decoding reduces to classical parity counting: recovery
//! from Z errors fails when more than (m-1)/2 columns hold an odd number of
//! Z errors, and recovery from X errors fails when more than (n-1)/2 rows
//! hold an odd number of X errors.

use crate::error::{Error, Result};
use crate::logprob::LogProb;
use crate::repcode::{odd_prob, rep_fail_exact, BitErrorRate};
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Independent per-qubit error probabilities: a bit flip with probability
/// `p_x` and a phase error with probability `p_z` (both < 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    p_x: f64,
    p_z: f64,
}

impl NoiseModel {
    pub fn new(p_x: f64, p_z: f64) -> Result<Self> {
        for (name, p) in [("p_x", p_x), ("p_z", p_z)] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::OutOfRange {
                    name,
                    value: p,
                    requirement: "must lie in [0, 0.5)",
                });
            }
        }
        Ok(NoiseModel { p_x, p_z })
    }

    /// Builds the model from the dephasing rate and the bias `b = p_z/p_x`.
    pub fn from_bias(p_z: f64, bias: f64) -> Result<Self> {
        if !(bias > 0.0) {
            return Err(Error::OutOfRange {
                name: "bias",
                value: bias,
                requirement: "must be positive",
            });
        }
        NoiseModel::new(p_z / bias, p_z)
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn p_z(&self) -> f64 {
        self.p_z
    }

    /// Bias `b = p_z / p_x`; `None` when `p_x = 0`.
    pub fn bias(&self) -> Option<f64> {
        (self.p_x > 0.0).then(|| self.p_z / self.p_x)
    }
}

/// Odd block dimensions: `m` columns (Z-protection distance) by `n` rows
/// (X-protection distance).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeShape2D {
    m: u64,
    n: u64,
}

impl CodeShape2D {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        for (name, v) in [("m", m), ("n", n)] {
            if v == 0 || v % 2 == 0 {
                return Err(Error::NotOddPositive { name, value: v });
            }
        }
        Ok(CodeShape2D { m, n })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn qubits(&self) -> u64 {
        self.m * self.n
    }
}

/// Per-type and combined logical failure probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureReport {
    pub z_fail: LogProb,
    pub x_fail: LogProb,
    pub combined: LogProb,
}

impl FailureReport {
    pub fn new(z_fail: LogProb, x_fail: LogProb) -> Self {
        FailureReport {
            z_fail,
            x_fail,
            combined: combined_fail(z_fail, x_fail),
        }
    }
}

/// Probability of any logical error given independent Z-type and X-type
/// failures: `zf + xf - zf*xf`, evaluated stably in log domain.
pub fn combined_fail(zf: LogProb, xf: LogProb) -> LogProb {
    zf.union_independent(xf)
}

/// Exact logical-Z failure probability:
/// `RepFailProb(OddProb(p_z, n), m)`.
pub fn z_fail_exact(noise: &NoiseModel, shape: CodeShape2D) -> Result<LogProb> {
    let x = BitErrorRate::new(odd_prob(noise.p_z, shape.n)?)?;
    rep_fail_exact(x, shape.m)
}

/// Exact logical-X failure probability:
/// `RepFailProb(OddProb(p_x, m), n)`.
pub fn x_fail_exact(noise: &NoiseModel, shape: CodeShape2D) -> Result<LogProb> {
    let x = BitErrorRate::new(odd_prob(noise.p_x, shape.m)?)?;
    rep_fail_exact(x, shape.n)
}

/// Both failure types and their combination for one code/noise point.
pub fn failure_report(noise: &NoiseModel, shape: CodeShape2D) -> Result<FailureReport> {
    Ok(FailureReport::new(
        z_fail_exact(noise, shape)?,
        x_fail_exact(noise, shape)?,
    ))
}

/// One sampled error realization: row-major `n x m` bit grids for X and Z
/// errors. A simultaneous X and Z on one qubit (an iY error) is simply a set
/// bit in both grids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorGrid {
    rows: usize,
    cols: usize,
    pub x_errors: Vec<bool>,
    pub z_errors: Vec<bool>,
}

impl ErrorGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        ErrorGrid {
            rows,
            cols,
            x_errors: vec![false; rows * cols],
            z_errors: vec![false; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn idx(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn set_x(&mut self, row: usize, col: usize, value: bool) {
        let i = self.idx(row, col);
        self.x_errors[i] = value;
    }

    pub fn set_z(&mut self, row: usize, col: usize, value: bool) {
        let i = self.idx(row, col);
        self.z_errors[i] = value;
    }
}

/// Decoder outcome for one error grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub z_failed: bool,
    pub x_failed: bool,
}

/// Applies the parity decoding rule: Z recovery fails when the number of
/// columns with odd Z-parity exceeds (m-1)/2, X recovery fails when the
/// number of rows with odd X-parity exceeds (n-1)/2.
pub fn decode_outcome(grid: &ErrorGrid, shape: CodeShape2D) -> Result<DecodeOutcome> {
    let (rows, cols) = (shape.n as usize, shape.m as usize);
    if grid.rows != rows || grid.cols != cols {
        return Err(Error::ShapeMismatch {
            got_rows: grid.rows,
            got_cols: grid.cols,
            want_rows: rows,
            want_cols: cols,
        });
    }
    let mut odd_z_cols = 0u64;
    for col in 0..cols {
        let parity = (0..rows).fold(false, |acc, row| acc ^ grid.z_errors[row * cols + col]);
        odd_z_cols += parity as u64;
    }
    let mut odd_x_rows = 0u64;
    for row in 0..rows {
        let parity = (0..cols).fold(false, |acc, col| acc ^ grid.x_errors[row * cols + col]);
        odd_x_rows += parity as u64;
    }
    Ok(DecodeOutcome {
        z_failed: odd_z_cols > (shape.m - 1) / 2,
        x_failed: odd_x_rows > (shape.n - 1) / 2,
    })
}

/// Empirical failure rates from `trials` decoded samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub z_failures: u64,
    pub x_failures: u64,
    pub combined_failures: u64,
    pub z_rate: f64,
    pub x_rate: f64,
    pub combined_rate: f64,
    pub z_stderr: f64,
    pub x_stderr: f64,
    pub combined_stderr: f64,
}

fn binomial_stderr(successes: u64, trials: u64) -> f64 {
    let r = successes as f64 / trials as f64;
    (r * (1.0 - r) / trials as f64).sqrt()
}

/// Samples iid error grids, decodes each, and reports failure frequencies
/// with binomial standard errors.
///
/// Each trial draws from its own ChaCha stream (`set_stream(trial)`), so the
/// aggregate counts depend only on `(seed, trials)` and not on how trials are
/// split across worker threads.
pub fn monte_carlo(
    noise: &NoiseModel,
    shape: CodeShape2D,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::TooSmall {
            name: "trials",
            value: 0,
            min: 1,
        });
    }
    let (rows, cols) = (shape.n as usize, shape.m as usize);
    let bern_x = Bernoulli::new(noise.p_x).expect("validated");
    let bern_z = Bernoulli::new(noise.p_z).expect("validated");

    let (zf, xf, cf) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let mut grid = ErrorGrid::new(rows, cols);
            for bit in grid.x_errors.iter_mut() {
                *bit = bern_x.sample(&mut rng);
            }
            for bit in grid.z_errors.iter_mut() {
                *bit = bern_z.sample(&mut rng);
            }
            let out = decode_outcome(&grid, shape).expect("grid built to shape");
            (
                out.z_failed as u64,
                out.x_failed as u64,
                (out.z_failed || out.x_failed) as u64,
            )
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    Ok(MonteCarloSummary {
        trials,
        z_failures: zf,
        x_failures: xf,
        combined_failures: cf,
        z_rate: zf as f64 / trials as f64,
        x_rate: xf as f64 / trials as f64,
        combined_rate: cf as f64 / trials as f64,
        z_stderr: binomial_stderr(zf, trials),
        x_stderr: binomial_stderr(xf, trials),
        combined_stderr: binomial_stderr(cf, trials),
    })
}

/// Hard cap on `m*n` for the exhaustive oracle (~1e6 patterns per type).
pub const BRUTE_FORCE_MAX_QUBITS: u64 = 20;

/// Sums exact pattern probabilities over all `2^(mn)` Z-error patterns (and
/// independently X-error patterns), classifying each with `decode_outcome`.
///
/// This is the independent oracle for the closed-form evaluators; it shares
/// no code with the binomial-tail path beyond the decode rule itself.
pub fn brute_force_fail(noise: &NoiseModel, shape: CodeShape2D) -> Result<FailureReport> {
    let qubits = shape.qubits();
    if qubits > BRUTE_FORCE_MAX_QUBITS {
        return Err(Error::ExceedsCap {
            name: "m*n",
            value: qubits,
            cap: BRUTE_FORCE_MAX_QUBITS,
        });
    }
    let (rows, cols) = (shape.n as usize, shape.m as usize);
    let nbits = qubits as u32;

    // P(failure of one error type) depends only on that type's grid, so the
    // two sums run separately over 2^(mn) patterns each.
    let fail_prob_one_type = |p: f64, z_type: bool| -> f64 {
        let mut total = 0.0f64;
        for pattern in 0u64..(1u64 << nbits) {
            let weight = pattern.count_ones();
            let prob = p.powi(weight as i32) * (1.0 - p).powi((nbits - weight) as i32);
            let mut grid = ErrorGrid::new(rows, cols);
            for bit in 0..nbits {
                if pattern >> bit & 1 == 1 {
                    let (row, col) = (bit as usize / cols, bit as usize % cols);
                    if z_type {
                        grid.set_z(row, col, true);
                    } else {
                        grid.set_x(row, col, true);
                    }
                }
            }
            let out = decode_outcome(&grid, shape).expect("shape matches");
            if (z_type && out.z_failed) || (!z_type && out.x_failed) {
                total += prob;
            }
        }
        total
    };

    let zf = LogProb::from_prob(fail_prob_one_type(noise.p_z, true).min(1.0))?;
    let xf = LogProb::from_prob(fail_prob_one_type(noise.p_x, false).min(1.0))?;
    Ok(FailureReport::new(zf, xf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(p_x: f64, p_z: f64) -> NoiseModel {
        NoiseModel::new(p_x, p_z).unwrap()
    }

    fn shape(m: u64, n: u64) -> CodeShape2D {
        CodeShape2D::new(m, n).unwrap()
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(0.5, 0.1).is_err());
        assert!(NoiseModel::new(0.1, -0.01).is_err());
        assert_eq!(noise(0.001, 0.1).bias(), Some(100.0));
        assert_eq!(noise(0.0, 0.1).bias(), None);
    }

    #[test]
    fn shape_rejects_even_dims() {
        assert!(CodeShape2D::new(4, 3).is_err());
        assert!(CodeShape2D::new(3, 0).is_err());
    }

    #[test]
    fn zero_noise_never_fails() {
        let r = failure_report(&noise(0.0, 0.0), shape(5, 7)).unwrap();
        assert!(r.z_fail.is_zero());
        assert!(r.x_fail.is_zero());
        assert!(r.combined.is_zero());
    }

    #[test]
    fn z_fail_three_by_three_matches_oracle() {
        // OddProb(0.1, 3) = 0.244; RepFailProb(0.244, 3) = 0.149554432.
        let n = noise(0.0, 0.1);
        let s = shape(3, 3);
        let closed = z_fail_exact(&n, s).unwrap().prob();
        let oracle = brute_force_fail(&n, s).unwrap().z_fail.prob();
        assert!((closed - oracle).abs() < 1e-12 * oracle);
        assert!((closed - 0.149554432).abs() < 1e-12);
    }

    #[test]
    fn x_fail_mirrors_z_fail() {
        let s = shape(3, 3);
        let xf = x_fail_exact(&noise(0.1, 0.0), s).unwrap().prob();
        assert!((xf - 0.149554432).abs() < 1e-12);
        // Symmetric noise on a square block: both types identical.
        let n = noise(0.07, 0.07);
        let s = shape(5, 5);
        assert_eq!(
            z_fail_exact(&n, s).unwrap(),
            x_fail_exact(&n, s).unwrap()
        );
    }

    #[test]
    fn duality_swaps_shape() {
        let a = z_fail_exact(&noise(0.0, 0.13), shape(5, 9)).unwrap();
        let b = x_fail_exact(&noise(0.13, 0.0), shape(9, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn z_fail_decreases_with_m() {
        let n = noise(0.0, 0.08);
        let mut prev = LogProb::ONE;
        for m in (3..30).step_by(2) {
            let v = z_fail_exact(&n, shape(m, 7)).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn paper_scale_value() {
        let v = z_fail_exact(&noise(0.001, 0.001), shape(173, 173))
            .unwrap()
            .prob();
        assert!((v / 2.638e-28 - 1.0).abs() < 0.005);
    }

    #[test]
    fn decode_all_zero_grid() {
        let s = shape(3, 3);
        let out = decode_outcome(&ErrorGrid::new(3, 3), s).unwrap();
        assert!(!out.z_failed && !out.x_failed);
    }

    #[test]
    fn decode_full_row_of_z_is_logical() {
        // Z errors on one full row are Zbar itself: every column has odd parity.
        let s = shape(3, 3);
        let mut grid = ErrorGrid::new(3, 3);
        for col in 0..3 {
            grid.set_z(1, col, true);
        }
        let out = decode_outcome(&grid, s).unwrap();
        assert!(out.z_failed);
        assert!(!out.x_failed);
    }

    #[test]
    fn decode_single_z_is_correctable() {
        let s = shape(3, 3);
        for row in 0..3 {
            for col in 0..3 {
                let mut grid = ErrorGrid::new(3, 3);
                grid.set_z(row, col, true);
                let out = decode_outcome(&grid, s).unwrap();
                assert!(!out.z_failed && !out.x_failed);
            }
        }
    }

    #[test]
    fn decode_rejects_mismatched_grid() {
        assert!(decode_outcome(&ErrorGrid::new(3, 5), shape(3, 3)).is_err());
    }

    #[test]
    fn oracle_equivalence_small_blocks() {
        for &(m, n) in &[(1u64, 1u64), (1, 3), (3, 1), (3, 3), (1, 5), (5, 3), (3, 5)] {
            for &p in &[0.05, 0.1, 0.2] {
                let nm = noise(p, p);
                let s = shape(m, n);
                let oracle = brute_force_fail(&nm, s).unwrap();
                let zf = z_fail_exact(&nm, s).unwrap().prob();
                let xf = x_fail_exact(&nm, s).unwrap().prob();
                assert!(
                    (zf - oracle.z_fail.prob()).abs() <= 1e-12 * oracle.z_fail.prob(),
                    "z mismatch at ({m},{n},{p})"
                );
                assert!(
                    (xf - oracle.x_fail.prob()).abs() <= 1e-12 * oracle.x_fail.prob(),
                    "x mismatch at ({m},{n},{p})"
                );
            }
        }
    }

    #[test]
    fn brute_force_single_qubit_is_p() {
        let r = brute_force_fail(&noise(0.3, 0.2), shape(1, 1)).unwrap();
        assert!((r.z_fail.prob() - 0.2).abs() < 1e-15);
        assert!((r.x_fail.prob() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn brute_force_respects_cap() {
        assert!(brute_force_fail(&noise(0.1, 0.1), shape(5, 5)).is_err());
    }

    #[test]
    fn monte_carlo_zero_noise() {
        let s = monte_carlo(&noise(0.0, 0.0), shape(3, 3), 1000, 7).unwrap();
        assert_eq!(s.z_failures, 0);
        assert_eq!(s.x_failures, 0);
        assert_eq!(s.combined_failures, 0);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let n = noise(0.1, 0.1);
        let s = shape(3, 3);
        let a = monte_carlo(&n, s, 20_000, 42).unwrap();
        let b = monte_carlo(&n, s, 20_000, 42).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(&n, s, 20_000, 43).unwrap();
        assert_ne!(a.z_failures, c.z_failures);
    }

    #[test]
    fn monte_carlo_independent_of_thread_count() {
        let n = noise(0.1, 0.1);
        let s = shape(3, 3);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo(&n, s, 10_000, 11).unwrap());
        let parallel = monte_carlo(&n, s, 10_000, 11).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn monte_carlo_tracks_exact_rate() {
        let n = noise(0.1, 0.1);
        let s = shape(3, 3);
        let exact = z_fail_exact(&n, s).unwrap().prob();
        let mc = monte_carlo(&n, s, 100_000, 1).unwrap();
        assert!(
            (mc.z_rate - exact).abs() <= 5.0 * mc.z_stderr,
            "z_rate {} vs exact {} (5se = {})",
            mc.z_rate,
            exact,
            5.0 * mc.z_stderr
        );
    }

    #[test]
    fn monte_carlo_rejects_zero_trials() {
        assert!(monte_carlo(&noise(0.1, 0.1), shape(3, 3), 0, 1).is_err());
    }
}
