//! Spacetime simulation of repetition-code recovery with noisy syndromes.
//!
//! A length-m repetition code sits on a circle; each of T measurement rounds
//! flips every data bit and every syndrome bit independently with the same
//! probability, and a final noiseless round closes the history. Defects are
//! the spacetime points where consecutive observed syndromes differ; the
//! decoder pairs them by minimum-weight matching under the cylinder metric
//! and a logical failure is a residual error chain that winds the circle.
//!
//! Two decoders implement the same minimum-weight rule: `decode_history`
//! runs blossom matching and reports the full pairing and inferred chain,
//! while the simulation loop uses a slice dynamic program specialized to the
//! cylinder that finds the optimal matching weight and the winding parity of
//! the correction without materializing the pairing. Both are exact; they
//! may differ only in which of several equal-weight matchings they pick.

use super::matching::{mwpm, pairing_weight, SpacetimeCoord};
use crate::error::{Error, Result};
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest supported circumference; column sets are packed into u64 masks.
pub const MAX_CIRCUMFERENCE: u64 = 63;

/// Error record of one simulated history: `rounds` noisy measurement rounds
/// over `m` data bits on a circle, plus an implicit final noiseless round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacetimeHistory {
    m: u64,
    rounds: u64,
    /// Per-round masks of fresh data-bit flips (horizontal edges).
    data_errors: Vec<u64>,
    /// Per-round masks of syndrome-bit readout flips (vertical edges).
    syndrome_errors: Vec<u64>,
}

fn validate_geometry(m: u64, rounds: u64) -> Result<()> {
    if m < 3 || m % 2 == 0 {
        return Err(Error::NotOddPositive { name: "m", value: m });
    }
    if m > MAX_CIRCUMFERENCE {
        return Err(Error::ExceedsCap {
            name: "m",
            value: m,
            cap: MAX_CIRCUMFERENCE,
        });
    }
    if rounds == 0 {
        return Err(Error::TooSmall {
            name: "rounds",
            value: 0,
            min: 1,
        });
    }
    Ok(())
}

impl SpacetimeHistory {
    /// Samples a history: every data bit and every syndrome bit flips
    /// independently with probability `p_tilde` in each of the `rounds`
    /// noisy rounds. Draw order per round is data bits 0..m then syndrome
    /// bits 0..m.
    pub fn sample(
        p_tilde: f64,
        m: u64,
        rounds: u64,
        rng: &mut impl rand::Rng,
    ) -> Result<SpacetimeHistory> {
        validate_geometry(m, rounds)?;
        if !(0.0..=0.5).contains(&p_tilde) {
            return Err(Error::OutOfRange {
                name: "p_tilde",
                value: p_tilde,
                requirement: "must lie in [0, 0.5]",
            });
        }
        let bern = Bernoulli::new(p_tilde).expect("validated");
        let mut draw_mask = |rng: &mut dyn rand::RngCore| {
            let mut mask = 0u64;
            for bit in 0..m {
                mask |= (bern.sample(rng) as u64) << bit;
            }
            mask
        };
        let mut data_errors = Vec::with_capacity(rounds as usize);
        let mut syndrome_errors = Vec::with_capacity(rounds as usize);
        for _ in 0..rounds {
            data_errors.push(draw_mask(rng));
            syndrome_errors.push(draw_mask(rng));
        }
        Ok(SpacetimeHistory {
            m,
            rounds,
            data_errors,
            syndrome_errors,
        })
    }

    /// Builds a history from explicit error masks (bit `i` of round `t`).
    pub fn from_masks(
        m: u64,
        data_errors: Vec<u64>,
        syndrome_errors: Vec<u64>,
    ) -> Result<SpacetimeHistory> {
        let rounds = data_errors.len() as u64;
        validate_geometry(m, rounds)?;
        if syndrome_errors.len() != data_errors.len() {
            return Err(Error::Internal(
                "data and syndrome rounds differ in length".into(),
            ));
        }
        let valid = 1u64.checked_shl(m as u32).map_or(u64::MAX, |v| v - 1);
        if data_errors.iter().chain(&syndrome_errors).any(|&e| e & !valid != 0) {
            return Err(Error::Internal("error mask wider than the circle".into()));
        }
        Ok(SpacetimeHistory {
            m,
            rounds,
            data_errors,
            syndrome_errors,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn data_error(&self, round: u64, bit: u64) -> bool {
        self.data_errors[round as usize] >> bit & 1 == 1
    }

    pub fn syndrome_error(&self, round: u64, col: u64) -> bool {
        self.syndrome_errors[round as usize] >> col & 1 == 1
    }

    fn rotate_down(&self, mask: u64) -> u64 {
        // Bit c of the result is bit (c+1) mod m of the input.
        (mask >> 1 | mask << (self.m - 1)) & ((1u64 << self.m) - 1)
    }

    /// Accumulated data error after the last noisy round.
    pub fn final_data(&self) -> u64 {
        self.data_errors.iter().fold(0, |acc, &e| acc ^ e)
    }

    /// Defect masks for rounds 0..=rounds: differences of consecutive
    /// observed syndromes, with a clean reference before round 0 and a
    /// noiseless readout closing the history.
    pub fn defect_masks(&self) -> Vec<u64> {
        let t = self.rounds as usize;
        let mut masks = Vec::with_capacity(t + 1);
        let mut cumulative = 0u64;
        let mut previous_observed = 0u64;
        for round in 0..t {
            cumulative ^= self.data_errors[round];
            let observed = cumulative ^ self.rotate_down(cumulative) ^ self.syndrome_errors[round];
            masks.push(observed ^ previous_observed);
            previous_observed = observed;
        }
        let final_true = cumulative ^ self.rotate_down(cumulative);
        masks.push(final_true ^ previous_observed);
        masks
    }

    /// Defect coordinates in (t, col) order.
    pub fn defects(&self) -> Vec<SpacetimeCoord> {
        let mut out = Vec::new();
        for (t, &mask) in self.defect_masks().iter().enumerate() {
            let mut bits = mask;
            while bits != 0 {
                let col = bits.trailing_zeros() as u64;
                out.push(SpacetimeCoord { col, t: t as u64 });
                bits &= bits - 1;
            }
        }
        out
    }
}

/// One edge of the spacetime lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpacetimeEdge {
    /// A hypothetical flip of data bit `bit` placed at measurement round
    /// `round`; joins defect sites on the two checks sharing the bit.
    Data { bit: u64, round: u64 },
    /// A hypothetical syndrome readout error at check `col`, joining rounds
    /// `round` and `round + 1`.
    Syndrome { col: u64, round: u64 },
}

/// Full decoding record of one history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub defects: Vec<SpacetimeCoord>,
    /// Perfect matching of `defects` by index, minimizing total distance.
    pub pairing: Vec<(usize, usize)>,
    /// Geodesic chain realizing the matching.
    pub inferred_chain: Vec<SpacetimeEdge>,
    /// Data bits flipped by the inferred correction at the final round.
    pub correction: u64,
    pub logical_failure: bool,
    /// Total matching weight under the cylinder metric.
    pub weight: u64,
}

/// Data bits crossed by the shorter arc from check `c1` to check `c2`
/// (`m` odd makes the shorter arc unique). Walking east from check `c`
/// crosses data bit `c+1`; walking west crosses bit `c`.
fn shorter_arc_bits(c1: u64, c2: u64, m: u64) -> impl Iterator<Item = u64> {
    let east = (c2 + m - c1) % m;
    let (steps, eastward) = if east < m - east {
        (east, true)
    } else {
        (m - east, false)
    };
    (0..steps).map(move |s| {
        if eastward {
            (c1 + 1 + s) % m
        } else {
            (c1 + m - s) % m
        }
    })
}

/// Decodes one history with blossom matching, returning the pairing, the
/// inferred chain, and the failure verdict.
pub fn decode_history(history: &SpacetimeHistory) -> Result<MatchResult> {
    let m = history.m;
    let defects = history.defects();
    let pairing = mwpm(&defects, m)?;
    let weight = pairing_weight(&pairing, &defects, m);

    let mut correction = 0u64;
    let mut inferred_chain = Vec::new();
    for &(a, b) in &pairing {
        let (da, db) = (defects[a], defects[b]);
        // L-shaped geodesic: time leg at da.col, then the shorter arc at the
        // later round.
        let (t_lo, t_hi) = (da.t.min(db.t), da.t.max(db.t));
        for t in t_lo..t_hi {
            inferred_chain.push(SpacetimeEdge::Syndrome { col: da.col, round: t });
        }
        for bit in shorter_arc_bits(da.col, db.col, m) {
            correction ^= 1 << bit;
            inferred_chain.push(SpacetimeEdge::Data { bit, round: t_hi });
        }
    }

    let residual = history.final_data() ^ correction;
    let full = (1u64 << m) - 1;
    let logical_failure = match residual {
        0 => false,
        r if r == full => true,
        _ => {
            return Err(Error::Internal(format!(
                "residual {residual:#b} is not syndrome-trivial on a circle of {m}"
            )))
        }
    };
    Ok(MatchResult {
        defects,
        pairing,
        inferred_chain,
        correction,
        logical_failure,
        weight,
    })
}

/// Exact minimum matching weight and correction winding parity, by dynamic
/// programming over time slices.
///
/// The state after slice `t` is the set of defect columns still waiting for a
/// partner; waiting costs one unit per open defect per round, closing a pair
/// costs the arc between the columns. A defect arriving in a column that is
/// already open closes with it at no extra cost (exchange-optimal), which
/// keeps states to one open defect per column, i.e. a bitmask. States whose
/// cost cannot be recovered even if their extra open columns were paired off
/// on the spot are pruned.
fn dp_min_weight_parity(m: u64, defect_masks: &[u64]) -> (u64, bool) {
    let half = m / 2;
    let arc = |c1: u64, c2: u64| {
        let d = c1.abs_diff(c2);
        d.min(m - d)
    };
    let crosses_cut = |c1: u64, c2: u64| shorter_arc_bits(c1, c2, m).any(|bit| bit == 0);

    // cost by (open-column mask, crossing parity).
    let mut states: Vec<((u64, bool), u64)> = vec![((0, false), 0)];
    let mut next: std::collections::HashMap<(u64, bool), u64> = std::collections::HashMap::new();

    let last = defect_masks.len() - 1;
    for (t, &arrivals) in defect_masks.iter().enumerate() {
        next.clear();
        for &((mask, parity), cost) in &states {
            next.insert((mask ^ arrivals, parity), cost);
        }

        // Close pairs, processing wider states first so chains of closings
        // land in one sweep.
        let mut order: Vec<(u64, bool)> = next.keys().copied().collect();
        order.sort_unstable_by_key(|&(mask, parity)| (std::cmp::Reverse(mask.count_ones()), mask, parity));
        let mut idx = 0;
        while idx < order.len() {
            let (mask, parity) = order[idx];
            idx += 1;
            let cost = next[&(mask, parity)];
            let cols: Vec<u64> = (0..m).filter(|&c| mask >> c & 1 == 1).collect();
            for (i, &c1) in cols.iter().enumerate() {
                for &c2 in &cols[i + 1..] {
                    let key = (
                        mask & !(1 << c1) & !(1 << c2),
                        parity ^ crosses_cut(c1, c2),
                    );
                    let candidate = cost + arc(c1, c2);
                    match next.get_mut(&key) {
                        Some(existing) if *existing <= candidate => {}
                        Some(existing) => *existing = candidate,
                        None => {
                            next.insert(key, candidate);
                            order.push(key);
                        }
                    }
                }
            }
        }

        // Prune dominated states: a state is dropped when some subset state
        // is already so much cheaper that pairing off the extra columns
        // (at most half the circumference each) could not close the gap.
        states.clear();
        states.extend(next.iter().map(|(&k, &v)| (k, v)));
        states.sort_unstable_by_key(|&((mask, parity), cost)| (cost, mask, parity));
        let mut kept: Vec<((u64, bool), u64)> = Vec::with_capacity(states.len());
        'candidates: for &((mask, parity), cost) in &states {
            for &((kmask, _), kcost) in &kept {
                if kmask & !mask == 0 && kmask != mask {
                    let extra = (mask ^ kmask).count_ones() as u64;
                    if cost >= kcost + (extra / 2) * half {
                        continue 'candidates;
                    }
                }
            }
            kept.push(((mask, parity), cost));
        }
        states = kept;

        if t != last {
            for ((mask, _), cost) in states.iter_mut() {
                *cost += mask.count_ones() as u64;
            }
        }
    }

    let closed_even = states
        .iter()
        .find(|&&((mask, parity), _)| mask == 0 && !parity)
        .map(|&(_, cost)| cost);
    let closed_odd = states
        .iter()
        .find(|&&((mask, parity), _)| mask == 0 && parity)
        .map(|&(_, cost)| cost);
    match (closed_even, closed_odd) {
        (Some(even), Some(odd)) => {
            if odd < even {
                (odd, true)
            } else {
                // Equal-weight tie resolves to the non-crossing correction.
                (even, false)
            }
        }
        (Some(even), None) => (even, false),
        (None, Some(odd)) => (odd, true),
        (None, None) => unreachable!("empty open set is always reachable"),
    }
}

/// Aggregate result of the noisy-syndrome decoder simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeSummary {
    pub trials: u64,
    pub rounds: u64,
    pub failures: u64,
    /// Failures per trial per noisy round.
    pub failure_rate_per_round: f64,
    /// 99% Wilson confidence bounds on the per-round rate.
    pub ci99_low: f64,
    pub ci99_high: f64,
}

/// Two-sided 99% normal quantile for the Wilson interval.
const Z99: f64 = 2.5758293035489004;

fn wilson_bounds(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z99 * Z99;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let spread = Z99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - spread) / denom).max(0.0),
        ((center + spread) / denom).min(1.0),
    )
}

/// Samples `trials` histories and decodes each by minimum-weight matching,
/// reporting the logical failure rate per round.
///
/// A trial fails when the accumulated data errors combined with the inferred
/// correction wind the circle an odd number of times. Per-trial ChaCha
/// streams make the counts a function of `(seed, trials)` only, independent
/// of thread count.
pub fn spacetime_simulate(
    p_tilde: f64,
    m: u64,
    rounds: u64,
    trials: u64,
    seed: u64,
) -> Result<SpacetimeSummary> {
    validate_geometry(m, rounds)?;
    if !(0.0..=0.5).contains(&p_tilde) {
        return Err(Error::OutOfRange {
            name: "p_tilde",
            value: p_tilde,
            requirement: "must lie in [0, 0.5]",
        });
    }
    if trials == 0 {
        return Err(Error::TooSmall {
            name: "trials",
            value: 0,
            min: 1,
        });
    }

    let failures = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let history =
                SpacetimeHistory::sample(p_tilde, m, rounds, &mut rng).expect("validated");
            let (_, crossing_parity) = dp_min_weight_parity(m, &history.defect_masks());
            let failed = (history.final_data() & 1 == 1) ^ crossing_parity;
            failed as u64
        })
        .sum::<u64>();

    let (lo, hi) = wilson_bounds(failures, trials);
    Ok(SpacetimeSummary {
        trials,
        rounds,
        failures,
        failure_rate_per_round: failures as f64 / (trials as f64 * rounds as f64),
        ci99_low: lo / rounds as f64,
        ci99_high: hi / rounds as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quiet_history(m: u64, rounds: u64) -> (Vec<u64>, Vec<u64>) {
        (vec![0u64; rounds as usize], vec![0u64; rounds as usize])
    }

    #[test]
    fn no_errors_no_defects_no_failure() {
        let (d, s) = quiet_history(5, 4);
        let h = SpacetimeHistory::from_masks(5, d, s).unwrap();
        assert!(h.defects().is_empty());
        let r = decode_history(&h).unwrap();
        assert!(!r.logical_failure);
        assert_eq!(r.weight, 0);
        assert_eq!(dp_min_weight_parity(5, &h.defect_masks()), (0, false));
    }

    #[test]
    fn single_data_error_is_corrected() {
        // One flip of data bit 1 in round 0 of a 5-circle: defects at checks
        // 0 and 1, matched across the single arc covering data bit 1.
        let (mut d, s) = quiet_history(5, 3);
        d[0] = 1 << 1;
        let h = SpacetimeHistory::from_masks(5, d, s).unwrap();
        let defects = h.defects();
        assert_eq!(
            defects,
            vec![
                SpacetimeCoord { col: 0, t: 0 },
                SpacetimeCoord { col: 1, t: 0 }
            ]
        );
        let r = decode_history(&h).unwrap();
        assert_eq!(r.correction, 1 << 1);
        assert!(!r.logical_failure);
        assert_eq!(r.weight, 1);
    }

    #[test]
    fn three_contiguous_errors_wrap_and_fail() {
        // Data bits 1,2,3 flip in round 0 on a 5-circle: defects at checks 0
        // and 3, distance 2 the short way; the correction completes the loop.
        let (mut d, s) = quiet_history(5, 2);
        d[0] = 0b01110;
        let h = SpacetimeHistory::from_masks(5, d, s).unwrap();
        let r = decode_history(&h).unwrap();
        assert_eq!(r.weight, 2);
        assert_eq!(r.correction, 0b10001);
        assert!(r.logical_failure);
        let (w, parity) = dp_min_weight_parity(5, &h.defect_masks());
        assert_eq!(w, 2);
        // Correction crosses data bit 0 exactly once.
        assert!(parity);
        assert!((h.final_data() & 1 == 1) ^ parity);
    }

    #[test]
    fn syndrome_error_pairs_in_time() {
        // A single syndrome flip creates two defects one round apart at the
        // same check; matching pairs them vertically and nothing is corrected.
        let (d, mut s) = quiet_history(7, 4);
        s[1] = 1 << 3;
        let h = SpacetimeHistory::from_masks(7, d, s).unwrap();
        let r = decode_history(&h).unwrap();
        assert_eq!(
            r.defects,
            vec![
                SpacetimeCoord { col: 3, t: 1 },
                SpacetimeCoord { col: 3, t: 2 }
            ]
        );
        assert_eq!(r.weight, 1);
        assert_eq!(r.correction, 0);
        assert!(!r.logical_failure);
    }

    #[test]
    fn defect_count_is_always_even() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let h = SpacetimeHistory::sample(0.2, 9, 12, &mut rng).unwrap();
            assert_eq!(h.defects().len() % 2, 0);
        }
    }

    #[test]
    fn inferred_chain_boundary_is_the_defect_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let h = SpacetimeHistory::sample(0.15, 7, 8, &mut rng).unwrap();
            let r = decode_history(&h).unwrap();
            let mut degree = std::collections::HashMap::<SpacetimeCoord, u32>::new();
            for &edge in &r.inferred_chain {
                let (a, b) = match edge {
                    SpacetimeEdge::Data { bit, round } => (
                        SpacetimeCoord { col: (bit + 7 - 1) % 7, t: round },
                        SpacetimeCoord { col: bit, t: round },
                    ),
                    SpacetimeEdge::Syndrome { col, round } => (
                        SpacetimeCoord { col, t: round },
                        SpacetimeCoord { col, t: round + 1 },
                    ),
                };
                *degree.entry(a).or_default() += 1;
                *degree.entry(b).or_default() += 1;
            }
            let odd: std::collections::HashSet<_> = degree
                .iter()
                .filter(|(_, &d)| d % 2 == 1)
                .map(|(&c, _)| c)
                .collect();
            let defects: std::collections::HashSet<_> = r.defects.iter().copied().collect();
            assert_eq!(odd, defects);
        }
    }

    #[test]
    fn dp_agrees_with_blossom_on_random_histories() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut parity_ties = 0u32;
        for case in 0..400 {
            let m = [3u64, 5, 7, 9][case % 4];
            let p = [0.05, 0.1, 0.2][case % 3];
            let h = SpacetimeHistory::sample(p, m, 10, &mut rng).unwrap();
            let blossom = decode_history(&h).unwrap();
            let (w, parity) = dp_min_weight_parity(m, &h.defect_masks());
            assert_eq!(w, blossom.weight, "weight mismatch, case {case}");
            let dp_failed = (h.final_data() & 1 == 1) ^ parity;
            if dp_failed != blossom.logical_failure {
                // Only legal when distinct minimum matchings disagree on the
                // winding; the weights above already matched, so count it.
                parity_ties += 1;
            }
        }
        // Ties between opposite-parity minimum matchings are rare.
        assert!(parity_ties <= 8, "too many parity ties: {parity_ties}");
    }

    #[test]
    fn simulate_zero_noise() {
        let s = spacetime_simulate(0.0, 5, 10, 500, 3).unwrap();
        assert_eq!(s.failures, 0);
        assert_eq!(s.failure_rate_per_round, 0.0);
    }

    #[test]
    fn simulate_is_deterministic() {
        let a = spacetime_simulate(0.05, 5, 20, 2000, 8).unwrap();
        let b = spacetime_simulate(0.05, 5, 20, 2000, 8).unwrap();
        assert_eq!(a, b);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| spacetime_simulate(0.05, 5, 20, 2000, 8).unwrap());
        assert_eq!(a, serial);
    }

    #[test]
    fn simulate_validates_inputs() {
        assert!(spacetime_simulate(0.6, 5, 10, 10, 0).is_err());
        assert!(spacetime_simulate(0.1, 4, 10, 10, 0).is_err());
        assert!(spacetime_simulate(0.1, 5, 0, 10, 0).is_err());
        assert!(spacetime_simulate(0.1, 5, 10, 0, 0).is_err());
        assert!(spacetime_simulate(0.1, 65, 10, 10, 0).is_err());
    }

    #[test]
    fn failure_rate_grows_with_noise() {
        let low = spacetime_simulate(0.02, 5, 30, 3000, 21).unwrap();
        let high = spacetime_simulate(0.12, 5, 30, 3000, 21).unwrap();
        assert!(high.failures > low.failures);
    }

    #[test]
    fn wilson_interval_contains_point_estimate() {
        let s = spacetime_simulate(0.08, 5, 10, 4000, 5).unwrap();
        assert!(s.ci99_low <= s.failure_rate_per_round);
        assert!(s.failure_rate_per_round <= s.ci99_high);
    }
}
