//! Majority voting over repeated runs of a binary-output computation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest repetition count considered.
pub const MAX_REPETITIONS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoteError {
    #[error("repetition count must be odd and positive, got {0}")]
    EvenRepetitions(u64),
    #[error("probability {0} is outside the allowed range")]
    BadProbability(f64),
    #[error("majority voting cannot help when the per-run failure {0} is at least 1/2")]
    Infeasible(f64),
    #[error("{0} repetitions exceeds the limit of {MAX_REPETITIONS}")]
    TooManyRepetitions(u64),
    #[error("no odd repetition count up to {MAX_REPETITIONS} reaches the target")]
    CapExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VotePlan {
    pub per_run_failure: f64,
    pub repetitions: u64,
    pub success_probability: f64,
}

impl VotePlan {
    pub fn new(per_run_failure: f64, repetitions: u64) -> Result<Self, VoteError> {
        let success_probability = majority_success(per_run_failure, repetitions)?;
        Ok(Self { per_run_failure, repetitions, success_probability })
    }
}

/// Probability that fewer than half of `k` runs are correct, each run
/// correct with probability `1 − p` and `p ≤ 1/2`. Summed from the small
/// end of the binomial so terms grow monotonically.
fn minority_tail(p: f64, k: u64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let majority = k.div_ceil(2);
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let mut ln_binom = 0.0_f64;
    let mut tail = 0.0_f64;
    for correct in 0..majority {
        if correct > 0 {
            ln_binom += ((k - correct + 1) as f64).ln() - (correct as f64).ln();
        }
        tail += (ln_binom + correct as f64 * ln_q + (k - correct) as f64 * ln_p).exp();
    }
    tail.min(1.0)
}

/// Probability that a strict majority of `k` runs is correct when each run
/// fails independently with probability `p_prime`.
pub fn majority_success(p_prime: f64, k: u64) -> Result<f64, VoteError> {
    if !(0.0..=1.0).contains(&p_prime) {
        return Err(VoteError::BadProbability(p_prime));
    }
    if k.is_multiple_of(2) {
        return Err(VoteError::EvenRepetitions(k));
    }
    if k > MAX_REPETITIONS {
        return Err(VoteError::TooManyRepetitions(k));
    }
    Ok(if p_prime <= 0.5 {
        1.0 - minority_tail(p_prime, k)
    } else {
        minority_tail(1.0 - p_prime, k)
    })
}

/// Smallest odd `k` with `majority_success(p_prime, k) ≥ target`.
pub fn min_repetitions(p_prime: f64, target: f64) -> Result<u64, VoteError> {
    if !(0.0..0.5).contains(&p_prime) {
        return Err(if (0.5..=1.0).contains(&p_prime) {
            VoteError::Infeasible(p_prime)
        } else {
            VoteError::BadProbability(p_prime)
        });
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(VoteError::BadProbability(target));
    }
    let meets = |k: u64| majority_success(p_prime, k).map(|s| s >= target);
    if meets(1)? {
        return Ok(1);
    }
    // Success is nondecreasing in odd k, so bracket then bisect.
    let cap = MAX_REPETITIONS - 1;
    let (mut lo, mut hi) = (1u64, 3u64);
    while !meets(hi)? {
        if hi == cap {
            return Err(VoteError::CapExceeded);
        }
        lo = hi;
        hi = (2 * hi + 1).min(cap);
    }
    while hi - lo > 2 {
        let mid = lo + (hi - lo) / 4 * 2;
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Direct binomial sum over the majority side, no tail tricks.
    fn oracle(p: f64, k: u64) -> f64 {
        let q = 1.0 - p;
        let mut total = 0.0;
        for j in k.div_ceil(2)..=k {
            let mut binom = 1.0;
            for i in 0..j {
                binom *= (k - i) as f64 / (i + 1) as f64;
            }
            total += binom * q.powi(j as i32) * p.powi((k - j) as i32);
        }
        total
    }

    #[test]
    fn majority_success_examples() {
        for k in [1, 3, 5, 101] {
            assert_eq!(majority_success(0.0, k).unwrap(), 1.0);
            assert_abs_diff_eq!(majority_success(0.5, k).unwrap(), 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(majority_success(0.15, 3).unwrap(), 0.93925, epsilon = 1e-15);
        assert_eq!(majority_success(1.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn majority_success_matches_direct_sum() {
        for &p in &[0.01, 0.1, 0.3, 0.45, 0.7] {
            for k in [1, 3, 7, 21, 51] {
                assert_abs_diff_eq!(majority_success(p, k).unwrap(), oracle(p, k), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn majority_success_errors() {
        assert_eq!(majority_success(0.1, 4).unwrap_err(), VoteError::EvenRepetitions(4));
        assert_eq!(majority_success(0.1, 0).unwrap_err(), VoteError::EvenRepetitions(0));
        assert_eq!(majority_success(1.2, 3).unwrap_err(), VoteError::BadProbability(1.2));
    }

    #[test]
    fn min_repetitions_examples() {
        assert_eq!(min_repetitions(0.0, 0.99).unwrap(), 1);
        assert_eq!(min_repetitions(0.1, 0.99).unwrap(), 5);
        assert_eq!(min_repetitions(0.15, 0.9).unwrap(), 3);
        assert_eq!(min_repetitions(0.6, 0.9).unwrap_err(), VoteError::Infeasible(0.6));
        assert_eq!(min_repetitions(0.5, 0.9).unwrap_err(), VoteError::Infeasible(0.5));
        assert_eq!(min_repetitions(0.1, 1.0).unwrap_err(), VoteError::BadProbability(1.0));
        assert_eq!(min_repetitions(0.4999999, 0.999999).unwrap_err(), VoteError::CapExceeded);
    }

    #[test]
    fn min_repetitions_is_minimal() {
        for &p in &[0.05, 0.2, 0.35, 0.45] {
            for &target in &[0.6, 0.9, 0.999, 0.999999] {
                let k = min_repetitions(p, target).unwrap();
                assert!(majority_success(p, k).unwrap() >= target);
                if k >= 3 {
                    assert!(majority_success(p, k - 2).unwrap() < target, "p={p} target={target} k={k}");
                }
            }
        }
    }

    #[test]
    fn vote_plan_records_success() {
        let plan = VotePlan::new(0.15, 3).unwrap();
        assert_eq!(plan.success_probability, majority_success(0.15, 3).unwrap());
    }
}
