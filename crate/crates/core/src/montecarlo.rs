//! Sampling and enumeration of fixed-weight non-zero patterns.
//!
//! Trial `i` of a run seeded with `s` draws from ChaCha8 seeded with `s` on
//! stream `i`, so results do not depend on thread scheduling. Per-trial
//! counts are integers and are reduced in trial order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_pow2, Error, Result};
use crate::exact::{binomial, exact_expected_counts, Expectation};
use crate::wht::{count_positions, OpCount, PatternMask};

/// Patterns are enumerated instead of sampled up to this many.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Summary of a sampled run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub q: usize,
    pub q_prime: usize,
    pub trials: u64,
    pub mean_additions: f64,
    pub mean_negations: f64,
    pub stderr_additions: f64,
    pub stderr_negations: f64,
    pub seed: u64,
}

fn check_weight(q: usize, q_prime: usize) -> Result<()> {
    check_pow2(q)?;
    if q_prime > q {
        return Err(Error::WeightOutOfRange { q_prime, q });
    }
    Ok(())
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sorted positions of a uniformly random `q'`-subset of `0..q`
/// (partial Fisher-Yates).
pub fn sample_positions<R: Rng + ?Sized>(
    q: usize,
    q_prime: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_weight(q, q_prime)?;
    let mut pool: Vec<usize> = (0..q).collect();
    for i in 0..q_prime {
        // u64 ranges keep the draw sequence identical across platforms
        let j = i + rng.random_range(0..(q - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut chosen = pool[..q_prime].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

pub fn sample_pattern<R: Rng + ?Sized>(
    q: usize,
    q_prime: usize,
    rng: &mut R,
) -> Result<PatternMask> {
    let positions = sample_positions(q, q_prime, rng)?;
    PatternMask::from_positions(q, &positions)
}

/// Averages the operation counts of `trials` random weight-`q'` patterns.
pub fn run_trials(q: usize, q_prime: usize, trials: u64, seed: u64) -> Result<TrialStats> {
    check_weight(q, q_prime)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let counts: Vec<OpCount> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let positions =
                sample_positions(q, q_prime, &mut trial_rng(seed, t)).expect("range checked above");
            count_positions(q, &positions)
        })
        .collect();

    let moments = |pick: fn(&OpCount) -> u64| {
        let (sum, sum_sq) = counts.iter().map(pick).fold((0u128, 0u128), |(s, s2), x| {
            (s + x as u128, s2 + (x as u128) * (x as u128))
        });
        let n = trials as u128;
        let mean = sum as f64 / trials as f64;
        let stderr = if trials > 1 {
            // n * sum(x^2) - sum(x)^2 = n (n - 1) s^2, exact in integers
            let scaled = n * sum_sq - sum * sum;
            (scaled as f64 / (n * (n - 1)) as f64 / trials as f64).sqrt()
        } else {
            0.0
        };
        (mean, stderr)
    };
    let (mean_additions, stderr_additions) = moments(|c| c.additions);
    let (mean_negations, stderr_negations) = moments(|c| c.negations);
    Ok(TrialStats {
        q,
        q_prime,
        trials,
        mean_additions,
        mean_negations,
        stderr_additions,
        stderr_negations,
        seed,
    })
}

/// Calls `f` with every sorted `k`-subset of `0..n`, in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact mean counts over all `C(q, q')` patterns, by enumeration.
pub fn exhaustive_mean(q: usize, q_prime: usize) -> Result<Expectation> {
    check_weight(q, q_prime)?;
    let n = binomial(q, q_prime);
    if n > BigInt::from(EXHAUSTIVE_LIMIT) {
        return Err(Error::InvalidArgument(format!(
            "C({q}, {q_prime}) = {n} patterns exceeds the enumeration limit"
        )));
    }
    let mut total = OpCount::ZERO;
    for_each_combination(q, q_prime, |pos| total += count_positions(q, pos));
    Ok(Expectation {
        additions: BigRational::new(total.additions.into(), n.clone()),
        negations: BigRational::new(total.negations.into(), n),
    })
}

/// How an expectation was checked.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Exhaustive(Expectation),
    Sampled(TrialStats),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub exact: Expectation,
    pub evidence: Evidence,
    pub pass: bool,
}

/// Number of standard errors a sampled mean may deviate from the exact value.
pub const SIGMA_BOUND: f64 = 3.0;

/// Compares the exact expectation with enumeration when there are at most
/// [`EXHAUSTIVE_LIMIT`] patterns, otherwise with `trials` sampled patterns.
pub fn validate(q: usize, q_prime: usize, trials: u64, seed: u64) -> Result<Validation> {
    check_weight(q, q_prime)?;
    let exact = exact_expected_counts(q, q_prime)?;
    if binomial(q, q_prime) <= BigInt::from(EXHAUSTIVE_LIMIT) {
        let mean = exhaustive_mean(q, q_prime)?;
        let pass = mean == exact;
        return Ok(Validation {
            exact,
            evidence: Evidence::Exhaustive(mean),
            pass,
        });
    }
    let stats = run_trials(q, q_prime, trials, seed)?;
    let pass = within_bound(
        stats.mean_additions,
        stats.stderr_additions,
        &exact.additions,
    ) && within_bound(
        stats.mean_negations,
        stats.stderr_negations,
        &exact.negations,
    );
    Ok(Validation {
        exact,
        evidence: Evidence::Sampled(stats),
        pass,
    })
}

/// `|mean - exact| <= 3 stderr`, with a floor at double-precision resolution
/// of `exact` for the zero-variance cases.
pub fn within_bound(mean: f64, stderr: f64, exact: &BigRational) -> bool {
    let exact = exact.to_f64().unwrap_or(f64::NAN);
    (mean - exact).abs() <= SIGMA_BOUND * stderr + 4.0 * f64::EPSILON * exact.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn edge_patterns() {
        let mut rng = trial_rng(5, 0);
        assert_eq!(
            sample_pattern(16, 16, &mut rng).unwrap(),
            PatternMask::full(16).unwrap()
        );
        assert_eq!(
            sample_pattern(16, 0, &mut rng).unwrap(),
            PatternMask::empty(16).unwrap()
        );
        assert!(sample_pattern(16, 17, &mut rng).is_err());
        assert!(sample_pattern(12, 1, &mut rng).is_err());
        let m = sample_pattern(64, 12, &mut rng).unwrap();
        assert_eq!(m.weight(), 12);
    }

    #[test]
    fn inclusion_frequencies_are_uniform() {
        let (q, qp, draws) = (16usize, 4usize, 100_000u64);
        let mut hits = vec![0u64; q];
        let mut rng = trial_rng(2024, 0);
        for _ in 0..draws {
            for p in sample_positions(q, qp, &mut rng).unwrap() {
                hits[p] += 1;
            }
        }
        // inclusion counts of a fixed-size subset have covariance
        // N p (1-p) q/(q-1) on the sum-zero subspace, giving q-1 dof
        let p = qp as f64 / q as f64;
        let expected = draws as f64 * p;
        let scale = draws as f64 * p * (1.0 - p) * q as f64 / (q - 1) as f64;
        let stat: f64 = hits
            .iter()
            .map(|&h| (h as f64 - expected).powi(2) / scale)
            .sum();
        let p_value = 1.0 - ChiSquared::new((q - 1) as f64).unwrap().cdf(stat);
        assert!(p_value > 1e-3, "chi2={stat} p={p_value}");
        for h in hits {
            assert!((h as f64 / draws as f64 - p).abs() < 0.01);
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let a = run_trials(64, 12, 2000, 99).unwrap();
        let b = run_trials(64, 12, 2000, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean_additions.to_bits(), b.mean_additions.to_bits());
        let c = run_trials(64, 12, 2000, 100).unwrap();
        assert_ne!(a.mean_additions, c.mean_additions);
    }

    #[test]
    fn full_weight_is_deterministic() {
        for q in [4usize, 64, 256] {
            let s = run_trials(q, q, 10, 1).unwrap();
            let d = OpCount::dense(q);
            assert_eq!(s.mean_additions, d.additions as f64);
            assert_eq!(s.mean_negations, d.negations as f64);
            assert_eq!((s.stderr_additions, s.stderr_negations), (0.0, 0.0));
        }
        let s = run_trials(8, 3, 1, 1).unwrap();
        assert_eq!(s.stderr_additions, 0.0);
        assert!(run_trials(8, 3, 0, 1).is_err());
    }

    #[test]
    fn sampled_mean_near_length_four_value() {
        let s = run_trials(4, 2, 10_000, 17).unwrap();
        assert!((s.mean_additions - 10.0 / 3.0).abs() <= 3.0 * s.stderr_additions);
        assert!((s.mean_negations - 8.0 / 3.0).abs() <= 3.0 * s.stderr_negations);
    }

    #[test]
    fn combinations_are_enumerated_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut n = 0;
        for_each_combination(5, 0, |c| {
            assert!(c.is_empty());
            n += 1
        });
        assert_eq!(n, 1);
        for_each_combination(3, 4, |_| panic!("no subsets"));
    }

    #[test]
    fn enumeration_matches_exact_for_small_lengths() {
        for q in [2usize, 4, 8] {
            for qp in 0..=q {
                assert_eq!(
                    exhaustive_mean(q, qp).unwrap(),
                    exact_expected_counts(q, qp).unwrap()
                );
            }
        }
        assert!(exhaustive_mean(64, 12).is_err());
    }

    #[test]
    fn validation_modes() {
        let v = validate(4, 2, 10, 0).unwrap();
        assert!(v.pass);
        assert!(
            matches!(v.evidence, Evidence::Exhaustive(ref e) if e.additions == BigRational::new(10.into(), 3.into()))
        );
        let v = validate(64, 12, 20_000, 5).unwrap();
        assert!(matches!(v.evidence, Evidence::Sampled(_)));
        assert!(v.pass);
    }
}
