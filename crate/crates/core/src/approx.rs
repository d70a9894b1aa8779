//! Layer-wise Bernoulli approximation of the expected operation counts.
//!
//! Each input is taken non-zero independently with probability `q'/q`, and
//! each layer of butterflies is assumed to see independent inputs. A
//! butterfly output is non-zero when either input is, so the non-zero
//! probability evolves as `p <- 1 - (1 - p)^2` from one layer to the next.
//! A layer of `q/2` butterflies then costs about `q p^2` additions and
//! `q p / 2` negations.

use crate::error::{check_pow2, Error, Result};

/// Per-layer input non-zero probabilities for a length-`q` transform.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerProfile {
    pub q: usize,
    pub layer_probs: Vec<f64>,
}

impl LayerProfile {
    pub fn layers(&self) -> usize {
        self.layer_probs.len()
    }
}

/// Approximate expected additions and negations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxCounts {
    pub additions: f64,
    pub negations: f64,
}

fn check_range(q: usize, q_prime: usize) -> Result<u32> {
    let m = check_pow2(q)?;
    if m == 0 {
        return Err(Error::InvalidArgument("need q >= 2".into()));
    }
    if q_prime > q {
        return Err(Error::WeightOutOfRange { q_prime, q });
    }
    Ok(m)
}

pub fn layer_probabilities(q: usize, q_prime: usize) -> Result<LayerProfile> {
    let m = check_range(q, q_prime)?;
    let mut p = q_prime as f64 / q as f64;
    let mut layer_probs = Vec::with_capacity(m as usize);
    for _ in 0..m {
        layer_probs.push(p);
        p = 1.0 - (1.0 - p) * (1.0 - p);
    }
    Ok(LayerProfile { q, layer_probs })
}

pub fn approx_expected_counts(q: usize, q_prime: usize) -> Result<ApproxCounts> {
    let profile = layer_probabilities(q, q_prime)?;
    let qf = q as f64;
    let additions = profile.layer_probs.iter().map(|p| qf * p * p).sum();
    let negations = profile.layer_probs.iter().map(|p| qf * p / 2.0).sum();
    Ok(ApproxCounts {
        additions,
        negations,
    })
}

/// One point of the relative-additions sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub q: usize,
    pub log2_q: u32,
    /// Approximate additions divided by `q log2 q`.
    pub ratio: f64,
}

/// Relative approximate additions for every power of two in `[q_min, q_max]`.
pub fn relative_additions_sweep(
    q_min: usize,
    q_max: usize,
    q_prime: usize,
) -> Result<Vec<SweepPoint>> {
    let lo = check_pow2(q_min)?;
    let hi = check_pow2(q_max)?;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "invalid sweep range {q_min}..={q_max}"
        )));
    }
    if q_prime > q_min {
        return Err(Error::WeightOutOfRange { q_prime, q: q_min });
    }
    (lo..=hi)
        .map(|m| {
            let q = 1usize << m;
            let counts = approx_expected_counts(q, q_prime)?;
            Ok(SweepPoint {
                q,
                log2_q: m,
                ratio: counts.additions / (q as f64 * m as f64),
            })
        })
        .collect()
}
