//! XOR-group convolution and node primitives.
//!
//! For `q = 2^m` the check-node convolution runs over the additive group of
//! GF(2^m), i.e. `(a * b)[k] = sum_i a[i] b[i ^ k]`. The Walsh-Hadamard
//! transform diagonalizes it: transform, multiply pointwise, transform back.

use crate::error::{Error, Result};
use crate::exact::exact_expected_counts;
use crate::message::{
    complete_with_tail, split_uniform, truncate, DenseVector, Domain, TruncatedMessage,
};
use crate::wht::{wht_dense, wht_inverse, wht_sparse_counted, OpCount, PatternMask};
use crate::MASS_EPS;

/// Operations spent by one convolution through the transform domain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConvolutionCost {
    /// One entry per operand.
    pub forward: Vec<OpCount>,
    /// Pointwise spectrum products plus any tail-spectrum scalings.
    pub multiplications: u64,
    pub inverse: OpCount,
    /// The `1/q` normalization of the inverse.
    pub normalization: u64,
}

impl ConvolutionCost {
    pub fn total(&self) -> OpCount {
        self.forward.iter().copied().sum::<OpCount>() + self.inverse
    }

    pub fn total_multiplications(&self) -> u64 {
        self.multiplications + self.normalization
    }
}

fn check_lengths(a: &DenseVector, b: &DenseVector) -> Result<usize> {
    if a.alphabet_size() != b.alphabet_size() {
        return Err(Error::LengthMismatch {
            left: a.alphabet_size(),
            right: b.alphabet_size(),
        });
    }
    Ok(a.alphabet_size())
}

/// Brute-force `O(q^2)` XOR convolution.
pub fn xor_convolve_direct(a: &DenseVector, b: &DenseVector) -> Result<DenseVector> {
    let q = check_lengths(a, b)?;
    let out = (0..q)
        .map(|k| (0..q).map(|i| a[i] * b[i ^ k]).sum())
        .collect();
    DenseVector::new(out)
}

/// XOR convolution through the transform domain with dense forward
/// transforms.
pub fn xor_convolve_wht(
    a: &DenseVector,
    b: &DenseVector,
) -> Result<(DenseVector, ConvolutionCost)> {
    let q = check_lengths(a, b)?;
    let spectra = [wht_dense(a), wht_dense(b)];
    let forward = vec![OpCount::dense(q); 2];
    Ok(finish(&spectra, forward, 0))
}

/// As [`xor_convolve_wht`], with forward transforms that skip the zeros
/// marked by the masks.
pub fn xor_convolve_wht_masked(
    a: &DenseVector,
    b: &DenseVector,
    mask_a: &PatternMask,
    mask_b: &PatternMask,
) -> Result<(DenseVector, ConvolutionCost)> {
    check_lengths(a, b)?;
    let (sa, ca) = wht_sparse_counted(a, mask_a)?;
    let (sb, cb) = wht_sparse_counted(b, mask_b)?;
    Ok(finish(&[sa, sb], vec![ca, cb], 0))
}

fn finish(
    spectra: &[DenseVector],
    forward: Vec<OpCount>,
    extra_multiplications: u64,
) -> (DenseVector, ConvolutionCost) {
    let q = spectra[0].alphabet_size();
    let mut product = spectra[0].values().to_vec();
    for s in &spectra[1..] {
        product
            .iter_mut()
            .zip(s.values())
            .for_each(|(p, x)| *p *= x);
    }
    let out = wht_inverse(&DenseVector::from_raw(product));
    let cost = ConvolutionCost {
        forward,
        multiplications: (spectra.len() as u64 - 1) * q as u64 + extra_multiplications,
        inverse: OpCount::dense(q),
        normalization: q as u64,
    };
    (out, cost)
}

/// Spectrum of a tail-completed truncated message.
///
/// The completed message is `p0 * 1 + s` with `s` supported on the stored
/// symbols. The transform of the constant part is `q p0` at index 0, so
/// only `s` goes through the (sparse) transform.
pub fn truncated_spectrum(t: &TruncatedMessage) -> Result<(DenseVector, OpCount, u64)> {
    let full = complete_with_tail(t)?;
    let (uniform, sparse) = split_uniform(&full, t.support())?;
    let mask = PatternMask::from_positions(t.alphabet_size(), t.support())?;
    let (spectrum, mut count) = wht_sparse_counted(&sparse, &mask)?;
    let p0 = uniform[0];
    if p0 == 0.0 {
        return Ok((spectrum, count, 0));
    }
    let mut values = spectrum.into_values();
    values[0] += values.len() as f64 * p0;
    count.additions += 1;
    Ok((DenseVector::from_raw(values), count, 1))
}

/// Result of a check-node update.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckNodeOutput {
    pub message: TruncatedMessage,
    pub cost: ConvolutionCost,
}

/// Convolves the tail-completed inputs and truncates the result to the
/// `q_keep` most likely symbols.
pub fn check_node(messages: &[TruncatedMessage], q_keep: usize) -> Result<CheckNodeOutput> {
    if messages.len() < 2 {
        return Err(Error::InvalidArgument(
            "check node needs at least two messages".into(),
        ));
    }
    let q = messages[0].alphabet_size();
    let mut spectra = Vec::with_capacity(messages.len());
    let mut forward = Vec::with_capacity(messages.len());
    let mut scalings = 0;
    for m in messages {
        if m.alphabet_size() != q {
            return Err(Error::LengthMismatch {
                left: q,
                right: m.alphabet_size(),
            });
        }
        let (s, c, k) = truncated_spectrum(m)?;
        spectra.push(s);
        forward.push(c);
        scalings += k;
    }
    let (out, cost) = finish(&spectra, forward, scalings);
    let cleaned = out
        .into_values()
        .into_iter()
        .map(|v| {
            if (-MASS_EPS..0.0).contains(&v) {
                0.0
            } else {
                v.min(1.0)
            }
        })
        .collect();
    let message = truncate(&DenseVector::from_raw(cleaned), q_keep)?;
    Ok(CheckNodeOutput { message, cost })
}

/// Extrinsic log-domain outputs of a variable node.
///
/// `messages[0]` is the channel message, the rest are incoming messages.
/// Output `j` is the sum of all inputs except incoming message `j`. The cost
/// is `d_v q` additions for the total (with `d_v + 1` inputs) plus `d_v q`
/// subtractions, each counted as one addition and one negation.
pub fn variable_node_log(messages: &[TruncatedMessage]) -> Result<(Vec<DenseVector>, OpCount)> {
    if messages.len() < 2 {
        return Err(Error::InvalidArgument(
            "variable node needs a channel message and at least one incoming message".into(),
        ));
    }
    let q = messages[0].alphabet_size();
    for m in messages {
        if m.domain() != Domain::Log {
            return Err(Error::WrongDomain { expected: "log" });
        }
        if m.alphabet_size() != q {
            return Err(Error::LengthMismatch {
                left: q,
                right: m.alphabet_size(),
            });
        }
        if !m.is_full() {
            return Err(Error::InvalidArgument(
                "variable node inputs must have full support".into(),
            ));
        }
    }
    let mut total = messages[0].values().to_vec();
    for m in &messages[1..] {
        total.iter_mut().zip(m.values()).for_each(|(t, v)| *t += v);
    }
    let extrinsics = messages[1..]
        .iter()
        .map(|m| DenseVector::from_raw(total.iter().zip(m.values()).map(|(t, v)| t - v).collect()))
        .collect();
    let d_v = (messages.len() - 1) as u64;
    let q = q as u64;
    Ok((extrinsics, OpCount::new(2 * d_v * q, d_v * q)))
}

/// Expected arithmetic cost of one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub label: &'static str,
    pub multiplications: f64,
    pub additions: f64,
    pub negations: f64,
}

/// Cost of the check-node convolutions under several strategies.
///
/// A check node of degree `d_c` performs `d_c` convolutions, each over
/// `max(d_c - 1, 2)` operands. Besides the totals (`direct`,
/// `truncated_direct`, `wh_sparse`, `wh_dense`) the list carries the cost of
/// one forward transform of a `q'`-sparse input (`wh_forward_sparse`) and of
/// a dense input (`wh_forward_dense`).
pub fn cost_compare(q: usize, q_prime: usize, d_c: usize) -> Result<Vec<CostModel>> {
    if d_c == 0 {
        return Err(Error::InvalidArgument("d_c must be positive".into()));
    }
    let sparse = exact_expected_counts(q, q_prime)?;
    let dense = OpCount::dense(q);
    let qf = q as f64;
    let qpf = q_prime as f64;
    let convolutions = d_c as f64;
    let operands = d_c.saturating_sub(1).max(2) as f64;
    let pairs = operands - 1.0;

    let wh_total = |fwd_add: f64, fwd_neg: f64| CostModel {
        label: "",
        multiplications: convolutions * (pairs * qf + qf),
        additions: convolutions * (operands * fwd_add + dense.additions as f64),
        negations: convolutions * (operands * fwd_neg + dense.negations as f64),
    };
    Ok(vec![
        CostModel {
            label: "direct",
            multiplications: convolutions * pairs * qf * qf,
            additions: convolutions * pairs * qf * (qf - 1.0),
            negations: 0.0,
        },
        CostModel {
            label: "truncated_direct",
            multiplications: convolutions * pairs * qpf * qpf,
            additions: convolutions * pairs * qpf * qpf,
            negations: 0.0,
        },
        CostModel {
            label: "wh_sparse",
            ..wh_total(sparse.additions_f64(), sparse.negations_f64())
        },
        CostModel {
            label: "wh_dense",
            ..wh_total(dense.additions as f64, dense.negations as f64)
        },
        CostModel {
            label: "wh_forward_sparse",
            multiplications: 0.0,
            additions: sparse.additions_f64(),
            negations: sparse.negations_f64(),
        },
        CostModel {
            label: "wh_forward_dense",
            multiplications: 0.0,
            additions: dense.additions as f64,
            negations: dense.negations as f64,
        },
    ])
}

/// Relative tolerance of [`oracle_check`].
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Outcome of comparing the transform route with the direct convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub q: usize,
    pub trials: u64,
    pub seed: u64,
    /// Largest `|fast - direct| / max|direct|` over all trials.
    pub max_relative_error: f64,
    /// Largest `|sum(out) - sum(a) sum(b)|`.
    pub max_mass_error: f64,
    /// Largest deviation of `delta_0 * b` from `b`.
    pub max_identity_error: f64,
    /// Trials whose relative error exceeded the tolerance.
    pub failures: Vec<u64>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
            && self.max_mass_error <= 1e-12
            && self.max_identity_error <= ORACLE_TOLERANCE
    }
}

/// Random probability vector of length `q` drawn from `rng`.
pub fn random_probability<R: rand::Rng + ?Sized>(q: usize, rng: &mut R) -> Result<DenseVector> {
    let raw: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    DenseVector::new(raw.into_iter().map(|x| x / total).collect())
}

/// Runs `trials` random probability pairs through both convolution routes.
///
/// Trial `t` uses the generator [`crate::montecarlo::trial_rng`]`(seed, t)`.
pub fn oracle_check(q: usize, trials: u64, seed: u64) -> Result<OracleReport> {
    crate::error::check_pow2(q)?;
    let delta = DenseVector::delta(q, 0)?;
    let mut report = OracleReport {
        q,
        trials,
        seed,
        max_relative_error: 0.0,
        max_mass_error: 0.0,
        max_identity_error: 0.0,
        failures: Vec::new(),
    };
    for t in 0..trials {
        let mut rng = crate::montecarlo::trial_rng(seed, t);
        let a = random_probability(q, &mut rng)?;
        let b = random_probability(q, &mut rng)?;
        let direct = xor_convolve_direct(&a, &b)?;
        let (fast, _) = xor_convolve_wht(&a, &b)?;
        let scale = direct.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let rel = fast
            .values()
            .iter()
            .zip(direct.values())
            .map(|(x, y)| (x - y).abs() / scale)
            .fold(0.0, f64::max);
        report.max_relative_error = report.max_relative_error.max(rel);
        if rel.is_nan() || rel > ORACLE_TOLERANCE {
            report.failures.push(t);
        }
        let mass = (fast.sum() - a.sum() * b.sum()).abs();
        report.max_mass_error = report.max_mass_error.max(mass);
        let (id, _) = xor_convolve_wht(&delta, &b)?;
        let id_err = id
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        report.max_identity_error = report.max_identity_error.max(id_err);
    }
    Ok(report)
}
