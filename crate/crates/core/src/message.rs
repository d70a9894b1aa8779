//! Truncated and full-length messages.
//!
//! A truncated message stores values for a subset of the `q` symbols; the
//! remaining symbols share the leftover probability mass uniformly. Symbols
//! are indexed from 0.

use crate::error::{check_pow2, Error, Result};
use crate::MASS_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Probability,
    Log,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Probability => "probability",
            Domain::Log => "log",
        }
    }
}

/// Length-`q` real vector: a probability message or its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_pow2(values.len())?;
        Ok(Self { values })
    }

    pub fn zeros(q: usize) -> Result<Self> {
        Self::new(vec![0.0; q])
    }

    pub fn filled(q: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; q])
    }

    /// Unit mass on `symbol`.
    pub fn delta(q: usize, symbol: usize) -> Result<Self> {
        let mut v = Self::zeros(q)?;
        if symbol >= q {
            return Err(Error::SymbolOutOfRange { index: symbol, q });
        }
        v.values[symbol] = 1.0;
        Ok(v)
    }

    pub fn alphabet_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(values.len().is_power_of_two());
        Self { values }
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// A message that stores values only on `support`.
///
/// In the log domain `lambda0` records the additive constant that was applied
/// when converting from probabilities, if it is known. Normalizing back to
/// probabilities never needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMessage {
    domain: Domain,
    support: Vec<usize>,
    values: Vec<f64>,
    alphabet_size: usize,
    lambda0: Option<f64>,
}

impl TruncatedMessage {
    pub fn probability(q: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let msg = Self {
            domain: Domain::Probability,
            support,
            values,
            alphabet_size: q,
            lambda0: None,
        };
        msg.validate()?;
        Ok(msg)
    }

    pub fn log(
        q: usize,
        support: Vec<usize>,
        values: Vec<f64>,
        lambda0: Option<f64>,
    ) -> Result<Self> {
        let msg = Self {
            domain: Domain::Log,
            support,
            values,
            alphabet_size: q,
            lambda0,
        };
        msg.validate()?;
        Ok(msg)
    }

    /// Full-support probability message taken verbatim from `m`.
    pub fn from_dense(m: &DenseVector) -> Result<Self> {
        Self::probability(
            m.alphabet_size(),
            (0..m.alphabet_size()).collect(),
            m.values().to_vec(),
        )
    }

    fn validate(&self) -> Result<()> {
        let q = self.alphabet_size;
        check_pow2(q)?;
        if self.support.len() != self.values.len() {
            return Err(Error::SupportValueMismatch {
                support: self.support.len(),
                values: self.values.len(),
            });
        }
        if self.support.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (k, &s) in self.support.iter().enumerate() {
            if s >= q {
                return Err(Error::SymbolOutOfRange { index: s, q });
            }
            if k > 0 && self.support[k - 1] >= s {
                return Err(Error::UnsortedSupport(s));
            }
        }
        match self.domain {
            Domain::Probability => {
                for (&s, &v) in self.support.iter().zip(&self.values) {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::InvalidProbability { index: s, value: v });
                    }
                }
                let total: f64 = self.values.iter().sum();
                if total > 1.0 + MASS_EPS {
                    return Err(Error::ExcessMass(total));
                }
            }
            Domain::Log => {
                if let Some(&s) = self
                    .support
                    .iter()
                    .zip(&self.values)
                    .find_map(|(s, v)| (!v.is_finite()).then_some(s))
                {
                    return Err(Error::NonFiniteLog(s));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Number of stored symbols (`q'`).
    pub fn kept(&self) -> usize {
        self.support.len()
    }

    pub fn lambda0(&self) -> Option<f64> {
        self.lambda0
    }

    pub fn is_full(&self) -> bool {
        self.support.len() == self.alphabet_size
    }

    /// Stored value for `symbol`, if it is in the support.
    pub fn value(&self, symbol: usize) -> Option<f64> {
        self.support
            .binary_search(&symbol)
            .ok()
            .map(|k| self.values[k])
    }

    /// Mass not accounted for by the stored probabilities.
    pub fn tail_mass(&self) -> f64 {
        1.0 - self.values.iter().sum::<f64>()
    }

    fn expect(&self, domain: Domain) -> Result<()> {
        if self.domain == domain {
            Ok(())
        } else {
            Err(Error::WrongDomain {
                expected: domain.name(),
            })
        }
    }
}

/// Common probability of the symbols missing from `t`.
pub fn tail_probability(t: &TruncatedMessage) -> Result<f64> {
    t.expect(Domain::Probability)?;
    let q = t.alphabet_size();
    let total: f64 = t.values().iter().sum();
    if t.is_full() {
        if (total - 1.0).abs() > MASS_EPS {
            return Err(Error::FullSupportMass(total));
        }
        return Ok(0.0);
    }
    let tail = 1.0 - total;
    if tail < -MASS_EPS {
        return Err(Error::ExcessMass(total));
    }
    Ok(tail.max(0.0) / (q - t.kept()) as f64)
}

/// Expands a truncated probability message to length `q`, assigning the
/// leftover mass uniformly to the missing symbols.
pub fn complete_with_tail(t: &TruncatedMessage) -> Result<DenseVector> {
    let p0 = tail_probability(t)?;
    let mut out = vec![p0; t.alphabet_size()];
    for (&s, &v) in t.support().iter().zip(t.values()) {
        out[s] = v;
    }
    Ok(DenseVector::from_raw(out))
}

/// Splits `m` into a constant vector and a vector supported on `support`.
///
/// `uniform[j] = p0` everywhere and `sparse[i] = m[i] - p0` on the support,
/// where `p0` is the common off-support value (0 when `support` covers every
/// symbol). On the support, `uniform[i] + sparse[i]` reproduces `m[i]`
/// bit for bit whenever some double achieves that; otherwise (a rounding tie
/// at every candidate) it is off by one ulp.
pub fn split_uniform(m: &DenseVector, support: &[usize]) -> Result<(DenseVector, DenseVector)> {
    let q = m.alphabet_size();
    let mut on_support = vec![false; q];
    for &s in support {
        if s >= q {
            return Err(Error::SymbolOutOfRange { index: s, q });
        }
        on_support[s] = true;
    }
    let p0 = on_support.iter().position(|&b| !b).map_or(0.0, |j| m[j]);
    for (j, &v) in m.values().iter().enumerate() {
        if !on_support[j] && (v - p0).abs() > MASS_EPS {
            return Err(Error::NonUniformTail {
                index: j,
                value: v,
                tail: p0,
            });
        }
    }
    let sparse = m
        .values()
        .iter()
        .zip(&on_support)
        .map(|(&v, &keep)| {
            if keep {
                recombinable_difference(v, p0)
            } else {
                0.0
            }
        })
        .collect();
    Ok((
        DenseVector::from_raw(vec![p0; q]),
        DenseVector::from_raw(sparse),
    ))
}

/// `v - p0`, moved by up to two ulps when needed so that adding `p0` back
/// reproduces `v` exactly.
fn recombinable_difference(v: f64, p0: f64) -> f64 {
    let d = v - p0;
    if d + p0 == v {
        return d;
    }
    [
        d.next_up(),
        d.next_down(),
        d.next_up().next_up(),
        d.next_down().next_down(),
    ]
    .into_iter()
    .find(|c| c + p0 == v)
    .unwrap_or(d)
}

/// Converts probabilities to log values `ln(p) + lambda0`.
///
/// Without an explicit `lambda0` the constant `-max ln p` is used, so every
/// log value is at most zero.
pub fn to_log(t: &TruncatedMessage, lambda0: Option<f64>) -> Result<TruncatedMessage> {
    t.expect(Domain::Probability)?;
    if let Some((&s, &v)) = t.support().iter().zip(t.values()).find(|(_, &v)| v <= 0.0) {
        return Err(Error::InvalidProbability { index: s, value: v });
    }
    let logs: Vec<f64> = t.values().iter().map(|v| v.ln()).collect();
    let lambda0 =
        lambda0.unwrap_or_else(|| -logs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    TruncatedMessage::log(
        t.alphabet_size(),
        t.support().to_vec(),
        logs.into_iter().map(|l| l + lambda0).collect(),
        Some(lambda0),
    )
}

/// Normalizes a log message back to probabilities over its support.
pub fn to_prob(t: &TruncatedMessage) -> Result<TruncatedMessage> {
    t.expect(Domain::Log)?;
    let max = t.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = t.values().iter().map(|v| (v - max).exp()).collect();
    let norm: f64 = exps.iter().sum();
    let mut probs: Vec<f64> = exps.into_iter().map(|e| e / norm).collect();
    // rounding can push the normalized sum a hair over one
    let total: f64 = probs.iter().sum();
    if total > 1.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    TruncatedMessage::probability(t.alphabet_size(), t.support().to_vec(), probs)
}

/// Keeps the `q_keep` largest entries of `m`; ties go to the lower symbol.
pub fn truncate(m: &DenseVector, q_keep: usize) -> Result<TruncatedMessage> {
    let q = m.alphabet_size();
    if q_keep == 0 || q_keep > q {
        return Err(Error::WeightOutOfRange { q_prime: q_keep, q });
    }
    if let Some((i, &v)) = m
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| v.is_nan() || v < 0.0)
    {
        return Err(Error::InvalidProbability { index: i, value: v });
    }
    let mut order: Vec<usize> = (0..q).collect();
    // stable sort keeps lower indices first among equal values
    order.sort_by(|&a, &b| m[b].total_cmp(&m[a]));
    let mut support = order[..q_keep].to_vec();
    support.sort_unstable();
    let values = support.iter().map(|&s| m[s]).collect();
    TruncatedMessage::probability(q, support, values)
}
