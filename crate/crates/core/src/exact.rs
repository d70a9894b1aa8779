//! Exact expected operation counts of the sparse transform.
//!
//! For a uniformly random non-zero pattern of weight `q'` in a length-`q`
//! input, the split `(q_L, q_R)` of the weight between the two halves is
//! hypergeometric with weights `C(q/2, q_L) C(q/2, q_R) / C(q, q')`. The
//! expectations at length `q` follow from those at `q/2` plus the merge
//! cost: `q` additions when both halves are non-zero and `q/2` negations
//! when the right half is non-zero. The table is built bottom-up from the
//! length-2 base case in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{check_pow2, Error, Result};

/// Expected additions and negations for one `(q, q')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub additions: BigRational,
    pub negations: BigRational,
}

impl Expectation {
    fn zero() -> Self {
        Self {
            additions: BigRational::zero(),
            negations: BigRational::zero(),
        }
    }

    fn from_ints(additions: i64, negations: BigRational) -> Self {
        Self {
            additions: BigRational::from_integer(additions.into()),
            negations,
        }
    }

    pub fn additions_f64(&self) -> f64 {
        self.additions.to_f64().unwrap_or(f64::NAN)
    }

    pub fn negations_f64(&self) -> f64 {
        self.negations.to_f64().unwrap_or(f64::NAN)
    }
}

/// Which half being non-zero triggers the `q/2` extra negations at a merge.
///
/// The transform itself negates the right half, so [`NegationRule::RightNonZero`]
/// matches the instrumented counts pattern by pattern. The left-half variant
/// yields the same expectations because the hypergeometric weights are
/// symmetric in `(q_L, q_R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegationRule {
    #[default]
    RightNonZero,
    LeftNonZero,
}

/// One `(q_L, q_R)` term of the expansion of `E[.|q, q']`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub q_left: usize,
    pub q_right: usize,
    /// `C(q/2, q_L) C(q/2, q_R) / C(q, q')`
    pub weight: BigRational,
    pub left: Expectation,
    pub right: Expectation,
    pub extra_additions: u64,
    pub extra_negations: u64,
}

/// Memoized expectations for every power-of-two length up to `max_q`.
#[derive(Debug, Clone)]
pub struct ExpectationTable {
    // levels[k] holds length 2^(k+1), indexed by weight up to the cap
    levels: Vec<Vec<Expectation>>,
    max_weight: usize,
    rule: NegationRule,
}

impl ExpectationTable {
    pub fn new(max_q: usize) -> Result<Self> {
        Self::build(max_q, max_q, NegationRule::default())
    }

    pub fn with_rule(max_q: usize, rule: NegationRule) -> Result<Self> {
        Self::build(max_q, max_q, rule)
    }

    /// Table restricted to weights `0..=max_weight`.
    ///
    /// Entries of weight `w` only depend on entries of weight `<= w` at the
    /// previous length, so small weights at large `q` stay cheap.
    pub fn with_max_weight(max_q: usize, max_weight: usize) -> Result<Self> {
        Self::build(max_q, max_weight, NegationRule::default())
    }

    fn build(max_q: usize, max_weight: usize, rule: NegationRule) -> Result<Self> {
        let m = check_pow2(max_q)?;
        if m == 0 {
            return Err(Error::InvalidArgument(
                "expectation table needs q >= 2".into(),
            ));
        }
        let mut levels = vec![base_level()];
        levels[0].truncate(max_weight + 1);
        for k in 2..=m {
            let q = 1usize << k;
            let prev = levels.last().unwrap();
            let level = (0..=q.min(max_weight))
                .map(|qp| combine(q, qp, prev, rule).1)
                .collect();
            levels.push(level);
        }
        Ok(Self {
            levels,
            max_weight,
            rule,
        })
    }

    pub fn max_q(&self) -> usize {
        1 << self.levels.len()
    }

    pub fn rule(&self) -> NegationRule {
        self.rule
    }

    /// Lengths covered by the table, ascending.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.levels.len()).map(|k| 1usize << k)
    }

    pub fn get(&self, q: usize, q_prime: usize) -> Result<&Expectation> {
        let k = check_pow2(q)? as usize;
        if k == 0 || k > self.levels.len() {
            return Err(Error::InvalidArgument(format!(
                "length {q} not covered by table up to {}",
                self.max_q()
            )));
        }
        if q_prime > q {
            return Err(Error::WeightOutOfRange { q_prime, q });
        }
        self.levels[k - 1].get(q_prime).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "weight {q_prime} above the table cap {}",
                self.max_weight
            ))
        })
    }

    /// All stored expectations for length `q`, indexed by weight.
    pub fn row(&self, q: usize) -> Result<&[Expectation]> {
        self.get(q, 0)?;
        Ok(&self.levels[q.trailing_zeros() as usize - 1])
    }

    /// The weighted terms that make up `E[.|q, q']`.
    ///
    /// Requires `q >= 4`: the length-2 entries are base cases.
    pub fn expansion(&self, q: usize, q_prime: usize) -> Result<Vec<ExpansionTerm>> {
        self.get(q, q_prime)?;
        if q < 4 {
            return Err(Error::InvalidArgument(
                "length 2 is a base case with no expansion".into(),
            ));
        }
        let prev = &self.levels[q.trailing_zeros() as usize - 2];
        Ok(combine(q, q_prime, prev, self.rule).0)
    }
}

/// Length-2 base case: patterns 00, 10, 01, 11 cost (0,0), (0,0), (0,1), (2,1).
/// Either negation rule charges exactly one of the two weight-1 patterns.
fn base_level() -> Vec<Expectation> {
    let half = BigRational::new(1.into(), 2.into());
    vec![
        Expectation::zero(),
        Expectation::from_ints(0, half),
        Expectation::from_ints(2, BigRational::from_integer(1.into())),
    ]
}

/// `C(n, k)` for `k = 0..=upto`.
fn binomial_prefix(n: usize, upto: usize) -> Vec<BigInt> {
    let upto = upto.min(n);
    let mut row = Vec::with_capacity(upto + 1);
    let mut c = BigInt::from(1);
    row.push(c.clone());
    for k in 1..=upto {
        c = c * BigInt::from(n - k + 1) / BigInt::from(k);
        row.push(c.clone());
    }
    row
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (1..=k).fold(BigInt::from(1), |acc, i| {
        acc * BigInt::from(n - k + i) / BigInt::from(i)
    })
}

fn combine(
    q: usize,
    q_prime: usize,
    prev: &[Expectation],
    rule: NegationRule,
) -> (Vec<ExpansionTerm>, Expectation) {
    let half = q / 2;
    let lo = q_prime.saturating_sub(half);
    let hi = q_prime.min(half);
    let halves = binomial_prefix(half, hi);
    let total = binomial(q, q_prime);
    let mut terms = Vec::with_capacity(hi + 1 - lo);
    let mut acc = Expectation::zero();
    for q_left in lo..=hi {
        let q_right = q_prime - q_left;
        let weight = BigRational::new(&halves[q_left] * &halves[q_right], total.clone());
        let extra_additions = if q_left > 0 && q_right > 0 {
            q as u64
        } else {
            0
        };
        let trigger = match rule {
            NegationRule::RightNonZero => q_right > 0,
            NegationRule::LeftNonZero => q_left > 0,
        };
        let extra_negations = if trigger { half as u64 } else { 0 };
        let (left, right) = (&prev[q_left], &prev[q_right]);
        acc.additions += &weight
            * (&left.additions
                + &right.additions
                + BigRational::from_integer(extra_additions.into()));
        acc.negations += &weight
            * (&left.negations
                + &right.negations
                + BigRational::from_integer(extra_negations.into()));
        terms.push(ExpansionTerm {
            q_left,
            q_right,
            weight,
            left: left.clone(),
            right: right.clone(),
            extra_additions,
            extra_negations,
        });
    }
    (terms, acc)
}

/// `E[A | q, q']` and `E[M | q, q']` as exact rationals.
pub fn exact_expected_counts(q: usize, q_prime: usize) -> Result<Expectation> {
    check_pow2(q)?;
    if q < 2 {
        return Err(Error::InvalidArgument("need q >= 2".into()));
    }
    if q_prime > q {
        return Err(Error::WeightOutOfRange { q_prime, q });
    }
    Ok(ExpectationTable::with_max_weight(q, q_prime)?
        .get(q, q_prime)?
        .clone())
}

/// Builds the full table for every power-of-two length up to `q`.
pub fn exact_table(q: usize) -> Result<ExpectationTable> {
    ExpectationTable::new(q)
}
