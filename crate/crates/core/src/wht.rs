//! Fast Walsh-Hadamard transforms.
//!
//! The network is the half-split recursion: transform the left and right
//! halves, then output `L + R` in the first half and `L - R` in the second.
//! Unrolled, that is the usual in-place butterfly with strides
//! `1, 2, ..., q/2`, the largest stride merging the two top-level halves.
//!
//! Operation counting follows structural zeros. A merge of two half
//! transforms of length `h` costs
//!
//! | left   | right  | additions | negations |
//! |--------|--------|-----------|-----------|
//! | zero   | zero   | 0         | 0         |
//! | live   | zero   | 0         | 0         |
//! | zero   | live   | 0         | `h`       |
//! | live   | live   | `2h`      | `h`       |
//!
//! A subtraction `a - b` is one negation and one addition. Once a block holds
//! a non-zero input, every entry of its transform is treated as non-zero;
//! accidental cancellation is ignored. Per-pattern counts depend on the
//! wiring of the network; averages over all patterns of a given weight do
//! not.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::error::{check_pow2, Error, Result};
use crate::message::DenseVector;

/// Tally of binary additions and unary negations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCount {
    pub additions: u64,
    pub negations: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount {
        additions: 0,
        negations: 0,
    };

    pub fn new(additions: u64, negations: u64) -> Self {
        Self {
            additions,
            negations,
        }
    }

    /// Cost of a transform of length `q` with every input non-zero:
    /// `q log2 q` additions and `(q/2) log2 q` negations.
    pub fn dense(q: usize) -> Self {
        let m = q.trailing_zeros() as u64;
        Self::new(q as u64 * m, q as u64 / 2 * m)
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(
            self.additions + rhs.additions,
            self.negations + rhs.negations,
        )
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        *self = *self + rhs;
    }
}

impl Sum for OpCount {
    fn sum<I: Iterator<Item = OpCount>>(iter: I) -> OpCount {
        iter.fold(OpCount::ZERO, Add::add)
    }
}

impl fmt::Display for OpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "additions={} negations={}",
            self.additions, self.negations
        )
    }
}

/// Indicator of the non-zero positions of a length-`q` input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternMask {
    bits: Vec<bool>,
    weight: usize,
}

impl PatternMask {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        check_pow2(bits.len())?;
        let weight = bits.iter().filter(|&&b| b).count();
        Ok(Self { bits, weight })
    }

    pub fn empty(q: usize) -> Result<Self> {
        Self::from_bits(vec![false; q])
    }

    pub fn full(q: usize) -> Result<Self> {
        Self::from_bits(vec![true; q])
    }

    /// Mask with ones at `positions` (0-based, any order, duplicates allowed).
    pub fn from_positions(q: usize, positions: &[usize]) -> Result<Self> {
        let mut bits = vec![false; q];
        for &p in positions {
            if p >= q {
                return Err(Error::SymbolOutOfRange { index: p, q });
            }
            bits[p] = true;
        }
        Self::from_bits(bits)
    }

    /// Structural pattern of `v`: ones where the value is non-zero.
    pub fn from_values(v: &DenseVector) -> Self {
        let bits: Vec<bool> = v.values().iter().map(|&x| x != 0.0).collect();
        let weight = bits.iter().filter(|&&b| b).count();
        Self { bits, weight }
    }

    /// Parses a hexadecimal mask; the least significant bit is symbol 0.
    ///
    /// An optional `0x` prefix and `_` separators are accepted. Bits at or
    /// above `q` must be zero.
    pub fn from_hex(q: usize, hex: &str) -> Result<Self> {
        check_pow2(q)?;
        let digits = hex
            .trim()
            .strip_prefix("0x")
            .or_else(|| hex.trim().strip_prefix("0X"))
            .unwrap_or(hex.trim());
        if digits.is_empty() {
            return Err(Error::MalformedMask("empty mask".into()));
        }
        let mut bits = vec![false; q];
        for (nibble_idx, c) in digits.chars().rev().filter(|&c| c != '_').enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::MalformedMask(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let pos = nibble_idx * 4 + b;
                    if pos >= q {
                        return Err(Error::MalformedMask(format!(
                            "bit {pos} set but alphabet size is {q}"
                        )));
                    }
                    bits[pos] = true;
                }
            }
        }
        Self::from_bits(bits)
    }

    /// Hexadecimal encoding, `ceil(q/4)` digits, most significant first.
    pub fn to_hex(&self) -> String {
        let digits = self.bits.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .filter(|b| self.bits.get(d * 4 + b).copied().unwrap_or(false))
                    .fold(0u32, |acc, b| acc | 1 << b);
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight == 0
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Sorted positions of the ones.
    pub fn positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// In-place unnormalized transform of a power-of-two length slice.
pub fn fwht_in_place(data: &mut [f64]) -> Result<()> {
    check_pow2(data.len())?;
    let q = data.len();
    let mut h = 1;
    while h < q {
        for block in data.chunks_exact_mut(2 * h) {
            let (left, right) = block.split_at_mut(h);
            for (a, b) in left.iter_mut().zip(right.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// `H_q v` for the Sylvester Hadamard matrix, without normalization.
pub fn wht_dense(v: &DenseVector) -> DenseVector {
    let mut out = v.values().to_vec();
    fwht_in_place(&mut out).expect("DenseVector length is a power of two");
    DenseVector::from_raw(out)
}

/// Inverse of [`wht_dense`]: the forward transform scaled by `1/q`.
pub fn wht_inverse(v: &DenseVector) -> DenseVector {
    let mut out = wht_dense(v).into_values();
    // q is a power of two, so the scaling is exact
    let scale = 1.0 / out.len() as f64;
    out.iter_mut().for_each(|x| *x *= scale);
    DenseVector::from_raw(out)
}

/// Forward transform that skips structurally zero butterflies and counts the
/// operations it performs.
///
/// Every entry outside `mask` must be zero. For inputs whose non-zero
/// positions are exactly the mask (and with no exact cancellations), the
/// result is bit-identical to [`wht_dense`].
pub fn wht_sparse_counted(
    sparse: &DenseVector,
    mask: &PatternMask,
) -> Result<(DenseVector, OpCount)> {
    let q = sparse.alphabet_size();
    if mask.len() != q {
        return Err(Error::LengthMismatch {
            left: q,
            right: mask.len(),
        });
    }
    if let Some((i, &v)) = sparse
        .values()
        .iter()
        .enumerate()
        .find(|&(i, &v)| v != 0.0 && !mask.get(i))
    {
        return Err(Error::MaskViolation { index: i, value: v });
    }

    let mut data = sparse.values().to_vec();
    let mut live = mask.bits().to_vec();
    let mut count = OpCount::ZERO;
    let mut h = 1;
    while h < q {
        for (block, flags) in data.chunks_exact_mut(2 * h).zip(live.chunks_exact_mut(2)) {
            let (left, right) = block.split_at_mut(h);
            match (flags[0], flags[1]) {
                (false, false) => {}
                (true, false) => right.copy_from_slice(left),
                (false, true) => {
                    for (a, b) in left.iter_mut().zip(right.iter_mut()) {
                        *a = *b;
                        *b = -*b;
                    }
                    count.negations += h as u64;
                }
                (true, true) => {
                    for (a, b) in left.iter_mut().zip(right.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = x + y;
                        *b = x - y;
                    }
                    count.additions += 2 * h as u64;
                    count.negations += h as u64;
                }
            }
        }
        // one flag per block of the next stage
        let merged: Vec<bool> = live.chunks_exact(2).map(|f| f[0] || f[1]).collect();
        live = merged;
        h *= 2;
    }
    Ok((DenseVector::from_raw(data), count))
}

/// Operation count of [`wht_sparse_counted`] for any input with pattern
/// `mask`, computed from the mask alone.
pub fn count_only(mask: &PatternMask) -> OpCount {
    count_positions(mask.len(), &mask.positions())
}

/// [`count_only`] from the sorted non-zero positions of a length-`q` input.
///
/// Runs in `O(q' log q)` time.
pub fn count_positions(q: usize, positions: &[usize]) -> OpCount {
    debug_assert!(q.is_power_of_two());
    debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    fn rec(lo: usize, len: usize, pos: &[usize]) -> OpCount {
        if pos.is_empty() || len == 1 {
            return OpCount::ZERO;
        }
        let half = len / 2;
        let split = pos.partition_point(|&p| p < lo + half);
        let (left, right) = pos.split_at(split);
        let mut c = rec(lo, half, left) + rec(lo + half, half, right);
        if !right.is_empty() {
            c.negations += half as u64;
            if !left.is_empty() {
                c.additions += len as u64;
            }
        }
        c
    }
    rec(0, q, positions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hadamard_entry(i: usize, j: usize) -> f64 {
        if (i & j).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    // matrix-vector product with the explicit Sylvester matrix
    fn wht_by_matrix(v: &[f64]) -> Vec<f64> {
        (0..v.len())
            .map(|i| (0..v.len()).map(|j| hadamard_entry(i, j) * v[j]).sum())
            .collect()
    }

    fn mask(q: usize, pos: &[usize]) -> PatternMask {
        PatternMask::from_positions(q, pos).unwrap()
    }

    #[test]
    fn dense_examples() {
        let v = DenseVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(wht_dense(&v).values(), &[2.0, 0.0]);

        for q in [2, 8, 64, 1024] {
            let p0 = 1.0 / q as f64;
            let out = wht_dense(&DenseVector::filled(q, p0).unwrap());
            assert_eq!(out[0], q as f64 * p0);
            assert!(out.values()[1..].iter().all(|&x| x == 0.0));
        }

        let v = DenseVector::new(vec![2.0, 0.0]).unwrap();
        assert_eq!(wht_inverse(&v).values(), &[1.0, 1.0]);

        let mut spike = vec![0.0; 16];
        spike[0] = 16.0;
        let ones = wht_inverse(&DenseVector::new(spike).unwrap());
        assert_eq!(ones.values(), &[1.0; 16]);

        assert_eq!(fwht_in_place(&mut [0.0; 3]), Err(Error::NotPowerOfTwo(3)));
    }

    #[test]
    fn dense_matches_hadamard_matrix() {
        let v: Vec<f64> = (0..32).map(|i| (i as f64 * 0.37).sin()).collect();
        let fast = wht_dense(&DenseVector::new(v.clone()).unwrap());
        for (a, b) in fast.values().iter().zip(wht_by_matrix(&v)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn figure_patterns() {
        // adjacent pair at the very start: one butterfly at the first stage
        assert_eq!(count_only(&mask(8, &[0, 1])), OpCount::new(2, 1));
        // one non-zero in each top-level half
        assert_eq!(count_only(&mask(8, &[1, 5])), OpCount::new(8, 6));
    }

    #[test]
    fn small_masks() {
        assert_eq!(count_only(&mask(2, &[1])), OpCount::new(0, 1));
        assert_eq!(count_only(&mask(2, &[0])), OpCount::ZERO);
        assert_eq!(count_only(&mask(2, &[0, 1])), OpCount::new(2, 1));
        for q in [2, 4, 8, 64, 4096] {
            assert_eq!(count_only(&PatternMask::empty(q).unwrap()), OpCount::ZERO);
            assert_eq!(
                count_only(&PatternMask::full(q).unwrap()),
                OpCount::dense(q)
            );
        }
        assert_eq!(OpCount::dense(8), OpCount::new(24, 12));
    }

    #[test]
    fn sparse_rejects_inconsistent_mask() {
        let v = DenseVector::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            wht_sparse_counted(&v, &mask(4, &[0])),
            Err(Error::MaskViolation { index: 1, .. })
        ));
        assert!(wht_sparse_counted(&v, &mask(8, &[1])).is_err());
        // a mask may cover zero-valued entries
        assert!(wht_sparse_counted(&v, &mask(4, &[1, 2])).is_ok());
    }

    #[test]
    fn hex_masks() {
        let m = PatternMask::from_hex(8, "03").unwrap();
        assert_eq!(m.positions(), vec![0, 1]);
        assert_eq!(m.to_hex(), "03");
        assert_eq!(
            PatternMask::from_hex(8, "0x22").unwrap().positions(),
            vec![1, 5]
        );
        assert_eq!(PatternMask::from_hex(2, "2").unwrap().positions(), vec![1]);
        assert_eq!(
            PatternMask::from_hex(16, "8000").unwrap().positions(),
            vec![15]
        );
        assert_eq!(PatternMask::from_hex(8, "0003").unwrap().weight(), 2);
        assert!(PatternMask::from_hex(8, "100").is_err());
        assert!(PatternMask::from_hex(2, "4").is_err());
        assert!(PatternMask::from_hex(8, "xyz").is_err());
        assert!(PatternMask::from_hex(8, "").is_err());
        assert!(PatternMask::from_hex(6, "1").is_err());
    }

    #[test]
    fn adding_a_position_never_reduces_additions() {
        for q in [2usize, 4, 8, 16] {
            for bits in 0u32..(1 << q) {
                let base = count_positions(q, &positions_of(bits, q));
                for extra in (0..q).filter(|&b| bits >> b & 1 == 0) {
                    let grown = count_positions(q, &positions_of(bits | 1 << extra, q));
                    assert!(grown.additions >= base.additions, "q={q} bits={bits:b}");
                }
            }
        }
    }

    fn positions_of(bits: u32, q: usize) -> Vec<usize> {
        (0..q).filter(|&b| bits >> b & 1 == 1).collect()
    }

    fn masked_vector() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (1u32..=8).prop_flat_map(|m| {
            let q = 1usize << m;
            (
                proptest::collection::vec(prop_oneof![-10.0f64..-1e-3, 1e-3f64..10.0], q),
                proptest::collection::vec(any::<bool>(), q),
            )
        })
    }

    proptest! {
        #[test]
        fn sparse_matches_dense((values, bits) in masked_vector()) {
            let v: Vec<f64> = values.iter().zip(&bits).map(|(&x, &b)| if b { x } else { 0.0 }).collect();
            let v = DenseVector::new(v).unwrap();
            let m = PatternMask::from_bits(bits).unwrap();
            let (out, count) = wht_sparse_counted(&v, &m).unwrap();
            let dense = wht_dense(&v);
            for (a, b) in out.values().iter().zip(dense.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(count, count_only(&m));
            let full = OpCount::dense(m.len());
            prop_assert!(count.additions <= full.additions);
            prop_assert!(count.negations <= full.negations);
        }

        #[test]
        fn transform_is_an_involution_up_to_scale(
            v in (1u32..=10).prop_flat_map(|m| proptest::collection::vec(-1.0f64..1.0, 1usize << m))
        ) {
            let q = v.len() as f64;
            let d = DenseVector::new(v.clone()).unwrap();
            let twice = wht_dense(&wht_dense(&d));
            let back = wht_inverse(&wht_dense(&d));
            for ((a, b), x) in twice.values().iter().zip(back.values()).zip(&v) {
                prop_assert!((a - q * x).abs() <= 1e-12 * q * q);
                prop_assert!((b - x).abs() <= 1e-12 * q);
            }
        }

        #[test]
        fn hex_round_trip(bits in (1u32..=9).prop_flat_map(|m| proptest::collection::vec(any::<bool>(), 1usize << m))) {
            let m = PatternMask::from_bits(bits).unwrap();
            prop_assert_eq!(PatternMask::from_hex(m.len(), &m.to_hex()).unwrap(), m);
        }
    }
}
