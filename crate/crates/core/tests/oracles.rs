//! Independent oracles for the counting model.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use nbwht::exact::{binomial, ExpectationTable};
use nbwht::montecarlo::{for_each_combination, sample_positions, trial_rng};
use nbwht::wht::{count_only, count_positions, wht_sparse_counted, OpCount, PatternMask};
use nbwht::DenseVector;

fn ratio(n: BigInt, d: &BigInt) -> BigRational {
    BigRational::new(n, d.clone())
}

/// Expected counts summed over stages, from the chance that one or both
/// halves of a merge are live.
fn closed_form(q: usize, qp: usize) -> (BigRational, BigRational) {
    let total = binomial(q, qp);
    let qr = BigRational::from_integer(BigInt::from(q));
    let mut adds = BigRational::zero();
    let mut negs = BigRational::zero();
    let mut h = 1;
    while h < q {
        let one_dead = ratio(binomial(q - h, qp), &total);
        let both_dead = ratio(binomial(q - 2 * h, qp), &total);
        let right_live = BigRational::one() - &one_dead;
        let both_live = BigRational::one() - &one_dead - &one_dead + both_dead;
        negs += &qr / BigRational::from_integer(2.into()) * right_live;
        adds += &qr * both_live;
        h *= 2;
    }
    (adds, negs)
}

/// Butterfly-by-butterfly walk over the live flags.
fn simulate(live: &[bool]) -> OpCount {
    let q = live.len();
    let mut live = live.to_vec();
    let mut count = OpCount::ZERO;
    let mut h = 1;
    while h < q {
        for start in (0..q).step_by(2 * h) {
            let left = live[start..start + h].iter().any(|&b| b);
            let right = live[start + h..start + 2 * h].iter().any(|&b| b);
            for i in start..start + h {
                match (left, right) {
                    (true, true) => count += OpCount::new(2, 1),
                    (false, true) => count += OpCount::new(0, 1),
                    _ => {}
                }
                let any = left || right;
                live[i] = any;
                live[i + h] = any;
            }
        }
        h *= 2;
    }
    count
}

fn check_closed_form(table: &ExpectationTable, q: usize, max_weight: usize) {
    for qp in 0..=max_weight.min(q) {
        let e = table.get(q, qp).unwrap();
        let (a, m) = closed_form(q, qp);
        assert_eq!(e.additions, a, "additions q={q} q'={qp}");
        assert_eq!(e.negations, m, "negations q={q} q'={qp}");
    }
}

#[test]
fn recursion_matches_closed_form() {
    let table = ExpectationTable::new(128).unwrap();
    for q in table.lengths() {
        check_closed_form(&table, q, q);
    }
    let capped = ExpectationTable::with_max_weight(1024, 24).unwrap();
    check_closed_form(&capped, 256, 24);
    check_closed_form(&capped, 1024, 24);
}

#[test]
fn counts_match_butterfly_walk_on_every_small_mask() {
    for q in [2usize, 4, 8, 16] {
        for bits in 0u32..1 << q {
            let live: Vec<bool> = (0..q).map(|i| bits >> i & 1 == 1).collect();
            let mask = PatternMask::from_bits(live.clone()).unwrap();
            assert_eq!(count_only(&mask), simulate(&live), "q={q} bits={bits:#x}");
        }
    }
}

#[test]
fn enumerated_means_match_table() {
    let table = ExpectationTable::new(16).unwrap();
    for q in [2usize, 4, 8, 16] {
        for qp in 0..=q {
            let mut total = OpCount::ZERO;
            for_each_combination(q, qp, |pos| {
                let live: Vec<bool> = (0..q).map(|i| pos.contains(&i)).collect();
                total += simulate(&live);
            });
            let n = binomial(q, qp);
            let e = table.get(q, qp).unwrap();
            assert_eq!(e.additions, ratio(total.additions.into(), &n));
            assert_eq!(e.negations, ratio(total.negations.into(), &n));
        }
    }
}

#[test]
fn transform_matches_hadamard_matrix() {
    for q in [2usize, 8, 32, 64] {
        for t in 0..20 {
            let mut rng = trial_rng(3, t);
            let pos = sample_positions(q, (t as usize * 7) % (q + 1), &mut rng).unwrap();
            let mut v = vec![0.0; q];
            for (k, &p) in pos.iter().enumerate() {
                v[p] = (k as f64 + 1.0) * 0.25;
            }
            let mask = PatternMask::from_positions(q, &pos).unwrap();
            let (out, count) =
                wht_sparse_counted(&DenseVector::new(v.clone()).unwrap(), &mask).unwrap();
            for (row, got) in out.values().iter().enumerate() {
                let want: f64 = (0..q)
                    .map(|col| {
                        if (row & col).count_ones() % 2 == 0 {
                            v[col]
                        } else {
                            -v[col]
                        }
                    })
                    .sum();
                assert_eq!(*got, want, "q={q} row={row}");
            }
            assert_eq!(count, count_positions(q, &pos));
        }
    }
}

proptest! {
    #[test]
    fn walk_agrees_on_longer_masks(bits in proptest::collection::vec(any::<bool>(), 128)) {
        let mask = PatternMask::from_bits(bits.clone()).unwrap();
        prop_assert_eq!(count_only(&mask), simulate(&bits));
    }
}
