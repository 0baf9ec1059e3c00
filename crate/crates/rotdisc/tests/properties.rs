//! Randomized invariants across the pipeline: path oracles, continued
//! fraction round-trips, character algebra, decomposition replay, and the
//! constructor/classifier loop.

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use rotdisc::classify::{classify, construct_member, Parity, Verdict};
use rotdisc::discrepancy::{path_direct, path_recursive, running_extrema};
use rotdisc::numkernel::{cf_from_surd, ratio, surd_from_cf, CfExpansion, Ratio};
use rotdisc::orbit::Alpha;
use rotdisc::patterns::{character, is_null, is_prime, prime_decompose, word_map};

fn cf_strategy() -> impl Strategy<Value = CfExpansion> {
    (
        prop::collection::vec(1i64..=4, 0..3),
        prop::collection::vec(1i64..=4, 1..4),
    )
        .prop_map(|(tail, period)| {
            let mut prefix = vec![0i64];
            prefix.extend(tail);
            CfExpansion::from_i64(&prefix, &period).expect("sampled terms are valid")
        })
}

fn window_strategy() -> impl Strategy<Value = Ratio> {
    (2i64..=6, 1i64..=5)
        .prop_filter("window must be a reduced fraction in (0,1)", |(k, h)| {
            h < k && h.gcd(k) == 1
        })
        .prop_map(|(k, h)| ratio(h, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The two evaluators agree step by step, the path satisfies its own
    /// structural invariants, and every value obeys the residue constraint
    /// v_n = -h*n (mod k).
    #[test]
    fn path_oracles_agree(cf in cf_strategy(), c in window_strategy(), n in 50u64..300) {
        let alpha = Alpha::from_cf(&cf).unwrap();
        let direct = path_direct(&alpha, &c, n).unwrap();
        let recursive = path_recursive(&alpha, &c, n).unwrap();
        prop_assert_eq!(&direct.values, &recursive.values);
        prop_assert!(direct.invariants_hold());
        prop_assert!(running_extrema(&direct).invariants_hold());
        let (h, k) = (direct.h, direct.k);
        for (i, &v) in direct.values.iter().enumerate() {
            prop_assert_eq!((v + h * i as i64).rem_euclid(k), 0);
        }
    }

    /// Every sampled expansion survives the trip through its quadratic-surd
    /// value and back, term by term.
    #[test]
    fn expansion_surd_round_trip(cf in cf_strategy()) {
        let surd = surd_from_cf(&cf).unwrap();
        let back = cf_from_surd(&surd).unwrap();
        for i in 0..24usize {
            prop_assert_eq!(cf.term(i), back.term(i), "term {} after round trip", i);
        }
    }

    /// Expansion literals parse back to the expansion they display.
    #[test]
    fn literal_round_trip(cf in cf_strategy()) {
        let literal = cf.to_string();
        let parsed: CfExpansion = literal.parse().unwrap();
        for i in 0..24usize {
            prop_assert_eq!(cf.term(i), parsed.term(i), "term {} of {}", i, literal);
        }
    }

    /// Evaluating a concatenated word equals evaluating its halves in order.
    #[test]
    fn word_evaluation_is_multiplicative(
        k in 2u64..=4,
        a in prop::collection::vec(0u64..4, 0..6),
        b in prop::collection::vec(0u64..4, 0..6),
    ) {
        let a: Vec<u64> = a.into_iter().map(|x| x % k).collect();
        let b: Vec<u64> = b.into_iter().map(|x| x % k).collect();
        let joined: Vec<u64> = a.iter().chain(&b).copied().collect();
        let whole = word_map(&joined, k).unwrap();
        let first = word_map(&a, k).unwrap();
        let second = word_map(&b, k).unwrap();
        for u in 0..k {
            for v in 0..k {
                prop_assert_eq!(
                    whole.apply((u, v)),
                    second.apply(first.apply((u, v)))
                );
            }
        }
    }

    /// Inserting a null block anywhere leaves the character unchanged.
    #[test]
    fn null_insertion_preserves_character(
        tuple in prop::collection::vec(0u64..2, 0..6),
        block_index in 0usize..7,
        split in 0usize..7,
    ) {
        const NULL_BLOCKS: [&[u64]; 7] = [
            &[0, 0],
            &[1, 1, 1],
            &[0, 1, 0, 1],
            &[1, 0, 1, 0],
            &[0, 1, 1, 0, 1, 1],
            &[1, 0, 1, 1, 0, 1],
            &[1, 1, 0, 1, 1, 0],
        ];
        let block = NULL_BLOCKS[block_index];
        prop_assume!(is_null(block, 2).unwrap());
        let at = split.min(tuple.len());
        let mut enlarged = tuple.clone();
        enlarged.splice(at..at, block.iter().copied());
        prop_assert_eq!(
            character(&enlarged, 2).unwrap(),
            character(&tuple, 2).unwrap()
        );
    }

    /// Decomposition is lossless and its core is prime.
    #[test]
    fn decomposition_replays_to_input(
        k in 2u64..=3,
        tuple in prop::collection::vec(0u64..3, 0..9),
    ) {
        let tuple: Vec<u64> = tuple.into_iter().map(|x| x % k).collect();
        let d = prime_decompose(&tuple, k).unwrap();
        prop_assert_eq!(d.replay(), tuple);
        prop_assert!(is_prime(&d.core, k).unwrap());
    }

    /// The constructor always delivers the requested side, with the witness
    /// parity to match, and never rewrites the prefix it was given.
    #[test]
    fn constructed_members_classify_as_requested(
        prefix in prop::collection::vec(0i64..=4, 0..4),
        k in 2i64..=4,
        odd_parity in any::<bool>(),
    ) {
        // Later entries must be positive partial quotients.
        prop_assume!(prefix.iter().skip(1).all(|&b| b >= 1));
        let prefix: Vec<BigInt> = prefix.iter().map(|&b| BigInt::from(b)).collect();
        let (parity, want) = if odd_parity {
            (Parity::Odd, Verdict::BoundedBelow)
        } else {
            (Parity::Even, Verdict::BoundedAbove)
        };
        let expansion = construct_member(&prefix, k, parity).unwrap();
        prop_assert_eq!(&expansion.prefix()[..prefix.len()], &prefix[..]);
        let classification = classify(&expansion, 1, k).unwrap();
        prop_assert_eq!(classification.verdict, want);
        prop_assert!(parity.matches(classification.witness_m.unwrap()));
        prop_assert_eq!(classification.witness_m, classification.condition2_m);
    }
}
