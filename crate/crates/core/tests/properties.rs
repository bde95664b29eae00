use std::cmp::Ordering;

use proptest::prelude::*;

use binar_sort::keys::{
    bit_at_bytestring, encode_float_total_order, encode_signed, ByteString, Float, KeyCodec,
    Signed, Unsigned,
};
use binar_sort::oracle::{is_nondecreasing, is_permutation, reference_sort};
use binar_sort::variants::plan_buckets;
use binar_sort::{
    partition, sort, sort_iterative, sort_optimized, sort_parallel, Metrics, OptimizationConfig,
    SortRange,
};

fn config() -> impl Strategy<Value = OptimizationConfig> {
    (any::<bool>(), 0u32..6).prop_map(|(passthrough_loop, sortedness_check_after)| {
        OptimizationConfig {
            passthrough_loop,
            sortedness_check_after,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sort_matches_reference(input in prop::collection::vec(any::<u32>(), 0..600)) {
        let mut out = input.clone();
        let m = sort(&mut out, &Unsigned::U32);
        prop_assert_eq!(&out, &reference_sort(&input, Ord::cmp));
        prop_assert!(is_permutation(&input, &out, Ord::cmp));
        prop_assert!(m.within_bounds(input.len(), 32));
    }

    #[test]
    fn narrow_values_sort(input in prop::collection::vec(0u16..8, 0..300)) {
        let mut out = input.clone();
        let m = sort(&mut out, &Unsigned::U16);
        prop_assert!(is_nondecreasing(&out, Ord::cmp));
        prop_assert!(m.swaps <= m.bit_extractions);
        prop_assert!(m.bit_extractions <= 16 * input.len() as u64);
        prop_assert!(m.max_depth <= 17);
    }

    #[test]
    fn signed_sort(input in prop::collection::vec(any::<i64>(), 0..400)) {
        let mut out = input.clone();
        sort(&mut out, &Signed);
        prop_assert_eq!(out, reference_sort(&input, Ord::cmp));
    }

    #[test]
    fn float_sort(bits in prop::collection::vec(any::<u32>(), 0..400)) {
        let input: Vec<f32> = bits.into_iter().map(f32::from_bits).collect();
        let mut out = input.clone();
        sort(&mut out, &Float);
        let expected = reference_sort(&input, f32::total_cmp);
        prop_assert!(out.iter().zip(&expected).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn bytestring_sort(input in prop::collection::vec(prop::collection::vec(0u8..4, 0..6), 0..200)) {
        let codec = ByteString::for_items(&input);
        let mut out = input.clone();
        sort(&mut out, &codec);
        prop_assert_eq!(out, reference_sort(&input, Ord::cmp));
    }

    #[test]
    fn partition_postcondition(
        input in prop::collection::vec(any::<u8>(), 1..200),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        pos in 0u32..8,
    ) {
        let (x, y) = (a.index(input.len()), b.index(input.len()));
        let (lower, end) = (x.min(y), x.max(y) + 1);
        let mut seq = input.clone();
        let mut m = Metrics::default();
        let part = partition(&mut seq, SortRange::new(lower..end, pos), &Unsigned::U8, &mut m);

        prop_assert!(lower <= part.split && part.split <= end);
        for (i, v) in seq.iter().enumerate() {
            if i < lower || i >= end {
                prop_assert_eq!(*v, input[i]);
            } else {
                prop_assert_eq!(Unsigned::U8.bit_at(v, pos), i >= part.split);
            }
        }
        prop_assert!(is_permutation(&input[lower..end], &seq[lower..end], Ord::cmp));
        prop_assert_eq!(part.pass_through, part.split == lower || part.split == end);
        prop_assert_eq!(m.bit_extractions, (end - lower) as u64);
    }

    #[test]
    fn variants_agree_with_core(
        input in prop::collection::vec(any::<u64>().prop_map(|x| x >> (x % 64)), 0..500),
        config in config(),
        workers in 1usize..9,
    ) {
        let mut expected = input.clone();
        let base = sort(&mut expected, &Unsigned::U64);

        let mut it = input.clone();
        let mut m = Metrics::default();
        let peak = sort_iterative(&mut it, &Unsigned::U64, &mut m);
        prop_assert_eq!(&it, &expected);
        prop_assert_eq!(m, base);
        prop_assert!(peak <= 2 * (64 + 1));

        let mut opt = input.clone();
        let mut m = Metrics::default();
        sort_optimized(&mut opt, &Unsigned::U64, config, &mut m);
        prop_assert_eq!(&opt, &expected);
        prop_assert!(m.within_bounds(input.len(), 64));

        let mut par = input.clone();
        let mut m = Metrics::default();
        sort_parallel(&mut par, &Unsigned::U64, workers, &mut m).unwrap();
        prop_assert_eq!(&par, &expected);
        prop_assert_eq!(m.bit_extractions, base.bit_extractions);
    }

    #[test]
    fn buckets_partition_by_signature(input in prop::collection::vec(any::<u16>(), 0..400), workers in 1usize..17) {
        let mut seq = input.clone();
        let buckets = plan_buckets(&mut seq, &Unsigned::U16, workers, &mut Metrics::default()).unwrap();
        let mut next = 0;
        for b in &buckets {
            prop_assert_eq!(b.lower, next);
            next = b.end;
            // Every pending bucket shares its top `pos` bits.
            if b.pending {
                let top = |v: u16| if b.pos == 0 { 0 } else { v >> (16 - b.pos) };
                let sig = top(seq[b.lower]);
                prop_assert!(seq[b.lower..b.end].iter().all(|&v| top(v) == sig));
            }
        }
        prop_assert_eq!(next, input.len());
    }

    #[test]
    fn signed_encoding_monotone(a in any::<i32>(), b in any::<i32>()) {
        let ea = encode_signed(a as u32 as u64, 32);
        let eb = encode_signed(b as u32 as u64, 32);
        prop_assert_eq!(a.cmp(&b), ea.cmp(&eb));
    }

    #[test]
    fn float_encoding_monotone(a in any::<f64>(), b in any::<f64>()) {
        let ea = encode_float_total_order(a.to_bits(), 64);
        let eb = encode_float_total_order(b.to_bits(), 64);
        if let Some(ord) = a.partial_cmp(&b) {
            if !(a == 0.0 && b == 0.0) {
                prop_assert_eq!(ord, ea.cmp(&eb));
            }
        }
        prop_assert_eq!(a.total_cmp(&b), ea.cmp(&eb));
    }

    #[test]
    fn prefix_sorts_first(s in prop::collection::vec(any::<u8>(), 0..8), ext in prop::collection::vec(any::<u8>(), 1..8)) {
        let mut t = s.clone();
        t.extend(&ext);
        let codec = ByteString::for_items(&[&s, &t]);
        prop_assert_eq!(codec.compare(&s, &t), Ordering::Less);
        // The bitstring order agrees, by the default bit walk.
        let bitwise = (0..KeyCodec::<Vec<u8>>::width(&codec))
            .map(|p| (codec.bit_at(&s, p), codec.bit_at(&t, p)))
            .find(|(x, y)| x != y);
        prop_assert_eq!(bitwise, Some((false, true)));
        for pos in (s.len() as u32 * 8)..(t.len() as u32 * 8 + 8) {
            prop_assert!(!bit_at_bytestring(&s, pos));
        }
    }
}

#[test]
fn float_encoding_injective_at_width_16() {
    let mut seen = vec![false; 1 << 16];
    for x in 0..1u64 << 16 {
        let e = encode_float_total_order(x, 16) as usize;
        assert!(!seen[e], "collision at {x:#x}");
        seen[e] = true;
        let s = encode_signed(x, 16) as usize;
        assert_eq!(encode_signed(s as u64, 16), x);
    }
}

#[test]
fn bytestring_example() {
    let mut v: Vec<&[u8]> = vec![b"b", b"ab", b"a", b""];
    let codec = ByteString::for_items(&v);
    sort(&mut v, &codec);
    assert_eq!(v, [&b""[..], b"a", b"ab", b"b"]);
}

#[test]
fn large_random_sort_stays_within_work_bound() {
    let mut rng = binar_sort::oracle::Mt19937::new(100_000);
    let mut v: Vec<u32> = (0..100_000).map(|_| rng.next_u32()).collect();
    let m = sort(&mut v, &Unsigned::U32);
    assert!(m.bit_extractions <= 32 * 100_000);
    assert!(is_nondecreasing(&v, Ord::cmp));
}

#[test]
fn parallel_million_matches_sequential() {
    let mut rng = binar_sort::oracle::Mt19937::new(6);
    let input: Vec<u32> = (0..1_000_000).map(|_| rng.next_u32()).collect();
    let mut expected = input.clone();
    sort(&mut expected, &Unsigned::U32);
    for workers in [2, 4, 8] {
        let mut out = input.clone();
        sort_parallel(&mut out, &Unsigned::U32, workers, &mut Metrics::default()).unwrap();
        assert_eq!(out, expected, "workers {workers}");
    }
}
