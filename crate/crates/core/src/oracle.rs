//! Independent correctness machinery: a merge-sort reference, sortedness and
//! permutation predicates, and reproducible test data from MT19937.
//!
//! Nothing here depends on the radix sort or the key codecs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

const N: usize = 624;
const M: usize = 397;
const MATRIX_A: u32 = 0x9908_B0DF;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7FFF_FFFF;

/// The classic 32-bit Mersenne Twister.
#[derive(Clone)]
pub struct Mt19937 {
    state: [u32; N],
    index: usize,
}

impl Mt19937 {
    pub const DEFAULT_SEED: u32 = 5489;

    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; N];
        state[0] = seed;
        for i in 1..N {
            let prev = state[i - 1];
            state[i] = 1_812_433_253u32
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        Mt19937 { state, index: N }
    }

    fn twist(&mut self) {
        for i in 0..N {
            let y = (self.state[i] & UPPER_MASK) | (self.state[(i + 1) % N] & LOWER_MASK);
            let mut next = self.state[(i + M) % N] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= N {
            self.twist();
        }
        let mut y = self.state[self.index];
        self.index += 1;

        y ^= y >> 11;
        y ^= (y << 7) & 0x9D2C_5680;
        y ^= (y << 15) & 0xEFC6_0000;
        y ^= y >> 18;
        y
    }

    /// Two draws, the first one as the high half.
    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }
}

impl Default for Mt19937 {
    fn default() -> Self {
        Mt19937::new(Self::DEFAULT_SEED)
    }
}

impl fmt::Debug for Mt19937 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mt19937")
            .field("index", &self.index)
            .finish_non_exhaustive()
    }
}

/// Top-down merge sort. Returns a sorted copy; the input is not modified.
pub fn reference_sort<T, F>(seq: &[T], order: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T, &T) -> Ordering,
{
    let mut out = seq.to_vec();
    let mut scratch = seq.to_vec();
    merge_sort(&mut out, &mut scratch, &order);
    out
}

fn merge_sort<T: Clone, F: Fn(&T, &T) -> Ordering>(seq: &mut [T], scratch: &mut [T], order: &F) {
    let len = seq.len();
    if len < 2 {
        return;
    }
    let mid = len / 2;
    {
        let (left, right) = seq.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        merge_sort(left, sl, order);
        merge_sort(right, sr, order);
    }

    let (mut i, mut j) = (0, mid);
    for slot in scratch.iter_mut().take(len) {
        let take_left = j >= len || (i < mid && order(&seq[i], &seq[j]) != Ordering::Greater);
        if take_left {
            *slot = seq[i].clone();
            i += 1;
        } else {
            *slot = seq[j].clone();
            j += 1;
        }
    }
    seq.clone_from_slice(&scratch[..len]);
}

pub fn is_nondecreasing<T, F>(seq: &[T], order: F) -> bool
where
    F: Fn(&T, &T) -> Ordering,
{
    seq.windows(2)
        .all(|w| order(&w[0], &w[1]) != Ordering::Greater)
}

/// Multiset equality, decided by comparing merge-sorted copies; elements are
/// equal when `order` says so.
pub fn is_permutation<T, F>(a: &[T], b: &[T], order: F) -> bool
where
    T: Clone,
    F: Fn(&T, &T) -> Ordering,
{
    if a.len() != b.len() {
        return false;
    }
    let sa = reference_sort(a, &order);
    let sb = reference_sort(b, &order);
    sa.iter()
        .zip(&sb)
        .all(|(x, y)| order(x, y) == Ordering::Equal)
}

/// Element type of a generated case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyKind {
    Unsigned32,
    Unsigned64,
    Signed32,
    Float64,
    ByteString,
}

impl KeyKind {
    pub const ALL: [KeyKind; 5] = [
        KeyKind::Unsigned32,
        KeyKind::Unsigned64,
        KeyKind::Signed32,
        KeyKind::Float64,
        KeyKind::ByteString,
    ];

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            KeyKind::Unsigned32 => "u32",
            KeyKind::Unsigned64 => "u64",
            KeyKind::Signed32 => "i32",
            KeyKind::Float64 => "f64",
            KeyKind::ByteString => "str",
        }
    }
}

impl fmt::Display for KeyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KeyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KeyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown key type '{s}' (expected u32, u64, i32, f64 or str)"))
    }
}

/// Longest generated byte string.
pub const MAX_BYTESTRING_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseSpec {
    pub size: usize,
    pub key_kind: KeyKind,
    pub seed: u32,
}

/// A generated input, one variant per key kind.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseData {
    Unsigned32(Vec<u32>),
    Unsigned64(Vec<u64>),
    Signed32(Vec<i32>),
    Float64(Vec<f64>),
    ByteString(Vec<Vec<u8>>),
}

impl CaseData {
    pub fn len(&self) -> usize {
        match self {
            CaseData::Unsigned32(v) => v.len(),
            CaseData::Unsigned64(v) => v.len(),
            CaseData::Signed32(v) => v.len(),
            CaseData::Float64(v) => v.len(),
            CaseData::ByteString(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn key_kind(&self) -> KeyKind {
        match self {
            CaseData::Unsigned32(_) => KeyKind::Unsigned32,
            CaseData::Unsigned64(_) => KeyKind::Unsigned64,
            CaseData::Signed32(_) => KeyKind::Signed32,
            CaseData::Float64(_) => KeyKind::Float64,
            CaseData::ByteString(_) => KeyKind::ByteString,
        }
    }
}

/// Draws `spec.size` elements from a generator seeded with `spec.seed`.
///
/// 64-bit values take two draws, high half first. Floats are raw 64-bit
/// patterns, NaNs included. Byte strings take one draw for the length
/// (`draw % 17`) and one draw per byte (its low 8 bits).
pub fn generate_case(spec: CaseSpec) -> CaseData {
    let mut rng = Mt19937::new(spec.seed);
    let n = spec.size;
    match spec.key_kind {
        KeyKind::Unsigned32 => CaseData::Unsigned32((0..n).map(|_| rng.next_u32()).collect()),
        KeyKind::Unsigned64 => CaseData::Unsigned64((0..n).map(|_| rng.next_u64()).collect()),
        KeyKind::Signed32 => CaseData::Signed32((0..n).map(|_| rng.next_u32() as i32).collect()),
        KeyKind::Float64 => {
            CaseData::Float64((0..n).map(|_| f64::from_bits(rng.next_u64())).collect())
        }
        KeyKind::ByteString => CaseData::ByteString(
            (0..n)
                .map(|_| {
                    let len = rng.next_u32() as usize % (MAX_BYTESTRING_LEN + 1);
                    (0..len).map(|_| rng.next_u32() as u8).collect()
                })
                .collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Published output of the reference mt19937ar.c, init_genrand(5489).
    const SEED_5489: [u32; 10] = [
        3499211612, 581869302, 3890346734, 3586334585, 545404204, 4161255391, 3922919429,
        949333985, 2715962298, 1323567403,
    ];
    const SEED_1: [u32; 10] = [
        1791095845, 4282876139, 3093770124, 4005303368, 491263, 550290313, 1298508491, 4290846341,
        630311759, 1013994432,
    ];

    #[test]
    fn mt_reference_vectors() {
        let mut rng = Mt19937::default();
        let out: Vec<u32> = (0..10).map(|_| rng.next_u32()).collect();
        assert_eq!(out, SEED_5489);
        let mut rng = Mt19937::new(1);
        let out: Vec<u32> = (0..10).map(|_| rng.next_u32()).collect();
        assert_eq!(out, SEED_1);
    }

    #[test]
    fn mt_10000th_output() {
        // Known value from the reference implementation's test stream.
        let mut rng = Mt19937::default();
        let last = (0..10000).map(|_| rng.next_u32()).last().unwrap();
        assert_eq!(last, 4123659995);
    }

    #[test]
    fn mt_is_deterministic() {
        let mut a = Mt19937::new(42);
        let mut b = Mt19937::new(42);
        for _ in 0..2000 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
    }

    #[test]
    fn reference_sort_small_cases() {
        assert_eq!(reference_sort(&[3, 1, 2], Ord::cmp), vec![1, 2, 3]);
        assert_eq!(reference_sort::<u8, _>(&[], Ord::cmp), Vec::<u8>::new());
        assert_eq!(
            reference_sort(&[0xBu8, 4, 0, 0, 7, 0xA, 0xC, 0xE], Ord::cmp),
            vec![0, 0, 4, 7, 0xA, 0xB, 0xC, 0xE]
        );
    }

    #[test]
    fn reference_sort_is_stable() {
        let pairs = [(2, 'a'), (1, 'b'), (2, 'c'), (1, 'd')];
        let out = reference_sort(&pairs, |x, y| x.0.cmp(&y.0));
        assert_eq!(out, vec![(1, 'b'), (1, 'd'), (2, 'a'), (2, 'c')]);
    }

    #[test]
    fn predicates() {
        assert!(is_nondecreasing(&[1, 1, 2], Ord::cmp));
        assert!(!is_nondecreasing(&[2, 1], Ord::cmp));
        assert!(is_nondecreasing::<i32, _>(&[], Ord::cmp));

        assert!(is_permutation(&[1, 2, 2], &[2, 1, 2], Ord::cmp));
        assert!(!is_permutation(&[1, 2], &[1, 1], Ord::cmp));
        assert!(!is_permutation(&[1, 2], &[1, 2, 2], Ord::cmp));
        assert!(is_permutation::<i32, _>(&[], &[], Ord::cmp));
    }

    #[test]
    fn generated_cases() {
        let spec = CaseSpec {
            size: 0,
            key_kind: KeyKind::Unsigned32,
            seed: 9,
        };
        assert!(generate_case(spec).is_empty());

        let spec = CaseSpec {
            size: 1000,
            key_kind: KeyKind::Unsigned32,
            seed: 1,
        };
        let CaseData::Unsigned32(v) = generate_case(spec) else {
            panic!()
        };
        assert_eq!(v.len(), 1000);
        assert_eq!(v[0], Mt19937::new(1).next_u32());

        for kind in KeyKind::ALL {
            let spec = CaseSpec {
                size: 300,
                key_kind: kind,
                seed: 77,
            };
            let a = generate_case(spec);
            assert_eq!(a.key_kind(), kind);
            assert_eq!(a.len(), 300);
            // Floats may hold NaN, so compare through Debug output.
            assert_eq!(format!("{a:?}"), format!("{:?}", generate_case(spec)));
        }
    }

    #[test]
    fn generated_u64_is_high_then_low() {
        let spec = CaseSpec {
            size: 1,
            key_kind: KeyKind::Unsigned64,
            seed: 5489,
        };
        let CaseData::Unsigned64(v) = generate_case(spec) else {
            panic!()
        };
        assert_eq!(v[0], (3499211612u64 << 32) | 581869302);
    }

    #[test]
    fn generated_strings_respect_length_cap() {
        let spec = CaseSpec {
            size: 2000,
            key_kind: KeyKind::ByteString,
            seed: 3,
        };
        let CaseData::ByteString(v) = generate_case(spec) else {
            panic!()
        };
        assert!(v.iter().all(|s| s.len() <= MAX_BYTESTRING_LEN));
        assert!(v.iter().any(|s| s.is_empty()));
        assert!(v.iter().any(|s| s.len() == MAX_BYTESTRING_LEN));
    }

    #[test]
    fn key_kind_names_round_trip() {
        for k in KeyKind::ALL {
            assert_eq!(k.name().parse::<KeyKind>(), Ok(k));
        }
        assert!("u16".parse::<KeyKind>().is_err());
    }
}
