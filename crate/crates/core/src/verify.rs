//! Differential checking of the sort variants against the reference oracle.

use std::cmp::Ordering;

use crate::keys::{ByteString, Float, KeyCodec, Signed, Unsigned};
use crate::oracle::{
    generate_case, is_permutation, reference_sort, CaseData, CaseSpec, KeyKind, Mt19937,
};
use crate::sort::Metrics;
use crate::variants::{sort_with, Variant, VariantError};

/// Largest case size drawn by [`run_cases`].
pub const MAX_CASE_SIZE: usize = 2048;

/// Result of sorting one case and comparing it with the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseOutcome {
    pub size: usize,
    pub width: u32,
    pub metrics: Metrics,
    /// Output equals the merge-sort reference element for element.
    pub matches_oracle: bool,
    pub is_permutation: bool,
    /// `bit_extractions <= width * size`, `swaps <= bit_extractions` and
    /// `max_depth <= width + 1`.
    pub within_bounds: bool,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.matches_oracle && self.is_permutation && self.within_bounds
    }
}

/// Sorts `data` in place with `variant`, using the codec for its key kind.
/// Returns the metrics and the key width used.
pub fn sort_case(data: &mut CaseData, variant: Variant) -> Result<(Metrics, u32), VariantError> {
    match data {
        CaseData::Unsigned32(v) => run(v, &Unsigned::U32, variant),
        CaseData::Unsigned64(v) => run(v, &Unsigned::U64, variant),
        CaseData::Signed32(v) => run(v, &Signed, variant),
        CaseData::Float64(v) => run(v, &Float, variant),
        CaseData::ByteString(v) => {
            let codec = ByteString::for_items(v);
            run(v, &codec, variant)
        }
    }
}

fn run<T: Send, C: KeyCodec<T> + Sync>(
    seq: &mut [T],
    codec: &C,
    variant: Variant,
) -> Result<(Metrics, u32), VariantError> {
    let metrics = sort_with(seq, codec, variant)?;
    Ok((metrics, codec.width()))
}

/// Sorts a copy of `input` with `variant` and checks it against the oracle.
pub fn check_case(input: &CaseData, variant: Variant) -> Result<CaseOutcome, VariantError> {
    let mut output = input.clone();
    let (metrics, width) = sort_case(&mut output, variant)?;
    let (matches_oracle, is_perm) = match (input, &output) {
        (CaseData::Unsigned32(a), CaseData::Unsigned32(b)) => compare(a, b, Ord::cmp),
        (CaseData::Unsigned64(a), CaseData::Unsigned64(b)) => compare(a, b, Ord::cmp),
        (CaseData::Signed32(a), CaseData::Signed32(b)) => compare(a, b, Ord::cmp),
        (CaseData::Float64(a), CaseData::Float64(b)) => compare(a, b, f64::total_cmp),
        (CaseData::ByteString(a), CaseData::ByteString(b)) => compare(a, b, Ord::cmp),
        _ => unreachable!("sorting never changes the key kind"),
    };
    Ok(CaseOutcome {
        size: input.len(),
        width,
        metrics,
        matches_oracle,
        is_permutation: is_perm,
        within_bounds: metrics.within_bounds(input.len(), width),
    })
}

/// `order` must be a total order whose `Equal` means identical values.
fn compare<T: Clone, F: Fn(&T, &T) -> Ordering>(
    input: &[T],
    output: &[T],
    order: F,
) -> (bool, bool) {
    let expected = reference_sort(input, &order);
    let same = expected.len() == output.len()
        && expected
            .iter()
            .zip(output)
            .all(|(e, o)| order(e, o) == Ordering::Equal);
    (same, is_permutation(input, output, &order))
}

/// A failing case, with what is needed to regenerate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Failure {
    pub seed: u32,
    pub size: usize,
    pub outcome: CaseOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<Failure>,
}

/// Specs of `cases` random cases: sizes and case seeds are drawn from a
/// generator seeded with `seed`.
pub fn case_specs(cases: usize, seed: u32, key_kind: KeyKind) -> Vec<CaseSpec> {
    let mut rng = Mt19937::new(seed);
    (0..cases)
        .map(|_| CaseSpec {
            size: rng.next_u32() as usize % (MAX_CASE_SIZE + 1),
            key_kind,
            seed: rng.next_u32(),
        })
        .collect()
}

pub fn run_cases(
    cases: usize,
    seed: u32,
    key_kind: KeyKind,
    variant: Variant,
) -> Result<VerifyReport, VariantError> {
    let mut report = VerifyReport::default();
    for spec in case_specs(cases, seed, key_kind) {
        let outcome = check_case(&generate_case(spec), variant)?;
        if outcome.passed() {
            report.passed += 1;
        } else {
            report.failed += 1;
            report.first_failure.get_or_insert(Failure {
                seed: spec.seed,
                size: spec.size,
                outcome,
            });
        }
    }
    Ok(report)
}
