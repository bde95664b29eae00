//! Alternative drivers for the same partition step: an explicit-stack
//! iterative sort, a sort with pass-through and sortedness shortcuts, and a
//! parallel sort over bit-signature buckets.

use std::thread;

use thiserror::Error;

use crate::keys::KeyCodec;
use crate::sort::{
    binar_sort_range, partition, sort, stack_size_for_width, LevelSorter, Metrics, SortRange,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VariantError {
    #[error("parallel sort needs at least one worker")]
    ZeroWorkers,
}

/// Pending range on the iterative work stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkItem {
    pub range: SortRange,
}

/// Sorts with an explicit work stack instead of call recursion.
///
/// Items are popped depth-first with the lower sub-range first, which makes the
/// sequence of partitions and the metrics identical to [`sort`]. Returns the
/// peak stack length, which never exceeds `width + 1`.
pub fn sort_iterative<T, C>(seq: &mut [T], codec: &C, metrics: &mut Metrics) -> usize
where
    C: KeyCodec<T> + ?Sized,
{
    if seq.len() < 2 {
        return 0;
    }
    let width = codec.width();
    let mut stack = vec![WorkItem {
        range: SortRange::full(seq.len()),
    }];
    let mut peak = stack.len();

    while let Some(WorkItem { range }) = stack.pop() {
        metrics.enter(range.pos);
        if range.pos >= width || range.len() < 2 {
            continue;
        }
        let part = partition(seq, range, codec, metrics);
        let pos = range.pos + 1;
        if part.pass_through {
            stack.push(WorkItem {
                range: SortRange::new(range.lower..range.end, pos),
            });
        } else {
            stack.push(WorkItem {
                range: SortRange::new(part.split..range.end, pos),
            });
            stack.push(WorkItem {
                range: SortRange::new(range.lower..part.split, pos),
            });
        }
        peak = peak.max(stack.len());
    }
    peak
}

/// Shortcuts for [`sort_optimized`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizationConfig {
    /// Continue a pass-through at the next bit in a loop instead of a call.
    pub passthrough_loop: bool,
    /// Number of consecutive undisturbed partitions after which a range is
    /// scanned for sortedness; 0 disables the scan.
    pub sortedness_check_after: u32,
}

impl OptimizationConfig {
    pub const DISABLED: OptimizationConfig = OptimizationConfig {
        passthrough_loop: false,
        sortedness_check_after: 0,
    };
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            passthrough_loop: true,
            sortedness_check_after: 4,
        }
    }
}

/// Sorts with the pass-through loop and the sortedness check.
///
/// With the check enabled, partitions are done by a two-sided scan that only
/// exchanges misplaced pairs, so an already partitioned range (a pass-through
/// included) is left exactly as it was. Such undisturbed partitions form a
/// streak along the path from the root; when the streak reaches
/// `sortedness_check_after`, the range is scanned once and, if already in key
/// order, dropped. Any partition that moves an element resets the streak.
///
/// With the check disabled the partition is the same as [`sort`]'s, so with
/// both shortcuts off the counters match [`sort`] exactly.
pub fn sort_optimized<T, C>(
    seq: &mut [T],
    codec: &C,
    config: OptimizationConfig,
    metrics: &mut Metrics,
) where
    C: KeyCodec<T> + ?Sized,
{
    if seq.len() < 2 {
        return;
    }
    optimized_range(seq, SortRange::full(seq.len()), 0, codec, config, metrics);
}

fn optimized_range<T, C>(
    seq: &mut [T],
    mut range: SortRange,
    mut streak: u32,
    codec: &C,
    config: OptimizationConfig,
    metrics: &mut Metrics,
) where
    C: KeyCodec<T> + ?Sized,
{
    metrics.enter(range.pos);
    let check_after = config.sortedness_check_after;
    loop {
        if range.pos >= codec.width() || range.len() < 2 {
            return;
        }

        let (split, undisturbed) = if check_after > 0 {
            exchange_partition(seq, range, codec, metrics)
        } else {
            (partition(seq, range, codec, metrics).split, false)
        };

        if undisturbed {
            streak += 1;
            if streak == check_after && is_sorted_by_key(&seq[range.lower..range.end], codec) {
                return;
            }
        } else {
            streak = 0;
        }

        let pos = range.pos + 1;
        if split == range.lower || split == range.end {
            range.pos = pos;
            if config.passthrough_loop {
                continue;
            }
            optimized_range(seq, range, streak, codec, config, metrics);
        } else {
            let lower = SortRange::new(range.lower..split, pos);
            let upper = SortRange::new(split..range.end, pos);
            optimized_range(seq, lower, streak, codec, config, metrics);
            optimized_range(seq, upper, streak, codec, config, metrics);
        }
        return;
    }
}

/// Two-sided partition: advance from the left over zero bits and from the
/// right over one bits, exchanging only when both sides are stuck. Each bit is
/// extracted once. Returns the split and whether nothing moved.
fn exchange_partition<T, C>(
    seq: &mut [T],
    range: SortRange,
    codec: &C,
    metrics: &mut Metrics,
) -> (usize, bool)
where
    C: KeyCodec<T> + ?Sized,
{
    debug_assert!(range.lower < range.end && range.pos < codec.width());
    let pos = range.pos;
    let mut lo = range.lower;
    let mut hi = range.end;
    let mut swaps = 0u64;
    loop {
        while lo < hi && !codec.bit_at(&seq[lo], pos) {
            lo += 1;
        }
        if lo == hi {
            break;
        }
        // seq[lo] has a one bit; look for a zero below the ones at the top.
        hi -= 1;
        while hi > lo && codec.bit_at(&seq[hi], pos) {
            hi -= 1;
        }
        if hi == lo {
            break;
        }
        seq.swap(lo, hi);
        swaps += 1;
        lo += 1;
    }
    metrics.bit_extractions += range.len() as u64;
    metrics.swaps += swaps;
    (lo, swaps == 0)
}

fn is_sorted_by_key<T, C>(seq: &[T], codec: &C) -> bool
where
    C: KeyCodec<T> + ?Sized,
{
    seq.windows(2).all(|w| codec.compare(&w[0], &w[1]).is_le())
}

/// A disjoint index range left for one parallel task, with the bit it
/// resumes at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bucket {
    pub lower: usize,
    pub end: usize,
    pub pos: u32,
    /// The range still needs sorting from `pos` on.
    pub pending: bool,
}

/// Number of leading bit levels partitioned before work is handed out.
pub fn prepartition_depth(workers: usize) -> u32 {
    workers.next_power_of_two().trailing_zeros()
}

/// Partitions the top `ceil(lg workers)` bit levels sequentially and returns
/// the resulting buckets, left to right. The buckets cover `0..seq.len()`
/// without overlap; each groups the elements sharing one bit signature.
pub fn plan_buckets<T, C>(
    seq: &mut [T],
    codec: &C,
    workers: usize,
    metrics: &mut Metrics,
) -> Result<Vec<Bucket>, VariantError>
where
    C: KeyCodec<T> + ?Sized,
{
    if workers == 0 {
        return Err(VariantError::ZeroWorkers);
    }
    let depth = prepartition_depth(workers);
    let mut levels = LevelSorter::new(seq.len(), codec.width(), metrics);
    while levels.pos() < depth && levels.step(seq, codec, metrics).is_some() {}

    let pos = levels.pos();
    Ok(levels
        .segments()
        .iter()
        .map(|s| Bucket {
            lower: s.lower,
            end: s.end,
            pos,
            pending: s.active,
        })
        .collect())
}

/// A bucket's slice and the bit it resumes at.
type Job<'a, T> = (&'a mut [T], u32);

/// Sorts on `workers` threads.
///
/// The top bit levels are partitioned on the calling thread (see
/// [`plan_buckets`]); the pending buckets are then dealt out largest first to
/// the least loaded worker and sorted concurrently, each worker owning its
/// buckets' slices outright. Output equals [`sort`]'s.
pub fn sort_parallel<T, C>(
    seq: &mut [T],
    codec: &C,
    workers: usize,
    metrics: &mut Metrics,
) -> Result<(), VariantError>
where
    T: Send,
    C: KeyCodec<T> + Sync + ?Sized,
{
    if workers == 0 {
        return Err(VariantError::ZeroWorkers);
    }
    if seq.len() < 2 {
        return Ok(());
    }
    if workers == 1 {
        *metrics += sort(seq, codec);
        return Ok(());
    }

    let buckets = plan_buckets(seq, codec, workers, metrics)?;

    let mut rest: &mut [T] = seq;
    let mut offset = 0;
    let mut jobs: Vec<Job<'_, T>> = Vec::new();
    for b in buckets.iter().filter(|b| b.pending) {
        let (_, tail) = std::mem::take(&mut rest).split_at_mut(b.lower - offset);
        let (slice, tail) = tail.split_at_mut(b.end - b.lower);
        rest = tail;
        offset = b.end;
        jobs.push((slice, b.pos));
    }

    jobs.sort_by_key(|(s, _)| std::cmp::Reverse(s.len()));
    let mut loads: Vec<(usize, Vec<Job<'_, T>>)> = (0..workers).map(|_| (0, Vec::new())).collect();
    for job in jobs {
        let slot = loads
            .iter_mut()
            .min_by_key(|(load, _)| *load)
            .expect("workers > 0");
        slot.0 += job.0.len();
        slot.1.push(job);
    }

    let stack = stack_size_for_width(codec.width());
    let results: Vec<Metrics> = thread::scope(|scope| {
        let handles: Vec<_> = loads
            .into_iter()
            .filter(|(load, _)| *load > 0)
            .map(|(_, jobs)| {
                thread::Builder::new()
                    .stack_size(stack)
                    .spawn_scoped(scope, move || {
                        let mut local = Metrics::default();
                        for (slice, pos) in jobs {
                            let len = slice.len();
                            binar_sort_range(slice, SortRange::new(0..len, pos), codec, &mut local);
                        }
                        local
                    })
                    .expect("spawn sort worker")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sort worker panicked"))
            .collect()
    });
    for local in results {
        *metrics += local;
    }
    Ok(())
}

/// Which driver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Recursive,
    Iterative,
    Optimized(OptimizationConfig),
    Parallel { workers: usize },
}

impl Variant {
    pub fn name(&self) -> String {
        match self {
            Variant::Recursive => "recursive".into(),
            Variant::Iterative => "iterative".into(),
            Variant::Optimized(_) => "optimized".into(),
            Variant::Parallel { workers } => format!("parallel({workers})"),
        }
    }
}

/// Runs `variant` on `seq` and returns its metrics.
pub fn sort_with<T, C>(seq: &mut [T], codec: &C, variant: Variant) -> Result<Metrics, VariantError>
where
    T: Send,
    C: KeyCodec<T> + Sync + ?Sized,
{
    let mut metrics = Metrics::default();
    match variant {
        Variant::Recursive => metrics = sort(seq, codec),
        Variant::Iterative => {
            sort_iterative(seq, codec, &mut metrics);
        }
        Variant::Optimized(config) => sort_optimized(seq, codec, config, &mut metrics),
        Variant::Parallel { workers } => sort_parallel(seq, codec, workers, &mut metrics)?,
    }
    Ok(metrics)
}
