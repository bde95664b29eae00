//! In-place MSD binary radix sort.
//!
//! A range is partitioned on one bit: elements with a zero bit collect at the
//! low end, elements with a one bit at the high end. Both halves are then
//! sorted on the next bit. When every element lands on the same side (a
//! pass-through) the whole range moves on to the next bit instead.

use std::ops::{Add, AddAssign, Range};

use crate::keys::KeyCodec;

/// Work counters collected during a sort.
///
/// `max_depth` is the depth of the deepest call, with the top-level call at
/// depth 1; a call at bit position `pos` sits at depth `pos + 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Metrics {
    pub bit_extractions: u64,
    pub swaps: u64,
    pub recursive_calls: u64,
    pub max_depth: u64,
}

impl Metrics {
    #[inline]
    pub(crate) fn enter(&mut self, pos: u32) {
        self.recursive_calls += 1;
        self.max_depth = self.max_depth.max(pos as u64 + 1);
    }

    /// Checks the linear work bounds for a sort of `len` elements at `width` bits.
    pub fn within_bounds(&self, len: usize, width: u32) -> bool {
        self.swaps <= self.bit_extractions
            && self.bit_extractions <= width as u64 * len as u64
            && self.max_depth <= width as u64 + 1
    }
}

impl AddAssign for Metrics {
    fn add_assign(&mut self, rhs: Self) {
        self.bit_extractions += rhs.bit_extractions;
        self.swaps += rhs.swaps;
        self.recursive_calls += rhs.recursive_calls;
        self.max_depth = self.max_depth.max(rhs.max_depth);
    }
}

impl Add for Metrics {
    type Output = Metrics;

    fn add(mut self, rhs: Self) -> Metrics {
        self += rhs;
        self
    }
}

/// A contiguous run of indices and the bit position it is sorted on.
///
/// Indices are half-open: `lower..end`, so `end == lower` is the empty range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SortRange {
    pub lower: usize,
    pub end: usize,
    pub pos: u32,
}

impl SortRange {
    pub fn new(indices: Range<usize>, pos: u32) -> Self {
        assert!(indices.start <= indices.end, "inverted range {indices:?}");
        SortRange {
            lower: indices.start,
            end: indices.end,
            pos,
        }
    }

    /// Whole-slice range at the first bit.
    pub fn full(len: usize) -> Self {
        SortRange::new(0..len, 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.lower
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.end == self.lower
    }

    /// Inclusive upper index, `None` for an empty range.
    pub fn upper(&self) -> Option<usize> {
        (!self.is_empty()).then(|| self.end - 1)
    }

    #[inline]
    fn next_bit(self, indices: Range<usize>) -> Self {
        SortRange {
            lower: indices.start,
            end: indices.end,
            pos: self.pos + 1,
        }
    }
}

/// Outcome of one partition pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionResult {
    /// First index of the one-bit sub-array; `end` when every bit was zero.
    pub split: usize,
    /// Every element landed on one side.
    pub pass_through: bool,
}

/// Partitions `seq[range.lower..range.end]` on bit `range.pos`.
///
/// The working element is always the one at `lo`. A zero bit leaves it in
/// place and advances `lo`; a one bit swaps it with the element at the top of
/// the unpartitioned region and shrinks that region from above, leaving `lo`
/// where it is. Each element's bit is extracted exactly once.
///
/// # Panics
///
/// If the range is empty, out of bounds, or `pos >= codec.width()`.
pub fn partition<T, C>(
    seq: &mut [T],
    range: SortRange,
    codec: &C,
    metrics: &mut Metrics,
) -> PartitionResult
where
    C: KeyCodec<T> + ?Sized,
{
    assert!(
        range.lower < range.end && range.end <= seq.len(),
        "partition range {}..{} invalid for length {}",
        range.lower,
        range.end,
        seq.len()
    );
    assert!(
        range.pos < codec.width(),
        "bit position {} outside key width {}",
        range.pos,
        codec.width()
    );

    let mut lo = range.lower;
    // One past the inclusive upper bound of the unpartitioned region.
    let mut hi = range.end;
    let mut swaps = 0u64;
    while lo < hi {
        if codec.bit_at(&seq[lo], range.pos) {
            hi -= 1;
            seq.swap(lo, hi);
            swaps += 1;
        } else {
            lo += 1;
        }
    }

    metrics.bit_extractions += range.len() as u64;
    metrics.swaps += swaps;
    PartitionResult {
        split: lo,
        pass_through: lo == range.lower || lo == range.end,
    }
}

/// Sorts `seq[range.lower..range.end]` on bits `range.pos..codec.width()`.
///
/// Recursion ends when the bits run out or the range holds at most one
/// element. A pass-through recurses once on the same range at the next bit;
/// otherwise both sub-arrays recurse at the next bit, lower first.
pub fn binar_sort_range<T, C>(seq: &mut [T], range: SortRange, codec: &C, metrics: &mut Metrics)
where
    C: KeyCodec<T> + ?Sized,
{
    metrics.enter(range.pos);
    if range.pos >= codec.width() || range.len() < 2 {
        return;
    }

    let part = partition(seq, range, codec, metrics);
    if part.pass_through {
        binar_sort_range(seq, range.next_bit(range.lower..range.end), codec, metrics);
    } else {
        binar_sort_range(seq, range.next_bit(range.lower..part.split), codec, metrics);
        binar_sort_range(seq, range.next_bit(part.split..range.end), codec, metrics);
    }
}

/// Sorts the whole slice in codec key order. Unstable.
pub fn sort<T, C>(seq: &mut [T], codec: &C) -> Metrics
where
    C: KeyCodec<T> + ?Sized,
{
    let mut metrics = Metrics::default();
    if seq.len() > 1 {
        binar_sort_range(seq, SortRange::full(seq.len()), codec, &mut metrics);
    }
    metrics
}

/// Sorts like [`sort`], one bit level at a time, reporting the sub-array layout
/// after each level.
///
/// `observer` receives the bit position just partitioned, the inclusive
/// `(lower, upper)` bounds of every sub-array, left to right, covering the
/// whole slice, and the slice as arranged after that level. Levels where nothing was left to partition are not reported.
/// The final arrangement and the metrics match [`sort`] exactly.
pub fn sort_with_observer<T, C, F>(seq: &mut [T], codec: &C, mut observer: F) -> Metrics
where
    C: KeyCodec<T> + ?Sized,
    F: FnMut(u32, &[(usize, usize)], &[T]),
{
    let mut metrics = Metrics::default();
    if seq.len() < 2 {
        return metrics;
    }

    let mut levels = LevelSorter::new(seq.len(), codec.width(), &mut metrics);
    let mut bounds = Vec::new();
    while let Some(pos) = levels.step(seq, codec, &mut metrics) {
        bounds.clear();
        bounds.extend(levels.segments().iter().map(|s| (s.lower, s.end - 1)));
        observer(pos, &bounds, seq);
    }
    metrics
}

/// A sub-array in the breadth-first schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Segment {
    pub lower: usize,
    pub end: usize,
    /// Still needs partitioning at the current level.
    pub active: bool,
}

/// Stack size for a thread that recurses once per bit of a `width`-bit key.
pub fn stack_size_for_width(width: u32) -> usize {
    (4 << 20) + width as usize * 1024
}

/// Breadth-first driver: partitions every active segment at one bit position
/// per step. Partitions of disjoint segments commute, so the result equals the
/// depth-first recursion.
///
/// Call accounting mirrors the recursion: a segment's call is counted when it
/// is partitioned, or at creation if it is already a base case.
pub(crate) struct LevelSorter {
    segments: Vec<Segment>,
    pos: u32,
    width: u32,
}

impl LevelSorter {
    pub fn new(len: usize, width: u32, metrics: &mut Metrics) -> Self {
        let active = len > 1 && width > 0;
        if !active && len > 1 {
            metrics.enter(0);
        }
        LevelSorter {
            segments: vec![Segment {
                lower: 0,
                end: len,
                active,
            }],
            pos: 0,
            width,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Bit position the next step will partition on.
    pub fn pos(&self) -> u32 {
        self.pos
    }

    /// Partitions one level. Returns the bit position used, or `None` once no
    /// segment is active.
    pub fn step<T, C>(&mut self, seq: &mut [T], codec: &C, metrics: &mut Metrics) -> Option<u32>
    where
        C: KeyCodec<T> + ?Sized,
    {
        if !self.segments.iter().any(|s| s.active) {
            return None;
        }

        let pos = self.pos;
        let child_pos = pos + 1;
        let mut next = Vec::with_capacity(self.segments.len() * 2);
        let width = self.width;
        let push_child =
            |next: &mut Vec<Segment>, lower: usize, end: usize, metrics: &mut Metrics| {
                let active = end - lower > 1 && child_pos < width;
                if !active {
                    metrics.enter(child_pos);
                }
                next.push(Segment { lower, end, active });
            };

        for seg in &self.segments {
            if !seg.active {
                next.push(*seg);
                continue;
            }
            metrics.enter(pos);
            let range = SortRange::new(seg.lower..seg.end, pos);
            let part = partition(seq, range, codec, metrics);
            if part.pass_through {
                push_child(&mut next, seg.lower, seg.end, metrics);
            } else {
                push_child(&mut next, seg.lower, part.split, metrics);
                push_child(&mut next, part.split, seg.end, metrics);
            }
        }

        self.segments = next;
        self.pos = child_pos;
        Some(pos)
    }
}
