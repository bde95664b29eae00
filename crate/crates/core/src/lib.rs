//! In-place MSD binary radix sort ("binar sort").
//!
//! Elements are sorted by repeatedly partitioning a range on one bit of their
//! key, most significant bit first, into a zero-bit lower sub-array and a
//! one-bit upper sub-array. Keys come from a [`KeyCodec`], which exposes an
//! element as an order-preserving bitstring, so unsigned and signed integers,
//! floats and byte strings all sort with the same routine.
//!
//! ```
//! use binar_sort::{sort, keys::Signed};
//!
//! let mut v = [3i32, -7, 0, 12, -1];
//! let metrics = sort(&mut v, &Signed);
//! assert_eq!(v, [-7, -1, 0, 3, 12]);
//! assert!(metrics.bit_extractions <= 32 * 5);
//! ```

pub mod bench;
pub mod cli;
pub mod keys;
pub mod oracle;
pub mod sort;
pub mod variants;
pub mod verify;

pub use keys::KeyCodec;
pub use sort::{
    binar_sort_range, partition, sort, sort_with_observer, Metrics, PartitionResult, SortRange,
};
pub use variants::{
    sort_iterative, sort_optimized, sort_parallel, OptimizationConfig, Variant, VariantError,
};
