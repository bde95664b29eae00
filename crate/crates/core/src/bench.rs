//! Size-sweep benchmarks: time a sort variant over an arithmetic progression of
//! input sizes, average over repeated runs, and fit a line through the means.

use std::collections::TryReserveError;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::oracle::{generate_case, CaseData, CaseSpec, KeyKind};
use crate::variants::{Variant, VariantError};
use crate::verify::sort_case;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("could not allocate {size} elements")]
    Allocation { size: usize },
    #[error(transparent)]
    Variant(#[from] VariantError),
    #[error("a linear fit needs at least two distinct sizes")]
    TooFewSizes,
    #[error("writing {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchPlan {
    pub start_size: usize,
    pub end_size: usize,
    pub step: usize,
    /// Timed sorts per size.
    pub granularity: usize,
    pub seed: u32,
    pub key_kind: KeyKind,
    pub variant: Variant,
}

impl BenchPlan {
    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |msg: &str| Err(BenchError::InvalidPlan(msg.to_string()));
        if self.start_size < 1 {
            return fail("start size must be at least 1");
        }
        if self.end_size < self.start_size {
            return fail("end size must not be below start size");
        }
        if self.step < 1 {
            return fail("step must be at least 1");
        }
        if self.granularity < 1 {
            return fail("granularity must be at least 1");
        }
        if let Variant::Parallel { workers: 0 } = self.variant {
            return fail("parallel variant needs at least one worker");
        }
        Ok(())
    }

    /// `start, start + step, ...` up to and including `end` when reached.
    pub fn sizes(&self) -> impl Iterator<Item = usize> {
        (self.start_size..=self.end_size).step_by(self.step.max(1))
    }

    /// Input data for one size; the same plan always yields the same data.
    pub fn case(&self, size: usize) -> CaseData {
        generate_case(CaseSpec {
            size,
            key_kind: self.key_kind,
            seed: self.seed,
        })
    }
}

/// Timing summary for one size, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRecord {
    pub size: usize,
    pub mean_ns: u64,
    pub min_ns: u64,
    pub max_ns: u64,
}

/// Runs every size of the plan. A size whose buffers cannot be allocated
/// yields an error entry and the sweep carries on.
///
/// Per size: one untimed warm-up sort, then `granularity` timed sorts, each on
/// a fresh copy of the same input. Only the sort call is timed.
pub fn run_plan(plan: &BenchPlan) -> Result<Vec<Result<BenchRecord, BenchError>>, BenchError> {
    plan.validate()?;
    Ok(plan.sizes().map(|size| run_size(plan, size)).collect())
}

fn run_size(plan: &BenchPlan, size: usize) -> Result<BenchRecord, BenchError> {
    let oom = |_: TryReserveError| BenchError::Allocation { size };
    // Probe before generating: generation itself cannot report failure.
    Vec::<u64>::new()
        .try_reserve_exact(size.saturating_mul(2))
        .map_err(oom)?;
    let input = plan.case(size);

    let mut warm = try_clone(&input).map_err(oom)?;
    sort_case(&mut warm, plan.variant)?;
    drop(warm);

    let mut total: u128 = 0;
    let mut min_ns = u64::MAX;
    let mut max_ns = 0;
    for _ in 0..plan.granularity {
        let mut data = try_clone(&input).map_err(oom)?;
        let start = Instant::now();
        sort_case(&mut data, plan.variant)?;
        let elapsed = start.elapsed().as_nanos();
        let ns = u64::try_from(elapsed).unwrap_or(u64::MAX).max(1);
        total += ns as u128;
        min_ns = min_ns.min(ns);
        max_ns = max_ns.max(ns);
    }
    let mean_ns = (total / plan.granularity as u128) as u64;
    Ok(BenchRecord {
        size,
        mean_ns: mean_ns.clamp(min_ns, max_ns),
        min_ns,
        max_ns,
    })
}

fn try_clone(data: &CaseData) -> Result<CaseData, TryReserveError> {
    fn copy<T: Clone>(v: &[T]) -> Result<Vec<T>, TryReserveError> {
        let mut out = Vec::new();
        out.try_reserve_exact(v.len())?;
        out.extend_from_slice(v);
        Ok(out)
    }
    Ok(match data {
        CaseData::Unsigned32(v) => CaseData::Unsigned32(copy(v)?),
        CaseData::Unsigned64(v) => CaseData::Unsigned64(copy(v)?),
        CaseData::Signed32(v) => CaseData::Signed32(copy(v)?),
        CaseData::Float64(v) => CaseData::Float64(copy(v)?),
        CaseData::ByteString(v) => CaseData::ByteString(copy(v)?),
    })
}

/// Least-squares line through `(size, mean_ns)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Nanoseconds per element.
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to `[0, 1]`. A perfect fit,
    /// including a flat line through constant points, scores 1.
    pub r_squared: f64,
}

pub fn fit_linear(records: &[BenchRecord]) -> Result<FitResult, BenchError> {
    let n = records.len() as f64;
    if records
        .iter()
        .all(|r| r.size == records.first().map_or(0, |f| f.size))
    {
        return Err(BenchError::TooFewSizes);
    }
    let mean_x = records.iter().map(|r| r.size as f64).sum::<f64>() / n;
    let mean_y = records.iter().map(|r| r.mean_ns as f64).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for r in records {
        let dx = r.size as f64 - mean_x;
        let dy = r.mean_ns as f64 - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = records
        .iter()
        .map(|r| {
            let e = r.mean_ns as f64 - (slope * r.size as f64 + intercept);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// `mean_ns(2N) / mean_ns(N)` for every size `N` whose double is also present.
pub fn doubling_ratios(records: &[BenchRecord]) -> Vec<(usize, f64)> {
    records
        .iter()
        .filter_map(|r| {
            let double = records
                .iter()
                .find(|d| Some(d.size) == r.size.checked_mul(2))?;
            Some((r.size, double.mean_ns as f64 / r.mean_ns.max(1) as f64))
        })
        .collect()
}

pub const CSV_HEADER: &str = "size,mean_ns,min_ns,max_ns";

/// Writes the header and one row per record, in ascending size.
pub fn write_csv_to<W: Write>(records: &[BenchRecord], mut out: W) -> io::Result<()> {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| r.size);
    writeln!(out, "{CSV_HEADER}")?;
    for r in &sorted {
        writeln!(out, "{},{},{},{}", r.size, r.mean_ns, r.min_ns, r.max_ns)?;
    }
    out.flush()
}

pub fn write_csv(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    let io_err = |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_csv_to(records, BufWriter::new(file)).map_err(io_err)
}
