//! Command-line front end: `sort`, `bench`, `trace` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchError, BenchPlan, BenchRecord};
use crate::keys::{ByteString, Float, KeyCodec, Signed, Unsigned};
use crate::oracle::KeyKind;
use crate::sort::sort_with_observer;
use crate::variants::{sort_with, OptimizationConfig, Variant};
use crate::verify::run_cases;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "binar", version, about = "In-place MSD binary radix sort")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sort values read one per line.
    Sort(SortArgs),
    /// Time a variant over a sweep of input sizes.
    Bench(BenchArgs),
    /// Show the sub-array layout after each bit level.
    Trace(TraceArgs),
    /// Check a variant against the merge-sort oracle on random cases.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Recursive,
    Iterative,
    Optimized,
    Parallel,
}

#[derive(Debug, Args)]
struct VariantOpts {
    #[arg(long, value_enum, default_value_t = VariantArg::Recursive)]
    variant: VariantArg,
    /// Worker threads for the parallel variant.
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Undisturbed partitions before a sortedness scan (optimized variant; 0 disables).
    #[arg(long, default_value_t = OptimizationConfig::default().sortedness_check_after)]
    check_after: u32,
}

impl VariantOpts {
    fn variant(&self) -> Variant {
        match self.variant {
            VariantArg::Recursive => Variant::Recursive,
            VariantArg::Iterative => Variant::Iterative,
            VariantArg::Optimized => Variant::Optimized(OptimizationConfig {
                passthrough_loop: true,
                sortedness_check_after: self.check_after,
            }),
            VariantArg::Parallel => Variant::Parallel {
                workers: self.workers,
            },
        }
    }
}

#[derive(Debug, Args)]
struct SortArgs {
    /// Element type: u32, u64, i32, f64 or str.
    #[arg(long = "type", default_value = "u32")]
    key_type: KeyKind,
    #[command(flatten)]
    variant: VariantOpts,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Input file; standard input when omitted.
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    start: usize,
    #[arg(long)]
    end: usize,
    #[arg(long)]
    step: usize,
    #[arg(long, default_value_t = 10)]
    granularity: usize,
    #[arg(long, default_value_t = 5489)]
    seed: u32,
    #[arg(long = "type", default_value = "u32")]
    key_type: KeyKind,
    #[command(flatten)]
    variant: VariantOpts,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Word width in bits: 4, 8, 16 or 32.
    #[arg(long, default_value_t = 4)]
    width: u32,
    /// Hexadecimal values.
    values: Vec<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 5489)]
    seed: u32,
    #[arg(long = "type", default_value = "u32")]
    key_type: KeyKind,
    #[command(flatten)]
    variant: VariantOpts,
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, A>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };

    let result = match cli.command {
        Command::Sort(args) => cmd_sort(args, stdin, stdout),
        Command::Bench(args) => cmd_bench(args, stdout, stderr),
        Command::Trace(args) => cmd_trace(args, stdout),
        Command::Verify(args) => cmd_verify(args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn check_workers(opts: &VariantOpts) -> Result<(), Failure> {
    if opts.variant == VariantArg::Parallel && opts.workers == 0 {
        return Err(Failure::usage("--workers must be at least 1"));
    }
    Ok(())
}

fn cmd_sort(args: SortArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CmdResult {
    check_workers(&args.variant)?;
    let variant = args.variant.variant();

    let mut raw = Vec::new();
    match &args.input {
        Some(path) => {
            raw = fs::read(path)
                .map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
        }
        None => {
            stdin
                .read_to_end(&mut raw)
                .map_err(|e| Failure::io(format!("reading standard input: {e}")))?;
        }
    }
    let lines = split_lines(&raw);

    let body = match args.key_type {
        KeyKind::Unsigned32 => {
            sort_numbers::<u32, _>(&lines, &Unsigned::U32, variant, |v| v.to_string())?
        }
        KeyKind::Unsigned64 => {
            sort_numbers::<u64, _>(&lines, &Unsigned::U64, variant, |v| v.to_string())?
        }
        KeyKind::Signed32 => sort_numbers::<i32, _>(&lines, &Signed, variant, |v| v.to_string())?,
        KeyKind::Float64 => sort_numbers::<f64, _>(&lines, &Float, variant, format_float)?,
        KeyKind::ByteString => {
            let mut items: Vec<&[u8]> = lines;
            let codec = ByteString::for_items(&items);
            sort_on_big_stack(&mut items, &codec, variant);
            let mut out = Vec::new();
            for item in items {
                out.extend_from_slice(item);
                out.push(b'\n');
            }
            out
        }
    };

    let written = match &args.output {
        Some(path) => {
            fs::write(path, &body).map_err(|e| format!("writing {}: {e}", path.display()))
        }
        None => stdout
            .write_all(&body)
            .and_then(|_| stdout.flush())
            .map_err(|e| format!("writing standard output: {e}")),
    };
    written.map_err(Failure::io)?;
    Ok(EXIT_OK)
}

/// Lines without their terminators; a final unterminated line counts.
fn split_lines(raw: &[u8]) -> Vec<&[u8]> {
    let mut lines: Vec<&[u8]> = raw.split(|&b| b == b'\n').collect();
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    lines
}

fn sort_numbers<T, C>(
    lines: &[&[u8]],
    codec: &C,
    variant: Variant,
    format: impl Fn(&T) -> String,
) -> Result<Vec<u8>, Failure>
where
    T: std::str::FromStr + Send,
    C: KeyCodec<T> + Sync,
{
    let mut values = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let parsed = std::str::from_utf8(line)
            .ok()
            .map(|s| s.strip_suffix('\r').unwrap_or(s))
            .and_then(|s| s.parse::<T>().ok());
        match parsed {
            Some(v) => values.push(v),
            None => {
                return Err(Failure::usage(format!(
                    "line {}: cannot parse {:?}",
                    i + 1,
                    String::from_utf8_lossy(line)
                )))
            }
        }
    }
    sort_on_big_stack(&mut values, codec, variant);
    let mut out = String::new();
    for v in &values {
        out.push_str(&format(v));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

/// Recursion depth grows with the key width, which for byte strings follows
/// the longest line, so sort on a thread sized for it.
fn sort_on_big_stack<T: Send, C: KeyCodec<T> + Sync>(items: &mut [T], codec: &C, variant: Variant) {
    let stack = crate::sort::stack_size_for_width(codec.width());
    thread::scope(|scope| {
        thread::Builder::new()
            .stack_size(stack)
            .spawn_scoped(scope, || sort_with(items, codec, variant))
            .expect("spawn sort thread")
            .join()
            .expect("sort thread panicked")
            .expect("worker count validated");
    });
}

fn format_float(v: &f64) -> String {
    if v.is_nan() {
        if v.is_sign_negative() { "-nan" } else { "nan" }.to_string()
    } else if v.is_infinite() {
        if *v < 0.0 { "-inf" } else { "inf" }.to_string()
    } else if *v != 0.0 && !(1e-5..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn cmd_bench(args: BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    check_workers(&args.variant)?;
    let plan = BenchPlan {
        start_size: args.start,
        end_size: args.end,
        step: args.step,
        granularity: args.granularity,
        seed: args.seed,
        key_kind: args.key_type,
        variant: args.variant.variant(),
    };
    let outcomes = bench::run_plan(&plan).map_err(|e| Failure::usage(e.to_string()))?;

    let mut records: Vec<BenchRecord> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                let _ = writeln!(stderr, "warning: {e}");
            }
        }
    }

    let io_err = |e: io::Error| Failure::io(format!("writing standard output: {e}"));
    match &args.csv {
        Some(path) => bench::write_csv(&records, path).map_err(|e| Failure::io(e.to_string()))?,
        None => bench::write_csv_to(&records, &mut *stdout).map_err(io_err)?,
    }

    match bench::fit_linear(&records) {
        Ok(fit) => writeln!(
            stdout,
            "fit: slope={:.4} ns/element intercept={:.1} ns r2={:.4}",
            fit.slope, fit.intercept, fit.r_squared
        ),
        Err(BenchError::TooFewSizes) => writeln!(stdout, "fit: n/a (fewer than two sizes)"),
        Err(e) => writeln!(stdout, "fit: n/a ({e})"),
    }
    .map_err(io_err)?;
    for (n, ratio) in bench::doubling_ratios(&records) {
        writeln!(stdout, "doubling {n}->{}: {ratio:.3}", 2 * n).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn cmd_trace(args: TraceArgs, stdout: &mut dyn Write) -> CmdResult {
    if ![4, 8, 16, 32].contains(&args.width) {
        return Err(Failure::usage(format!(
            "--width must be 4, 8, 16 or 32, got {}",
            args.width
        )));
    }
    let limit = 1u64 << args.width;
    let mut values = Vec::with_capacity(args.values.len());
    for text in &args.values {
        match u32::from_str_radix(text, 16) {
            Ok(v) if (v as u64) < limit => values.push(v),
            _ => {
                return Err(Failure::usage(format!(
                    "'{text}' is not a {}-bit hexadecimal value",
                    args.width
                )))
            }
        }
    }

    let out = trace_lines(&mut values, args.width).join("\n") + "\n";
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Failure::io(format!("writing standard output: {e}")))?;
    Ok(EXIT_OK)
}

/// `begin:` line, one `bit k:` line per partitioned level (k from 1), `end:`
/// line. Values print as uppercase hex; each sub-array is bracketed.
pub fn trace_lines(values: &mut [u32], width: u32) -> Vec<String> {
    fn group(vals: &[u32]) -> String {
        let items: Vec<String> = vals.iter().map(|v| format!("{v:X}")).collect();
        format!("[{}]", items.join(" "))
    }

    let mut lines = vec![format!("begin: {}", group(values))];
    sort_with_observer(values, &Unsigned::new(width), |pos, bounds, seq| {
        let groups: String = bounds
            .iter()
            .map(|&(lo, hi)| group(&seq[lo..=hi]))
            .collect();
        lines.push(format!("bit {}: {groups}", pos + 1));
    });
    lines.push(format!("end: {}", group(values)));
    lines
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> CmdResult {
    check_workers(&args.variant)?;
    if args.cases == 0 {
        return Err(Failure::usage("--cases must be at least 1"));
    }
    let variant = args.variant.variant();
    let report = run_cases(args.cases, args.seed, args.key_type, variant)
        .map_err(|e| Failure::usage(e.to_string()))?;

    let io_err = |e: io::Error| Failure::io(format!("writing standard output: {e}"));
    writeln!(
        stdout,
        "{}/{} passed ({} {}, seed {})",
        report.passed,
        args.cases,
        args.key_type,
        variant.name(),
        args.seed
    )
    .map_err(io_err)?;

    if let Some(f) = report.first_failure {
        writeln!(
            stdout,
            "first failure: case seed {} size {} (oracle match {}, permutation {}, bounds {})",
            f.seed,
            f.size,
            f.outcome.matches_oracle,
            f.outcome.is_permutation,
            f.outcome.within_bounds
        )
        .map_err(io_err)?;
        return Ok(EXIT_VERIFY_FAILED);
    }
    Ok(EXIT_OK)
}
