//! `grassp`: synthesize, check, and execute parallel decompositions of
//! sequential array folds.
//!
//! Exit codes: 0 success (Found / Valid / all rows PASS), 1 error,
//! 2 negative result (synthesis Unknown, verification counterexample),
//! 3 run-time cross-check mismatch.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grassp_core::bench::{bench_all, load_benchmark, render_text, render_tsv, run_synthesis, RunConfig};
use grassp_core::decomp::{Decomposition, MergeOp, PrefixSpec};
use grassp_core::interp::sequential_run;
use grassp_core::parse::{parse_elem_condition, parse_program};
use grassp_core::program::Program;
use grassp_core::runtime::{partition, run_parallel};
use grassp_core::scalar::Scalar;
use grassp_core::synth::{Hypothesis, SynthOutcome, SynthStats};
use grassp_core::verify::{format_segments, verify_counted, VerifBounds, Verdict};

#[derive(Parser)]
#[command(
    name = "grassp",
    version,
    about = "Synthesize and run parallel decompositions of sequential array folds"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a merge operator plus prefix rule that parallelizes a fold
    Synthesize(SynthesizeArgs),
    /// Check one decomposition exhaustively within bounds
    Verify(VerifyArgs),
    /// Execute a decomposition on worker threads over a concrete input
    Run(RunArgs),
    /// Synthesize the whole built-in corpus and grade it
    Bench(BenchArgs),
}

/// Where the fold program comes from.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in benchmark name (see `grassp bench`)
    #[arg(long, value_name = "NAME")]
    bench: Option<String>,
    /// Path to a .gsp program file
    #[arg(long, value_name = "FILE")]
    program: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<Program, String> {
        if let Some(name) = &self.bench {
            return Ok(load_benchmark(name)?.program);
        }
        let path = self.program.as_ref().expect("clap enforces one source");
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        parse_program(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Verification bounds shared by synthesize, verify, and bench.
#[derive(Args)]
struct BoundsArgs {
    /// Segment count to check; repeat the flag to check several
    #[arg(long, value_name = "M", value_delimiter = ',', default_values_t = [2usize])]
    segments: Vec<usize>,
    /// Maximum total array length enumerated
    #[arg(long = "max-len", value_name = "N", default_value_t = 6)]
    max_len: usize,
    /// Minimum length of each segment
    #[arg(long = "min-seg-len", value_name = "N", default_value_t = 1)]
    min_seg_len: usize,
    /// Element domain (default 0,1,2,3 plus eof when the program mentions it)
    #[arg(long, value_name = "V,V,...", value_delimiter = ',')]
    domain: Option<Vec<Scalar>>,
}

/// Candidate-space knobs for synthesis.
#[derive(Args)]
struct SpaceArgs {
    /// Merge operators to try, in order (default add,min,max,mul,first,last)
    #[arg(long = "merge-menu", value_name = "OP,...", value_delimiter = ',')]
    merge_menu: Option<Vec<MergeOp>>,
    /// Largest constant prefix length tried
    #[arg(long = "max-const-prefix", value_name = "N", default_value_t = 2)]
    max_const_prefix: usize,
    /// Widest conjunction tried for conditional prefixes
    #[arg(long = "max-conjuncts", value_name = "N", default_value_t = 2)]
    max_conjuncts: usize,
    /// Soft synthesis deadline in seconds
    #[arg(long, value_name = "SECONDS", default_value_t = 60)]
    timeout: u64,
}

/// The decomposition under test for verify/run.
#[derive(Args)]
struct DecompArgs {
    /// Merge operator: add, min, max, mul, first or last
    #[arg(long, value_name = "OP")]
    merge: MergeOp,
    /// Workers read only their own segment (the default)
    #[arg(long = "prefix-none", group = "prefix")]
    prefix_none: bool,
    /// Workers additionally read the first C elements of the next segment
    #[arg(long = "prefix-const", value_name = "C", group = "prefix")]
    prefix_const: Option<usize>,
    /// Workers read the next segment up to and including the first element
    /// satisfying EXPR, e.g. "(= elem 2)"
    #[arg(long = "prefix-cond", value_name = "EXPR", group = "prefix")]
    prefix_cond: Option<String>,
}

impl DecompArgs {
    fn decomposition(&self) -> Result<Decomposition, String> {
        let prefix = if let Some(c) = self.prefix_const {
            PrefixSpec::Const(c)
        } else if let Some(src) = &self.prefix_cond {
            PrefixSpec::Cond(parse_elem_condition(src).map_err(|e| e.to_string())?)
        } else {
            PrefixSpec::None
        };
        Ok(Decomposition { merge: self.merge, prefix })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    bounds: BoundsArgs,
    #[command(flatten)]
    space: SpaceArgs,
    /// Cap on threads used for candidate checking
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    decomp: DecompArgs,
    #[command(flatten)]
    bounds: BoundsArgs,
    /// Cap on threads used for enumeration
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    decomp: DecompArgs,
    /// File of whitespace-separated elements (integers, -inf, +inf, eof)
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Number of segments to split the input into
    #[arg(long, value_name = "M", default_value_t = 2)]
    segments: usize,
    /// Worker thread count (default: one per segment)
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    bounds: BoundsArgs,
    #[command(flatten)]
    space: SpaceArgs,
    /// Cap on threads used for candidate checking
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for negative results (Unknown, or a
    // counterexample), so usage errors map to 1 like every other error.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().expect("stderr unavailable");
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Cmd::Synthesize(a) => cmd_synthesize(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Installs the global thread pool cap before any parallel work starts.
fn set_jobs(jobs: Option<usize>) -> Result<(), String> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err("--jobs must be positive".to_string());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("--jobs: {e}"))?;
    }
    Ok(())
}

fn run_config(bounds: &BoundsArgs, space: &SpaceArgs) -> Result<RunConfig, String> {
    if space.timeout == 0 {
        return Err("--timeout must be positive".to_string());
    }
    Ok(RunConfig {
        segments: bounds.segments.clone(),
        max_total_len: bounds.max_len,
        min_seg_len: bounds.min_seg_len,
        domain: bounds.domain.clone(),
        merge_menu: space.merge_menu.clone(),
        max_const_prefix: space.max_const_prefix,
        max_conjuncts: space.max_conjuncts,
        timeout: Some(Duration::from_secs(space.timeout)),
    })
}

fn print_stats(stats: &SynthStats) {
    println!(
        "tried {} candidate(s), checked {} array/split case(s) in {:.3}s",
        stats.candidates_tried,
        stats.arrays_checked,
        stats.elapsed.as_secs_f64()
    );
}

fn cmd_synthesize(a: SynthesizeArgs) -> Result<u8, String> {
    set_jobs(a.jobs)?;
    let p = a.source.load()?;
    let cfg = run_config(&a.bounds, &a.space)?;
    let result = run_synthesis(&p, &cfg).map_err(|e| e.to_string())?;
    match result.outcome {
        SynthOutcome::Found { hypothesis, decomposition } => {
            let mut line = format!("{hypothesis} {}", decomposition.merge);
            match &decomposition.prefix {
                PrefixSpec::None => {}
                PrefixSpec::Const(c) => line.push_str(&format!(" prefix_length={c}")),
                PrefixSpec::Cond(cond) => line.push_str(&format!(" prefix_cond={cond}")),
            }
            debug_assert!(matches!(
                (&hypothesis, &decomposition.prefix),
                (Hypothesis::NoPrefix, PrefixSpec::None)
                    | (Hypothesis::ConstPrefix, PrefixSpec::Const(_))
                    | (Hypothesis::CondPrefix, PrefixSpec::Cond(_))
            ));
            println!("{line}");
            print_stats(&result.stats);
            Ok(0)
        }
        SynthOutcome::Unknown => {
            println!("unknown");
            print_stats(&result.stats);
            Ok(2)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, String> {
    set_jobs(a.jobs)?;
    let p = a.source.load()?;
    let d = a.decomp.decomposition()?;
    let domain = a
        .bounds
        .domain
        .clone()
        .unwrap_or_else(|| grassp_core::bench::auto_domain(&p));
    let mut total: u128 = 0;
    for &m in &a.bounds.segments {
        let b = VerifBounds {
            m,
            max_total_len: a.bounds.max_len,
            min_seg_len: a.bounds.min_seg_len,
            domain: domain.clone(),
        };
        b.validate().map_err(|e| e.to_string())?;
        let (verdict, examined) = verify_counted(&p, &d, &b);
        total += examined;
        match verdict {
            Verdict::Valid => {}
            Verdict::Counterexample { segments, expected, actual } => {
                println!("Counterexample");
                println!("segments {}", format_segments(&segments));
                println!("expected {expected}");
                println!("actual {actual}");
                return Ok(2);
            }
            Verdict::Error(msg) => return Err(msg),
        }
    }
    println!("Valid");
    println!("checked {total} array/split case(s)");
    Ok(0)
}

fn read_input(path: &PathBuf) -> Result<Vec<Scalar>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.split_whitespace()
        .map(|tok| tok.parse::<Scalar>().map_err(|e| format!("{}: {e}", path.display())))
        .collect()
}

fn cmd_run(a: RunArgs) -> Result<u8, String> {
    let p = a.source.load()?;
    let d = a.decomp.decomposition()?;
    let input = read_input(&a.input)?;
    let segments = partition(&input, a.segments)?;
    let workers = a.jobs.unwrap_or(a.segments);
    let (out, report) = run_parallel(&p, &d, &segments, workers).map_err(|e| e.to_string())?;

    println!("output {out}");
    let fmt_list =
        |v: &[usize]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
    println!("s = ({})", fmt_list(&report.s));
    println!("p = ({})", fmt_list(&report.p));
    println!("T_s = {}", report.t_s);
    println!("T_p = {}", report.t_p);
    println!("T_f = {}", report.t_f);
    println!("T_c = {}", report.t_c);
    println!("X = {} ({:.3})", report.x, report.x.to_f64());
    println!("wall sequential {:.6}s", report.wall_sequential.as_secs_f64());
    println!("wall parallel   {:.6}s", report.wall_parallel.as_secs_f64());

    // Independent re-execution of the plain fold; a mismatch means the
    // decomposition is wrong on this input (it cannot have been verified).
    let (seq, _) = sequential_run(&p, &input).map_err(|e| e.to_string())?;
    if out == seq {
        println!("cross-check OK");
        Ok(0)
    } else {
        println!("cross-check MISMATCH: parallel {out}, sequential {seq}");
        Ok(3)
    }
}

fn cmd_bench(a: BenchArgs) -> Result<u8, String> {
    set_jobs(a.jobs)?;
    let cfg = run_config(&a.bounds, &a.space)?;
    let rows = bench_all(&cfg).map_err(|e| e.to_string())?;
    match a.format {
        Format::Text => print!("{}", render_text(&rows)),
        Format::Tsv => print!("{}", render_tsv(&rows)),
    }
    if rows.iter().all(|r| r.status.passed()) {
        Ok(0)
    } else {
        Ok(1)
    }
}
