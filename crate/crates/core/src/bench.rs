//! The seven-program benchmark corpus, its expected decompositions, and
//! the table runner that synthesizes each row and compares.

use std::fmt;
use std::time::{Duration, Instant};

use crate::decomp::{MergeOp, PrefixSpec};
use crate::expr::{BoolExpr, CmpOp, Expr};
use crate::parse::parse_program;
use crate::program::Program;
use crate::scalar::Scalar;
use crate::synth::{
    grassp, synthesis_bounds, CandidateSpace, Hypothesis, SynthError, SynthOutcome,
    SynthesisResult,
};

pub const BENCH_NAMES: [&str; 7] = [
    "array-count",
    "array-max",
    "is-sorted",
    "alternation-of-1-2",
    "number-of-123",
    "seen-2-after-1",
    "alternation-of-11-22",
];

const ARRAY_COUNT_GSP: &str = include_str!("../benchmarks/array-count.gsp");
const ARRAY_MAX_GSP: &str = include_str!("../benchmarks/array-max.gsp");
const IS_SORTED_GSP: &str = include_str!("../benchmarks/is-sorted.gsp");
const ALTERNATION_1_2_GSP: &str = include_str!("../benchmarks/alternation-of-1-2.gsp");
const NUMBER_OF_123_GSP: &str = include_str!("../benchmarks/number-of-123.gsp");
const SEEN_2_AFTER_1_GSP: &str = include_str!("../benchmarks/seen-2-after-1.gsp");
const ALTERNATION_11_22_GSP: &str = include_str!("../benchmarks/alternation-of-11-22.gsp");

/// A deliberately hard program the cascade cannot crack: committed so the
/// unknown path stays exercised.
pub const SECOND_MAX_GSP: &str = include_str!("../benchmarks/second-max.gsp");

/// One corpus program together with the decomposition synthesis is
/// expected to find for it.
#[derive(Debug, Clone)]
pub struct BenchmarkEntry {
    pub name: &'static str,
    pub program: Program,
    pub expected_hypothesis: Hypothesis,
    pub expected_merge: MergeOp,
    pub expected_prefix: PrefixSpec,
    /// State arity of the shipped encoding.
    pub vars: usize,
}

fn elem_eq(c: Scalar) -> BoolExpr {
    BoolExpr::Cmp(CmpOp::Eq, Box::new(Expr::CurrentInput), Box::new(Expr::Const(c)))
}

pub fn load_benchmark(name: &str) -> Result<BenchmarkEntry, String> {
    use Hypothesis::{CondPrefix, ConstPrefix, NoPrefix};
    let (name, src, hyp, merge, prefix) = match name {
        "array-count" => ("array-count", ARRAY_COUNT_GSP, NoPrefix, MergeOp::Add, PrefixSpec::None),
        "array-max" => ("array-max", ARRAY_MAX_GSP, NoPrefix, MergeOp::Max, PrefixSpec::None),
        "is-sorted" => ("is-sorted", IS_SORTED_GSP, ConstPrefix, MergeOp::Min, PrefixSpec::Const(1)),
        "alternation-of-1-2" => (
            "alternation-of-1-2",
            ALTERNATION_1_2_GSP,
            ConstPrefix,
            MergeOp::Min,
            PrefixSpec::Const(1),
        ),
        "number-of-123" => (
            "number-of-123",
            NUMBER_OF_123_GSP,
            ConstPrefix,
            MergeOp::Add,
            PrefixSpec::Const(2),
        ),
        "seen-2-after-1" => (
            "seen-2-after-1",
            SEEN_2_AFTER_1_GSP,
            CondPrefix,
            MergeOp::Max,
            PrefixSpec::Cond(elem_eq(Scalar::Int(2))),
        ),
        "alternation-of-11-22" => (
            "alternation-of-11-22",
            ALTERNATION_11_22_GSP,
            CondPrefix,
            MergeOp::Min,
            PrefixSpec::Cond(elem_eq(Scalar::Eof)),
        ),
        other => {
            return Err(format!(
                "unknown benchmark '{other}' (available: {})",
                BENCH_NAMES.join(", ")
            ))
        }
    };
    let program = parse_program(src).map_err(|e| format!("benchmark {name}: {e}"))?;
    let vars = program.arity();
    Ok(BenchmarkEntry {
        name,
        program,
        expected_hypothesis: hyp,
        expected_merge: merge,
        expected_prefix: prefix,
        vars,
    })
}

/// The default verification domain for a program: {0,1,2,3}, plus the end
/// marker when the program mentions it.
pub fn auto_domain(p: &Program) -> Vec<Scalar> {
    let mut d = vec![Scalar::Int(0), Scalar::Int(1), Scalar::Int(2), Scalar::Int(3)];
    if p.mentions_eof() {
        d.push(Scalar::Eof);
    }
    d
}

/// Knobs shared by the synthesize and bench entry points.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Segment counts to verify against, e.g. [2] or [2, 3].
    pub segments: Vec<usize>,
    pub max_total_len: usize,
    pub min_seg_len: usize,
    /// Explicit value domain; None picks [`auto_domain`] per program.
    pub domain: Option<Vec<Scalar>>,
    /// Merge menu override; None keeps the full menu.
    pub merge_menu: Option<Vec<MergeOp>>,
    pub max_const_prefix: usize,
    pub max_conjuncts: usize,
    /// Soft per-synthesis deadline.
    pub timeout: Option<Duration>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            segments: vec![2],
            max_total_len: 6,
            min_seg_len: 1,
            domain: None,
            merge_menu: None,
            max_const_prefix: 2,
            max_conjuncts: 2,
            timeout: Some(Duration::from_secs(60)),
        }
    }
}

/// Builds the bounds and candidate space for `p` per the config and runs
/// the cascade.
pub fn run_synthesis(p: &Program, cfg: &RunConfig) -> Result<SynthesisResult, SynthError> {
    let domain = cfg.domain.clone().unwrap_or_else(|| auto_domain(p));
    let bounds = synthesis_bounds(
        &cfg.segments,
        cfg.max_total_len,
        cfg.min_seg_len,
        cfg.max_const_prefix,
        &domain,
    )?;
    let mut space = CandidateSpace::default_for(p);
    if let Some(menu) = &cfg.merge_menu {
        space.merge_ops = menu.clone();
    }
    space.max_const_prefix = cfg.max_const_prefix;
    space.max_conjuncts = cfg.max_conjuncts;
    let deadline = cfg.timeout.map(|t| Instant::now() + t);
    grassp(p, &bounds, &space, deadline)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Fail,
    Timeout,
}

impl RowStatus {
    pub fn passed(self) -> bool {
        self == RowStatus::Pass
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Pass => "PASS",
            RowStatus::Fail => "FAIL",
            RowStatus::Timeout => "TIMEOUT",
        })
    }
}

/// One line of the bench table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub name: &'static str,
    pub vars: usize,
    pub hypothesis: String,
    pub merge: String,
    pub prefix: String,
    pub time: Duration,
    pub status: RowStatus,
}

fn prefix_cell(p: &PrefixSpec) -> String {
    match p {
        PrefixSpec::None => "-".to_string(),
        other => other.to_string(),
    }
}

/// Synthesizes every corpus program and grades it against the expected
/// decomposition. A per-row timeout becomes a TIMEOUT row; configuration
/// errors (which would hit every row alike) abort.
pub fn bench_all(cfg: &RunConfig) -> Result<Vec<BenchRow>, SynthError> {
    let mut rows = Vec::with_capacity(BENCH_NAMES.len());
    for name in BENCH_NAMES {
        let entry = load_benchmark(name).expect("corpus entry");
        let started = Instant::now();
        match run_synthesis(&entry.program, cfg) {
            Ok(result) => {
                let time = started.elapsed();
                rows.push(match result.outcome {
                    SynthOutcome::Found { hypothesis, decomposition } => {
                        let pass = hypothesis == entry.expected_hypothesis
                            && decomposition.merge == entry.expected_merge
                            && decomposition.prefix == entry.expected_prefix;
                        BenchRow {
                            name: entry.name,
                            vars: entry.vars,
                            hypothesis: hypothesis.to_string(),
                            merge: decomposition.merge.to_string(),
                            prefix: prefix_cell(&decomposition.prefix),
                            time,
                            status: if pass { RowStatus::Pass } else { RowStatus::Fail },
                        }
                    }
                    SynthOutcome::Unknown => BenchRow {
                        name: entry.name,
                        vars: entry.vars,
                        hypothesis: "unknown".to_string(),
                        merge: "-".to_string(),
                        prefix: "-".to_string(),
                        time,
                        status: RowStatus::Fail,
                    },
                });
            }
            Err(SynthError::TimedOut) => rows.push(BenchRow {
                name: entry.name,
                vars: entry.vars,
                hypothesis: "-".to_string(),
                merge: "-".to_string(),
                prefix: "-".to_string(),
                time: started.elapsed(),
                status: RowStatus::Timeout,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

pub fn render_text(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<22} {:>4}  {:<16} {:<6} {:<14} {:>8}  {}\n",
        "benchmark", "vars", "hypothesis", "merge", "prefix", "time_s", "status"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<22} {:>4}  {:<16} {:<6} {:<14} {:>8.3}  {}\n",
            r.name,
            r.vars,
            r.hypothesis,
            r.merge,
            r.prefix,
            r.time.as_secs_f64(),
            r.status
        ));
    }
    let passed = rows.iter().filter(|r| r.status.passed()).count();
    out.push_str(&format!("{passed}/{} rows match the expected table\n", rows.len()));
    out
}

pub fn render_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from("benchmark\tvars\thypothesis\tmerge\tprefix\ttime_s\tstatus\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\n",
            r.name,
            r.vars,
            r.hypothesis,
            r.merge,
            r.prefix,
            r.time.as_secs_f64(),
            r.status
        ));
    }
    out
}
