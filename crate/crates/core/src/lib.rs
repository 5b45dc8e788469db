//! Synthesis and execution of parallel decompositions for sequential
//! array folds.
//!
//! The input is a small s-expression program that folds left over an
//! array of scalars ([`parse::parse_program`], [`program::Program`]).
//! Synthesis ([`synth::grassp`]) searches for a merge operator plus an
//! optional prefix rule such that running the fold independently on
//! segments of the array, each extended with a short prefix of its right
//! neighbour, and merging the per-segment outputs reproduces the
//! sequential result. Candidates are screened by exhaustive bounded
//! verification ([`verify`]), so a returned decomposition comes with a
//! concrete guarantee: no array within the checked bounds distinguishes
//! it from the sequential program.
//!
//! [`runtime::run_parallel`] executes a decomposition across worker
//! threads and reports modelled and measured speedup; [`bench`] bundles
//! the built-in example programs and the table runner for them.

pub mod bench;
pub mod cond;
pub mod decomp;
pub mod expr;
pub mod interp;
pub mod parse;
pub mod program;
pub mod runtime;
pub mod scalar;
pub mod synth;
pub mod verify;

pub use bench::{bench_all, load_benchmark, run_synthesis, BenchRow, RowStatus, RunConfig};
pub use decomp::{Decomposition, MergeOp, PrefixSpec};
pub use expr::{BoolExpr, Expr};
pub use parse::{parse_elem_condition, parse_program, GspError};
pub use program::Program;
pub use runtime::{run_parallel, CostReport, RunError};
pub use scalar::{EvalError, Scalar};
pub use synth::{grassp, Hypothesis, SynthError, SynthOutcome, SynthesisResult};
pub use verify::{verify, verify_counted, VerifBounds, Verdict};
