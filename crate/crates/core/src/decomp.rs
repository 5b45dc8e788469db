//! Candidate decompositions: a binary merge operator plus a prefix rule
//! describing how much of the next segment each worker must read ahead.

use std::fmt;
use std::str::FromStr;

use crate::expr::{bool_to_string, eval_bool, BoolExpr};
use crate::scalar::{EvalError, Scalar};

/// How far a worker reads into the segment after its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrefixSpec {
    /// Workers see only their own segment.
    None,
    /// A fixed number of elements (truncated if the segment is shorter).
    Const(usize),
    /// Everything up to and including the first element satisfying the
    /// predicate; the whole segment if no element does. The predicate may
    /// reference only `elem`.
    Cond(BoolExpr),
}

impl fmt::Display for PrefixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrefixSpec::None => write!(f, "none"),
            PrefixSpec::Const(c) => write!(f, "{c}"),
            PrefixSpec::Cond(b) => write!(f, "{b}"),
        }
    }
}

/// Binary operators offered as merge candidates. `First` and `Last` are
/// projections; the rest are associative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeOp {
    Add,
    Min,
    Max,
    Mul,
    First,
    Last,
}

impl MergeOp {
    /// The full candidate menu, in the order the synthesizer tries them.
    pub const MENU: [MergeOp; 6] =
        [MergeOp::Add, MergeOp::Min, MergeOp::Max, MergeOp::Mul, MergeOp::First, MergeOp::Last];

    fn apply(self, acc: Scalar, v: Scalar) -> Result<Scalar, EvalError> {
        match self {
            MergeOp::Add => acc.add(v),
            MergeOp::Min => acc.min(v),
            MergeOp::Max => acc.max(v),
            MergeOp::Mul => acc.mul(v),
            MergeOp::First => Ok(acc),
            MergeOp::Last => Ok(v),
        }
    }
}

impl fmt::Display for MergeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MergeOp::Add => "+",
            MergeOp::Min => "min",
            MergeOp::Max => "max",
            MergeOp::Mul => "*",
            MergeOp::First => "first",
            MergeOp::Last => "last",
        };
        f.write_str(s)
    }
}

impl FromStr for MergeOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "add" | "+" => Ok(MergeOp::Add),
            "min" => Ok(MergeOp::Min),
            "max" => Ok(MergeOp::Max),
            "mul" | "*" => Ok(MergeOp::Mul),
            "first" => Ok(MergeOp::First),
            "last" => Ok(MergeOp::Last),
            other => Err(format!(
                "unknown merge operator '{other}' (expected add, min, max, mul, first or last)"
            )),
        }
    }
}

/// A full candidate: merge operator plus prefix rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub merge: MergeOp,
    pub prefix: PrefixSpec,
}

/// Left-fold of the merge operator over worker outputs.
///
/// Panics if `outputs` is empty; callers always have at least one worker.
pub fn apply_merge(op: MergeOp, outputs: &[Scalar]) -> Result<Scalar, EvalError> {
    let (&first, rest) = outputs.split_first().expect("merge needs at least one worker output");
    let mut acc = first;
    for &v in rest {
        acc = op.apply(acc, v)?;
    }
    Ok(acc)
}

/// The portion of `a` a preceding worker reads, per the given prefix rule.
pub fn compute_prefix(spec: &PrefixSpec, a: &[Scalar]) -> Result<Vec<Scalar>, EvalError> {
    match spec {
        PrefixSpec::None => Ok(Vec::new()),
        PrefixSpec::Const(c) => Ok(a[..(*c).min(a.len())].to_vec()),
        PrefixSpec::Cond(pred) => {
            for (i, &x) in a.iter().enumerate() {
                if eval_bool(pred, &[], Some(x))? {
                    return Ok(a[..=i].to_vec());
                }
            }
            Ok(a.to_vec())
        }
    }
}

/// Renders a prefix condition the way the CLI accepts it back.
pub fn cond_to_string(pred: &BoolExpr) -> String {
    bool_to_string(pred, &[])
}
