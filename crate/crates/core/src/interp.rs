//! Reference sequential semantics: the left fold of a program's step
//! function over an array, with iteration counting for the cost model.

use crate::expr::eval_expr;
use crate::program::Program;
use crate::scalar::{EvalError, Scalar};

/// An input array; elements are plain scalars.
pub type InputArray = Vec<Scalar>;

/// Result of folding a program over an array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldTrace {
    pub final_state: Vec<Scalar>,
    /// One per element consumed; the unit of the cost model.
    pub iterations: usize,
}

/// One step: every field evaluated against the old state, then swapped in
/// at once.
pub fn step(p: &Program, state: &[Scalar], input: Scalar) -> Result<Vec<Scalar>, EvalError> {
    let mut next = Vec::with_capacity(p.step.len());
    for e in &p.step {
        next.push(eval_expr(e, state, Some(input))?);
    }
    Ok(next)
}

/// Left fold of [`step`] over `a`, starting from `d`.
pub fn fold_run(p: &Program, d: &[Scalar], a: &[Scalar]) -> Result<FoldTrace, EvalError> {
    let mut state = d.to_vec();
    for &x in a {
        state = step(p, &state, x)?;
    }
    Ok(FoldTrace { final_state: state, iterations: a.len() })
}

/// The program's output function applied to a state.
pub fn output(p: &Program, d: &[Scalar]) -> Result<Scalar, EvalError> {
    eval_expr(&p.output, d, None)
}

/// Concatenates arrays in order.
pub fn append(arrays: &[InputArray]) -> InputArray {
    let mut out = Vec::with_capacity(arrays.iter().map(Vec::len).sum());
    for a in arrays {
        out.extend_from_slice(a);
    }
    out
}

/// Runs the whole program on one array: fold from the initial state, then
/// the output function. Returns the output and the iteration count.
pub fn sequential_run(p: &Program, a: &[Scalar]) -> Result<(Scalar, usize), EvalError> {
    let trace = fold_run(p, &p.init, a)?;
    Ok((output(p, &trace.final_state)?, trace.iterations))
}
