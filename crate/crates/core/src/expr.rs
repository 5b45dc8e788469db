//! Expression trees for step and output functions, and their evaluator.
//!
//! Expressions read the current state vector and, inside step functions,
//! the current input element. `if`, `and`, and `or` evaluate lazily from
//! the left, so a guard can keep an `eof`-valued operand away from an
//! ordered comparison or an arithmetic operator.

use std::fmt;

use crate::scalar::{EvalError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Min,
    Max,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Min => "min",
            BinOp::Max => "max",
        }
    }

    fn apply(self, a: Scalar, b: Scalar) -> Result<Scalar, EvalError> {
        match self {
            BinOp::Add => a.add(b),
            BinOp::Sub => a.sub(b),
            BinOp::Mul => a.mul(b),
            BinOp::Min => a.min(b),
            BinOp::Max => a.max(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(Scalar),
    /// The element currently being consumed; only valid in step functions.
    CurrentInput,
    /// Zero-based index into the state vector.
    StateField(usize),
    If(Box<BoolExpr>, Box<Expr>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
}

/// Evaluates `e` over `state`, with `input` bound to `elem` when present.
///
/// Panics if the expression reads `elem` while no input is bound or names
/// a state field past the end of `state`; validated programs cannot do
/// either.
pub fn eval_expr(e: &Expr, state: &[Scalar], input: Option<Scalar>) -> Result<Scalar, EvalError> {
    match e {
        Expr::Const(s) => Ok(*s),
        Expr::CurrentInput => Ok(input.expect("elem read outside a step function")),
        Expr::StateField(i) => Ok(state[*i]),
        Expr::If(c, t, f) => {
            if eval_bool(c, state, input)? {
                eval_expr(t, state, input)
            } else {
                eval_expr(f, state, input)
            }
        }
        Expr::BinOp(op, a, b) => {
            let a = eval_expr(a, state, input)?;
            let b = eval_expr(b, state, input)?;
            op.apply(a, b)
        }
    }
}

/// Evaluates a boolean expression; `and` and `or` short-circuit.
pub fn eval_bool(b: &BoolExpr, state: &[Scalar], input: Option<Scalar>) -> Result<bool, EvalError> {
    match b {
        BoolExpr::Cmp(op, a, b) => {
            let a = eval_expr(a, state, input)?;
            let b = eval_expr(b, state, input)?;
            match op {
                CmpOp::Eq => Ok(a == b),
                CmpOp::Ne => Ok(a != b),
                CmpOp::Lt => Ok(a.checked_cmp(b, "<")?.is_lt()),
                CmpOp::Le => Ok(a.checked_cmp(b, "<=")?.is_le()),
                CmpOp::Gt => Ok(a.checked_cmp(b, ">")?.is_gt()),
                CmpOp::Ge => Ok(a.checked_cmp(b, ">=")?.is_ge()),
            }
        }
        BoolExpr::And(a, b) => Ok(eval_bool(a, state, input)? && eval_bool(b, state, input)?),
        BoolExpr::Or(a, b) => Ok(eval_bool(a, state, input)? || eval_bool(b, state, input)?),
        BoolExpr::Not(a) => Ok(!eval_bool(a, state, input)?),
    }
}

/// Nesting depth of an expression tree, counting both value and boolean
/// nodes; leaves have depth 1.
pub fn expr_depth(e: &Expr) -> usize {
    match e {
        Expr::Const(_) | Expr::CurrentInput | Expr::StateField(_) => 1,
        Expr::If(c, t, f) => 1 + bool_depth(c).max(expr_depth(t)).max(expr_depth(f)),
        Expr::BinOp(_, a, b) => 1 + expr_depth(a).max(expr_depth(b)),
    }
}

pub fn bool_depth(b: &BoolExpr) -> usize {
    match b {
        BoolExpr::Cmp(_, a, b) => 1 + expr_depth(a).max(expr_depth(b)),
        BoolExpr::And(a, b) | BoolExpr::Or(a, b) => 1 + bool_depth(a).max(bool_depth(b)),
        BoolExpr::Not(a) => 1 + bool_depth(a),
    }
}

/// Walks an expression depth-first, left to right, applying `f` to every
/// value-expression node (boolean subtrees are traversed for the value
/// expressions inside them).
pub fn visit_exprs<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    f(e);
    match e {
        Expr::Const(_) | Expr::CurrentInput | Expr::StateField(_) => {}
        Expr::If(c, t, fls) => {
            visit_bool_exprs(c, f);
            visit_exprs(t, f);
            visit_exprs(fls, f);
        }
        Expr::BinOp(_, a, b) => {
            visit_exprs(a, f);
            visit_exprs(b, f);
        }
    }
}

pub fn visit_bool_exprs<'a>(b: &'a BoolExpr, f: &mut impl FnMut(&'a Expr)) {
    match b {
        BoolExpr::Cmp(_, a, c) => {
            visit_exprs(a, f);
            visit_exprs(c, f);
        }
        BoolExpr::And(a, c) | BoolExpr::Or(a, c) => {
            visit_bool_exprs(a, f);
            visit_bool_exprs(c, f);
        }
        BoolExpr::Not(a) => visit_bool_exprs(a, f),
    }
}

pub fn expr_uses_input(e: &Expr) -> bool {
    let mut found = false;
    visit_exprs(e, &mut |n| found |= matches!(n, Expr::CurrentInput));
    found
}

pub fn bool_uses_state(b: &BoolExpr) -> bool {
    let mut found = false;
    visit_bool_exprs(b, &mut |n| found |= matches!(n, Expr::StateField(_)));
    found
}

/// Renders an expression in the program file syntax; `names` supplies the
/// identifier for each state field index.
pub fn expr_to_string(e: &Expr, names: &[String]) -> String {
    let mut out = String::new();
    write_expr(e, names, &mut out);
    out
}

pub fn bool_to_string(b: &BoolExpr, names: &[String]) -> String {
    let mut out = String::new();
    write_bool(b, names, &mut out);
    out
}

fn write_expr(e: &Expr, names: &[String], out: &mut String) {
    use std::fmt::Write;
    match e {
        Expr::Const(s) => {
            let _ = write!(out, "{s}");
        }
        Expr::CurrentInput => out.push_str("elem"),
        Expr::StateField(i) => match names.get(*i) {
            Some(n) => out.push_str(n),
            None => {
                let _ = write!(out, "s{i}");
            }
        },
        Expr::If(c, t, f) => {
            out.push_str("(if ");
            write_bool(c, names, out);
            out.push(' ');
            write_expr(t, names, out);
            out.push(' ');
            write_expr(f, names, out);
            out.push(')');
        }
        Expr::BinOp(op, a, b) => {
            out.push('(');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(a, names, out);
            out.push(' ');
            write_expr(b, names, out);
            out.push(')');
        }
    }
}

fn write_bool(b: &BoolExpr, names: &[String], out: &mut String) {
    match b {
        BoolExpr::Cmp(op, a, c) => {
            out.push('(');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(a, names, out);
            out.push(' ');
            write_expr(c, names, out);
            out.push(')');
        }
        BoolExpr::And(a, c) => {
            out.push_str("(and ");
            write_bool(a, names, out);
            out.push(' ');
            write_bool(c, names, out);
            out.push(')');
        }
        BoolExpr::Or(a, c) => {
            out.push_str("(or ");
            write_bool(a, names, out);
            out.push(' ');
            write_bool(c, names, out);
            out.push(')');
        }
        BoolExpr::Not(a) => {
            out.push_str("(not ");
            write_bool(a, names, out);
            out.push(')');
        }
    }
}

/// `BoolExpr` renders without state names, which suits prefix conditions:
/// they may reference `elem` only.
impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bool_to_string(self, &[]))
    }
}
