//! Program representation: a fixed-arity state vector with its initial
//! values, one step expression per field, and an output expression.

use crate::expr::{expr_depth, expr_to_string, expr_uses_input, visit_exprs, BoolExpr, Expr};
use crate::scalar::Scalar;

/// Expression trees deeper than this fail validation.
pub const MAX_EXPR_DEPTH: usize = 32;

/// A sequential left-fold program.
///
/// Each step expression is evaluated against the state as it was before
/// the element arrived, so all fields update simultaneously. The output
/// expression reads only the final state.
#[derive(Debug, Clone, Eq)]
pub struct Program {
    /// Label for reports; not part of the program's identity.
    pub name: String,
    pub field_names: Vec<String>,
    pub init: Vec<Scalar>,
    pub step: Vec<Expr>,
    pub output: Expr,
}

// The name is a label, not structure: a parsed file compares equal to the
// program it was printed from even though printing drops the name.
impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.field_names == other.field_names
            && self.init == other.init
            && self.step == other.step
            && self.output == other.output
    }
}

impl Program {
    pub fn arity(&self) -> usize {
        self.init.len()
    }

    /// True when any expression or initial value mentions the `eof`
    /// sentinel; such programs get `eof` added to their default domain.
    pub fn mentions_eof(&self) -> bool {
        self.init.contains(&Scalar::Eof)
            || collect_constants(self).contains(&Scalar::Eof)
    }
}

/// Returns all invariant violations; an empty list means the program is
/// valid. Violations are data, not errors, so callers can report them all
/// at once.
pub fn validate_program(p: &Program) -> Vec<String> {
    let mut out = Vec::new();
    let k = p.init.len();
    if k == 0 {
        out.push("arity must be positive".to_string());
    }
    if p.step.len() != k || p.field_names.len() != k {
        out.push(format!(
            "state arity mismatch: {} fields, {} initial values, {} step expressions",
            p.field_names.len(),
            k,
            p.step.len()
        ));
    }

    let mut check_expr = |e: &Expr, what: &str, allow_input: bool| {
        if expr_depth(e) > MAX_EXPR_DEPTH {
            out.push(format!("{what}: expression depth exceeds {MAX_EXPR_DEPTH}"));
        }
        if !allow_input && expr_uses_input(e) {
            out.push(format!("{what} uses current input"));
        }
        let mut bad_index = false;
        visit_exprs(e, &mut |n| {
            if let Expr::StateField(i) = n {
                bad_index |= *i >= k;
            }
        });
        if bad_index {
            out.push(format!("{what}: state index out of range"));
        }
    };

    for (i, e) in p.step.iter().enumerate() {
        let what = match p.field_names.get(i) {
            Some(n) => format!("step for {n}"),
            None => format!("step {i}"),
        };
        check_expr(e, &what, true);
    }
    check_expr(&p.output, "output", false);

    // Statically visible misuse of eof: a literal eof under an ordered
    // comparison or an arithmetic operator can never evaluate.
    let mut eof_misuse = false;
    for e in p.step.iter().chain(std::iter::once(&p.output)) {
        eof_misuse |= expr_misuses_eof(e);
    }
    if eof_misuse {
        out.push("Eof is unordered: it appears under an ordered comparison or arithmetic".into());
    }

    out
}

fn is_eof_literal(e: &Expr) -> bool {
    matches!(e, Expr::Const(Scalar::Eof))
}

fn expr_misuses_eof(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::CurrentInput | Expr::StateField(_) => false,
        Expr::BinOp(_, a, b) => {
            is_eof_literal(a) || is_eof_literal(b) || expr_misuses_eof(a) || expr_misuses_eof(b)
        }
        Expr::If(c, t, f) => bool_misuses_eof(c) || expr_misuses_eof(t) || expr_misuses_eof(f),
    }
}

fn bool_misuses_eof(b: &BoolExpr) -> bool {
    use crate::expr::CmpOp::*;
    match b {
        BoolExpr::Cmp(op, l, r) => {
            let ordered = matches!(op, Lt | Le | Gt | Ge);
            (ordered && (is_eof_literal(l) || is_eof_literal(r)))
                || expr_misuses_eof(l)
                || expr_misuses_eof(r)
        }
        BoolExpr::And(x, y) | BoolExpr::Or(x, y) => bool_misuses_eof(x) || bool_misuses_eof(y),
        BoolExpr::Not(x) => bool_misuses_eof(x),
    }
}

/// Renders a program in the file format; parsing the result yields a
/// structurally equal program.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::from("(program\n  (state");
    for (name, value) in p.field_names.iter().zip(&p.init) {
        out.push_str(&format!(" ({name} {value})"));
    }
    out.push_str(")\n  (step");
    if p.step.len() == 1 {
        out.push_str(&format!(
            " ({} {})",
            p.field_names[0],
            expr_to_string(&p.step[0], &p.field_names)
        ));
    } else {
        for (name, e) in p.field_names.iter().zip(&p.step) {
            out.push_str(&format!("\n    ({name} {})", expr_to_string(e, &p.field_names)));
        }
    }
    out.push_str(&format!(
        ")\n  (output {}))\n",
        expr_to_string(&p.output, &p.field_names)
    ));
    out
}

/// Scalar constants of a program in first-occurrence order: initial
/// values in field order, then each step expression depth-first left to
/// right, then the output. Duplicates keep their first position.
///
/// The conditional-prefix stage draws its candidate constants from this
/// list, so the order decides which equality test is tried first.
pub fn collect_constants(p: &Program) -> Vec<Scalar> {
    let mut seen = Vec::new();
    {
        let mut push = |s: Scalar| {
            if !seen.contains(&s) {
                seen.push(s);
            }
        };
        for v in &p.init {
            push(*v);
        }
        let mut on_expr = |e: &Expr| {
            if let Expr::Const(s) = e {
                push(*s);
            }
        };
        for e in &p.step {
            visit_exprs(e, &mut on_expr);
        }
        visit_exprs(&p.output, &mut on_expr);
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp, CmpOp};
    use crate::parse::parse_program;

    fn is_sorted_src() -> &'static str {
        "(program (state (prev -inf) (ok 1)) \
         (step (prev elem) (ok (if (<= prev elem) ok 0))) \
         (output ok))"
    }

    #[test]
    fn valid_program_has_no_violations() {
        let p = parse_program(is_sorted_src()).unwrap();
        assert_eq!(validate_program(&p), Vec::<String>::new());
    }

    #[test]
    fn out_of_range_state_index_is_reported() {
        let p = Program {
            name: String::new(),
            field_names: vec!["a".into()],
            init: vec![Scalar::Int(0)],
            step: vec![Expr::StateField(2)],
            output: Expr::StateField(0),
        };
        let v = validate_program(&p);
        assert!(v.iter().any(|m| m.contains("state index out of range")), "{v:?}");
    }

    #[test]
    fn zero_arity_is_reported() {
        let p = Program {
            name: String::new(),
            field_names: vec![],
            init: vec![],
            step: vec![],
            output: Expr::Const(Scalar::Int(0)),
        };
        assert!(validate_program(&p).iter().any(|m| m.contains("arity must be positive")));
    }

    #[test]
    fn output_reading_input_is_reported() {
        let p = Program {
            name: String::new(),
            field_names: vec!["a".into()],
            init: vec![Scalar::Int(0)],
            step: vec![Expr::StateField(0)],
            output: Expr::CurrentInput,
        };
        assert!(validate_program(&p).iter().any(|m| m.contains("output uses current input")));
    }

    #[test]
    fn literal_eof_under_ordered_comparison_is_reported() {
        let p = Program {
            name: String::new(),
            field_names: vec!["a".into()],
            init: vec![Scalar::Int(0)],
            step: vec![Expr::If(
                Box::new(BoolExpr::Cmp(
                    CmpOp::Lt,
                    Box::new(Expr::Const(Scalar::Eof)),
                    Box::new(Expr::Const(Scalar::Int(1))),
                )),
                Box::new(Expr::Const(Scalar::Int(1))),
                Box::new(Expr::StateField(0)),
            )],
            output: Expr::StateField(0),
        };
        assert!(validate_program(&p).iter().any(|m| m.contains("Eof is unordered")));
    }

    #[test]
    fn depth_limit_is_enforced() {
        let mut e = Expr::Const(Scalar::Int(0));
        for _ in 0..MAX_EXPR_DEPTH {
            e = Expr::BinOp(BinOp::Add, Box::new(e), Box::new(Expr::Const(Scalar::Int(1))));
        }
        let p = Program {
            name: String::new(),
            field_names: vec!["a".into()],
            init: vec![Scalar::Int(0)],
            step: vec![Expr::StateField(0)],
            output: e,
        };
        assert!(validate_program(&p).iter().any(|m| m.contains("depth exceeds")));
    }

    #[test]
    fn print_then_parse_round_trips() {
        let p = parse_program(is_sorted_src()).unwrap();
        let printed = pretty_print(&p);
        let again = parse_program(&printed).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn constants_follow_first_occurrence_order() {
        let p = parse_program(
            "(program (state (found 0) (seen1 0)) \
             (step (found (if (and (= elem 2) (= seen1 1)) 1 found)) \
                   (seen1 (if (= elem 1) 1 seen1))) \
             (output found))",
        )
        .unwrap();
        assert_eq!(
            collect_constants(&p),
            vec![Scalar::Int(0), Scalar::Int(2), Scalar::Int(1)]
        );
    }

    #[test]
    fn eof_mention_is_detected() {
        let with = parse_program(
            "(program (state (s 0)) (step (s (if (= elem eof) 1 s))) (output s))",
        )
        .unwrap();
        assert!(with.mentions_eof());
        let without = parse_program(is_sorted_src()).unwrap();
        assert!(!without.mentions_eof());
    }
}
