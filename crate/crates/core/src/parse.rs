//! Parser for the program file format: parenthesized prefix notation with
//! `;` line comments.
//!
//! ```text
//! program  := "(" "program" state step output ")"
//! state    := "(" "state"  binding+ ")"     binding := "(" ident scalar ")"
//! step     := "(" "step"   assign+ ")"      assign  := "(" ident expr ")"
//! output   := "(" "output" expr ")"
//! expr     := scalar | "elem" | ident
//!           | "(" ("+"|"-"|"*"|"min"|"max") expr expr ")"
//!           | "(" "if" bexpr expr expr ")"
//! bexpr    := "(" ("="|"!="|"<"|"<="|">"|">=") expr expr ")"
//!           | "(" "and" bexpr bexpr ")" | "(" "or" bexpr bexpr ")"
//!           | "(" "not" bexpr ")"
//! scalar   := integer | "-inf" | "+inf" | "eof"
//! ```
//!
//! `elem` is the current input element; other identifiers name state
//! fields. Step assignments may appear in any order but must cover every
//! state field exactly once; they are stored in state declaration order.

use crate::expr::{BinOp, BoolExpr, CmpOp, Expr};
use crate::program::{validate_program, Program};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GspError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("invalid program: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

impl Pos {
    fn err(self, message: impl Into<String>) -> GspError {
        GspError::Syntax { line: self.line, col: self.col, message: message.into() }
    }
}

#[derive(Debug)]
enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

struct Tokenizer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    at: usize,
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Token {
    LParen(Pos),
    RParen(Pos),
    Atom(String, Pos),
}

impl<'a> Tokenizer<'a> {
    fn new(src: &'a str) -> Self {
        Tokenizer { src, bytes: src.as_bytes(), at: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) {
        if self.bytes[self.at] == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.at += 1;
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn next(&mut self) -> Result<Option<Token>, GspError> {
        loop {
            match self.bytes.get(self.at) {
                None => return Ok(None),
                Some(b) if b.is_ascii_whitespace() => self.bump(),
                Some(b';') => {
                    while self.at < self.bytes.len() && self.bytes[self.at] != b'\n' {
                        self.bump();
                    }
                }
                Some(b'(') => {
                    let p = self.pos();
                    self.bump();
                    return Ok(Some(Token::LParen(p)));
                }
                Some(b')') => {
                    let p = self.pos();
                    self.bump();
                    return Ok(Some(Token::RParen(p)));
                }
                Some(_) => {
                    let p = self.pos();
                    let start = self.at;
                    while let Some(&b) = self.bytes.get(self.at) {
                        if b.is_ascii_whitespace() || b == b'(' || b == b')' || b == b';' {
                            break;
                        }
                        self.bump();
                    }
                    let text = &self.src[start..self.at];
                    return Ok(Some(Token::Atom(text.to_string(), p)));
                }
            }
        }
    }
}

// Deep enough for any sane program, shallow enough to fail before the
// stack does on adversarial input.
const MAX_NESTING: usize = 200;

fn read_sexpr_from(tok: &mut Tokenizer<'_>, first: Token, depth: usize) -> Result<SExpr, GspError> {
    match first {
        Token::Atom(a, p) => Ok(SExpr::Atom(a, p)),
        Token::RParen(p) => Err(p.err("unexpected )")),
        Token::LParen(p) => {
            if depth >= MAX_NESTING {
                return Err(p.err("nesting too deep"));
            }
            let mut items = Vec::new();
            loop {
                match tok.next()? {
                    None => return Err(tok.pos().err("unclosed (")),
                    Some(Token::RParen(_)) => return Ok(SExpr::List(items, p)),
                    Some(t) => items.push(read_sexpr_from(tok, t, depth + 1)?),
                }
            }
        }
    }
}

fn read_single(src: &str) -> Result<SExpr, GspError> {
    let mut tok = Tokenizer::new(src);
    let first = tok.next()?.ok_or_else(|| tok.pos().err("empty input"))?;
    let sexpr = read_sexpr_from(&mut tok, first, 0)?;
    if let Some(extra) = tok.next()? {
        let p = match extra {
            Token::LParen(p) | Token::RParen(p) => p,
            Token::Atom(_, p) => p,
        };
        return Err(p.err("trailing input after expression"));
    }
    Ok(sexpr)
}

fn parse_scalar_atom(a: &str) -> Option<Scalar> {
    // "inf" alone is accepted by Scalar::from_str for convenience on the
    // command line; program files must spell "+inf".
    match a {
        "-inf" => Some(Scalar::NegInf),
        "+inf" => Some(Scalar::PosInf),
        "eof" => Some(Scalar::Eof),
        _ => a.parse::<i64>().ok().map(Scalar::Int),
    }
}

fn is_reserved(a: &str) -> bool {
    matches!(
        a,
        "program" | "state" | "step" | "output" | "elem" | "if" | "and" | "or" | "not"
            | "min" | "max"
    ) || parse_scalar_atom(a).is_some()
}

/// Field-name context used while parsing expressions.
struct Fields<'a> {
    names: &'a [String],
    // When false, identifiers other than elem are rejected; prefix
    // conditions use this to stay state-free.
    allow_fields: bool,
}

impl Fields<'_> {
    fn resolve(&self, name: &str, pos: Pos) -> Result<Expr, GspError> {
        if name == "elem" {
            return Ok(Expr::CurrentInput);
        }
        if !self.allow_fields {
            return Err(pos.err(format!("only elem may appear here, found {name:?}")));
        }
        match self.names.iter().position(|n| n == name) {
            Some(i) => Ok(Expr::StateField(i)),
            None => Err(pos.err(format!("unknown identifier {name:?}"))),
        }
    }
}

fn parse_expr(s: &SExpr, fields: &Fields<'_>) -> Result<Expr, GspError> {
    match s {
        SExpr::Atom(a, p) => match parse_scalar_atom(a) {
            Some(v) => Ok(Expr::Const(v)),
            None => fields.resolve(a, *p),
        },
        SExpr::List(items, p) => {
            let head = match items.first() {
                Some(SExpr::Atom(a, _)) => a.as_str(),
                _ => return Err(p.err("expected an operator after (")),
            };
            let binop = match head {
                "+" => Some(BinOp::Add),
                "-" => Some(BinOp::Sub),
                "*" => Some(BinOp::Mul),
                "min" => Some(BinOp::Min),
                "max" => Some(BinOp::Max),
                _ => None,
            };
            if let Some(op) = binop {
                if items.len() != 3 {
                    return Err(p.err(format!("{head} takes exactly 2 arguments")));
                }
                let a = parse_expr(&items[1], fields)?;
                let b = parse_expr(&items[2], fields)?;
                return Ok(Expr::BinOp(op, Box::new(a), Box::new(b)));
            }
            if head == "if" {
                if items.len() != 4 {
                    return Err(p.err("if takes a condition and 2 branches"));
                }
                let c = parse_bexpr(&items[1], fields)?;
                let t = parse_expr(&items[2], fields)?;
                let f = parse_expr(&items[3], fields)?;
                return Ok(Expr::If(Box::new(c), Box::new(t), Box::new(f)));
            }
            Err(p.err(format!("unknown operator {head:?}")))
        }
    }
}

fn parse_bexpr(s: &SExpr, fields: &Fields<'_>) -> Result<BoolExpr, GspError> {
    let (items, p) = match s {
        SExpr::List(items, p) => (items, *p),
        SExpr::Atom(a, p) => return Err(p.err(format!("expected a condition, found {a:?}"))),
    };
    let head = match items.first() {
        Some(SExpr::Atom(a, _)) => a.as_str(),
        _ => return Err(p.err("expected a comparison or connective after (")),
    };
    let cmp = match head {
        "=" => Some(CmpOp::Eq),
        "!=" => Some(CmpOp::Ne),
        "<" => Some(CmpOp::Lt),
        "<=" => Some(CmpOp::Le),
        ">" => Some(CmpOp::Gt),
        ">=" => Some(CmpOp::Ge),
        _ => None,
    };
    if let Some(op) = cmp {
        if items.len() != 3 {
            return Err(p.err(format!("{head} takes exactly 2 arguments")));
        }
        let a = parse_expr(&items[1], fields)?;
        let b = parse_expr(&items[2], fields)?;
        return Ok(BoolExpr::Cmp(op, Box::new(a), Box::new(b)));
    }
    match head {
        "and" | "or" => {
            if items.len() != 3 {
                return Err(p.err(format!("{head} takes exactly 2 arguments")));
            }
            let a = Box::new(parse_bexpr(&items[1], fields)?);
            let b = Box::new(parse_bexpr(&items[2], fields)?);
            Ok(if head == "and" { BoolExpr::And(a, b) } else { BoolExpr::Or(a, b) })
        }
        "not" => {
            if items.len() != 2 {
                return Err(p.err("not takes exactly 1 argument"));
            }
            Ok(BoolExpr::Not(Box::new(parse_bexpr(&items[1], fields)?)))
        }
        _ => Err(p.err(format!("unknown condition operator {head:?}"))),
    }
}

fn expect_list<'s>(s: &'s SExpr, tag: &str) -> Result<(&'s [SExpr], Pos), GspError> {
    match s {
        SExpr::List(items, p) => match items.first() {
            Some(SExpr::Atom(a, _)) if a == tag => Ok((&items[1..], *p)),
            _ => Err(s.pos().err(format!("expected ({tag} ...)"))),
        },
        SExpr::Atom(_, p) => Err(p.err(format!("expected ({tag} ...)"))),
    }
}

/// Parses and validates a program. The returned program has an empty
/// name; callers label it from the file name or benchmark entry.
pub fn parse_program(text: &str) -> Result<Program, GspError> {
    let top = read_single(text)?;
    let (parts, p) = expect_list(&top, "program")?;
    if parts.len() != 3 {
        return Err(p.err("program takes (state ...) (step ...) (output ...)"));
    }

    let (bindings, sp) = expect_list(&parts[0], "state")?;
    if bindings.is_empty() {
        return Err(sp.err("state needs at least one binding"));
    }
    let mut field_names: Vec<String> = Vec::new();
    let mut init: Vec<Scalar> = Vec::new();
    for b in bindings {
        let (items, bp) = match b {
            SExpr::List(items, bp) => (items, *bp),
            SExpr::Atom(_, bp) => return Err(bp.err("expected (ident scalar)")),
        };
        if items.len() != 2 {
            return Err(bp.err("expected (ident scalar)"));
        }
        let name = match &items[0] {
            SExpr::Atom(a, ap) => {
                if is_reserved(a) {
                    return Err(ap.err(format!("{a:?} cannot name a state field")));
                }
                a.clone()
            }
            SExpr::List(_, ap) => return Err(ap.err("expected an identifier")),
        };
        if field_names.contains(&name) {
            return Err(bp.err(format!("duplicate state field {name:?}")));
        }
        let value = match &items[1] {
            SExpr::Atom(a, ap) => {
                parse_scalar_atom(a).ok_or_else(|| ap.err(format!("expected a scalar, found {a:?}")))?
            }
            SExpr::List(_, ap) => return Err(ap.err("initial values must be scalars")),
        };
        field_names.push(name);
        init.push(value);
    }

    let fields = Fields { names: &field_names, allow_fields: true };

    let (assigns, tp) = expect_list(&parts[1], "step")?;
    let mut step: Vec<Option<Expr>> = vec![None; field_names.len()];
    for a in assigns {
        let (items, ap) = match a {
            SExpr::List(items, ap) => (items, *ap),
            SExpr::Atom(_, ap) => return Err(ap.err("expected (ident expr)")),
        };
        if items.len() != 2 {
            return Err(ap.err("expected (ident expr)"));
        }
        let name = match &items[0] {
            SExpr::Atom(n, _) => n.as_str(),
            SExpr::List(_, np) => return Err(np.err("expected an identifier")),
        };
        let idx = field_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| ap.err(format!("step assigns unknown field {name:?}")))?;
        if step[idx].is_some() {
            return Err(ap.err(format!("step assigns {name:?} twice")));
        }
        step[idx] = Some(parse_expr(&items[1], &fields)?);
    }
    let mut step_exprs = Vec::with_capacity(step.len());
    for (i, s) in step.into_iter().enumerate() {
        match s {
            Some(e) => step_exprs.push(e),
            None => return Err(tp.err(format!("step never assigns {:?}", field_names[i]))),
        }
    }

    let (out_items, op) = expect_list(&parts[2], "output")?;
    if out_items.len() != 1 {
        return Err(op.err("output takes exactly one expression"));
    }
    let output = parse_expr(&out_items[0], &fields)?;

    let program = Program { name: String::new(), field_names, init, step: step_exprs, output };
    let violations = validate_program(&program);
    if !violations.is_empty() {
        return Err(GspError::Invalid(violations));
    }
    Ok(program)
}

/// Parses a bare condition over `elem`, as given to `--prefix-cond`.
pub fn parse_elem_condition(text: &str) -> Result<BoolExpr, GspError> {
    let sexpr = read_single(text)?;
    let fields = Fields { names: &[], allow_fields: false };
    parse_bexpr(&sexpr, &fields)
}
