//! Extended integer scalars: finite 64-bit integers, the two infinities,
//! and an end-of-input sentinel.
//!
//! The infinities saturate arithmetic (`+inf + x = +inf`), but forms with
//! no consistent value (`+inf + -inf`, `inf - inf`, `0 * inf`) are
//! evaluation errors, as is overflow on finite values. `eof` takes part
//! only in equality tests; ordering it, or using it in arithmetic or
//! min/max, is an error.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A run-time failure while evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("indeterminate form {0}")]
    Indeterminate(&'static str),
    #[error("Eof is unordered, {0} needs ordered operands")]
    EofUnordered(&'static str),
    #[error("Eof is not numeric, {0} needs numeric operands")]
    EofArithmetic(&'static str),
}

/// A value flowing through a program: element, state field, or output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(i64),
    NegInf,
    PosInf,
    Eof,
}

impl Scalar {
    pub fn is_eof(self) -> bool {
        self == Scalar::Eof
    }

    /// Total order on `{-inf} < Int < {+inf}`; `Eof` has no place in it.
    pub fn checked_cmp(self, other: Scalar, op: &'static str) -> Result<Ordering, EvalError> {
        use Scalar::*;
        match (self, other) {
            (Eof, _) | (_, Eof) => Err(EvalError::EofUnordered(op)),
            (Int(a), Int(b)) => Ok(a.cmp(&b)),
            (NegInf, NegInf) | (PosInf, PosInf) => Ok(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Ok(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Ok(Ordering::Greater),
        }
    }

    pub fn add(self, other: Scalar) -> Result<Scalar, EvalError> {
        use Scalar::*;
        match (self, other) {
            (Eof, _) | (_, Eof) => Err(EvalError::EofArithmetic("+")),
            (Int(a), Int(b)) => a.checked_add(b).map(Int).ok_or(EvalError::Overflow("+")),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(EvalError::Indeterminate("+inf + -inf")),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn sub(self, other: Scalar) -> Result<Scalar, EvalError> {
        use Scalar::*;
        match (self, other) {
            (Eof, _) | (_, Eof) => Err(EvalError::EofArithmetic("-")),
            (Int(a), Int(b)) => a.checked_sub(b).map(Int).ok_or(EvalError::Overflow("-")),
            (PosInf, PosInf) | (NegInf, NegInf) => Err(EvalError::Indeterminate("inf - inf")),
            (PosInf, _) | (_, NegInf) => Ok(PosInf),
            (NegInf, _) | (_, PosInf) => Ok(NegInf),
        }
    }

    pub fn mul(self, other: Scalar) -> Result<Scalar, EvalError> {
        use Scalar::*;
        match (self, other) {
            (Eof, _) | (_, Eof) => Err(EvalError::EofArithmetic("*")),
            (Int(a), Int(b)) => a.checked_mul(b).map(Int).ok_or(EvalError::Overflow("*")),
            (a, b) => {
                // At least one infinity; the result follows the sign rules
                // and a zero factor has no consistent product.
                let (sa, sb) = (a.sign(), b.sign());
                if sa == 0 || sb == 0 {
                    Err(EvalError::Indeterminate("0 * inf"))
                } else if sa == sb {
                    Ok(PosInf)
                } else {
                    Ok(NegInf)
                }
            }
        }
    }

    pub fn min(self, other: Scalar) -> Result<Scalar, EvalError> {
        match self.checked_cmp(other, "min")? {
            Ordering::Greater => Ok(other),
            _ => Ok(self),
        }
    }

    pub fn max(self, other: Scalar) -> Result<Scalar, EvalError> {
        match self.checked_cmp(other, "max")? {
            Ordering::Less => Ok(other),
            _ => Ok(self),
        }
    }

    fn sign(self) -> i8 {
        match self {
            Scalar::Int(v) => v.signum() as i8,
            Scalar::PosInf => 1,
            Scalar::NegInf => -1,
            Scalar::Eof => unreachable!("Eof has no sign"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::NegInf => write!(f, "-inf"),
            Scalar::PosInf => write!(f, "+inf"),
            Scalar::Eof => write!(f, "eof"),
        }
    }
}

impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-inf" => Ok(Scalar::NegInf),
            "+inf" | "inf" => Ok(Scalar::PosInf),
            "eof" => Ok(Scalar::Eof),
            _ => s
                .parse::<i64>()
                .map(Scalar::Int)
                .map_err(|_| format!("not a scalar: {s:?}")),
        }
    }
}
