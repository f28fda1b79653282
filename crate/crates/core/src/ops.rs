//! Operator semantics shared by the interpreter, constant folding, and the
//! certificate checker's simplifier. Keeping one definition is what makes the
//! three agree bit for bit.

use crate::ir::{canonical_float, BinOp, Literal, UnOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultKind {
    DivByZero,
    ModByZero,
    OutOfBounds,
}

impl FaultKind {
    pub fn name(self) -> &'static str {
        match self {
            FaultKind::DivByZero => "DivByZero",
            FaultKind::ModByZero => "ModByZero",
            FaultKind::OutOfBounds => "OutOfBounds",
        }
    }
}

impl std::fmt::Display for FaultKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors other than faults mean the operands were ill-typed, which cannot
/// happen on validated programs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalError {
    Fault(FaultKind),
    Type,
}

impl From<FaultKind> for EvalError {
    fn from(k: FaultKind) -> Self {
        EvalError::Fault(k)
    }
}

/// Fault raised by `op` for the given divisor, if any.
pub fn division_fault(op: BinOp, divisor: Literal) -> Option<FaultKind> {
    if !divisor.is_zero() {
        return None;
    }
    match op {
        BinOp::Div => Some(FaultKind::DivByZero),
        BinOp::Mod => Some(FaultKind::ModByZero),
        _ => None,
    }
}

pub fn eval_bin(op: BinOp, a: Literal, b: Literal) -> Result<Literal, EvalError> {
    use Literal::*;
    if let Some(k) = division_fault(op, b) {
        return Err(k.into());
    }
    let out = match (a, b) {
        (Int(x), Int(y)) => match op {
            BinOp::Add => Int(x.wrapping_add(y)),
            BinOp::Sub => Int(x.wrapping_sub(y)),
            BinOp::Mul => Int(x.wrapping_mul(y)),
            BinOp::Div => Int(x.wrapping_div(y)),
            BinOp::Mod => Int(x.wrapping_rem(y)),
            BinOp::Lt => Bool(x < y),
            BinOp::Le => Bool(x <= y),
            BinOp::Gt => Bool(x > y),
            BinOp::Ge => Bool(x >= y),
            BinOp::Eq => Bool(x == y),
            BinOp::Ne => Bool(x != y),
            BinOp::And | BinOp::Or => return Err(EvalError::Type),
        },
        (Float(x), Float(y)) => match op {
            BinOp::Add => Literal::float(x + y),
            BinOp::Sub => Literal::float(x - y),
            BinOp::Mul => Literal::float(x * y),
            BinOp::Div => Literal::float(x / y),
            BinOp::Mod => Literal::float(x % y),
            BinOp::Lt => Bool(x < y),
            BinOp::Le => Bool(x <= y),
            BinOp::Gt => Bool(x > y),
            BinOp::Ge => Bool(x >= y),
            BinOp::Eq => Bool(x == y),
            BinOp::Ne => Bool(x != y),
            BinOp::And | BinOp::Or => return Err(EvalError::Type),
        },
        (Bool(x), Bool(y)) => match op {
            BinOp::And => Bool(x && y),
            BinOp::Or => Bool(x || y),
            BinOp::Eq => Bool(x == y),
            BinOp::Ne => Bool(x != y),
            _ => return Err(EvalError::Type),
        },
        _ => return Err(EvalError::Type),
    };
    Ok(out)
}

pub fn eval_un(op: UnOp, a: Literal) -> Result<Literal, EvalError> {
    match (op, a) {
        (UnOp::Neg, Literal::Int(x)) => Ok(Literal::Int(x.wrapping_neg())),
        (UnOp::Neg, Literal::Float(x)) => Ok(Literal::float(-x)),
        (UnOp::Not, Literal::Bool(b)) => Ok(Literal::Bool(!b)),
        // `as` rounds to nearest, ties to even.
        (UnOp::IntToFloat, Literal::Int(x)) => Ok(Literal::float(x as f64)),
        _ => Err(EvalError::Type),
    }
}

/// Float results are canonicalized so NaN payloads never leak into values.
pub fn canon(l: Literal) -> Literal {
    match l {
        Literal::Float(x) => Literal::Float(canonical_float(x)),
        other => other,
    }
}
