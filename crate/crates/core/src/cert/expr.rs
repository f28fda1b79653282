//! Symbolic values used by the checker and their simplifier.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::ir::{BinOp, Literal, Type, UnOp};
use crate::ops::{eval_bin, eval_un};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Lit(Literal),
    /// An unknown value; equal symbols denote equal values.
    Sym(u32),
    Bin(BinOp, Rc<Expr>, Rc<Expr>),
    Un(UnOp, Rc<Expr>),
    /// An array of the given type with every element zero.
    Zeros(Type),
    Load(Rc<Expr>, Rc<Expr>),
    /// `arr` with element `idx` replaced by `val`.
    Store(Rc<Expr>, Rc<Expr>, Rc<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Rc::new(a), Rc::new(b))
    }

    pub fn un(op: UnOp, a: Expr) -> Expr {
        Expr::Un(op, Rc::new(a))
    }

    pub fn load(arr: Expr, idx: Expr) -> Expr {
        Expr::Load(Rc::new(arr), Rc::new(idx))
    }

    pub fn store(arr: Expr, idx: Expr, val: Expr) -> Expr {
        Expr::Store(Rc::new(arr), Rc::new(idx), Rc::new(val))
    }

    pub fn as_lit(&self) -> Option<Literal> {
        match self {
            Expr::Lit(l) => Some(*l),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        self.as_lit().and_then(Literal::as_bool)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(l) => write!(f, "{l}"),
            Expr::Sym(k) => write!(f, "${k}"),
            Expr::Bin(op, a, b) => write!(f, "({a} {op} {b})"),
            Expr::Un(op, a) => write!(f, "({} {a})", op.keyword()),
            Expr::Zeros(t) => write!(f, "zeros<{t}>"),
            Expr::Load(a, i) => write!(f, "{a}[{i}]"),
            Expr::Store(a, i, v) => write!(f, "{a}{{{i} <- {v}}}"),
        }
    }
}

/// Boolean facts assumed on the current path, keyed by simplified expression.
#[derive(Clone, Debug, Default)]
pub struct Assumptions {
    facts: HashMap<Expr, bool>,
    /// Folds division by a literal zero to zero instead of leaving it
    /// symbolic. Deliberately unsound; only the fault-guard-free checker mode
    /// used as a fuzzing canary turns it on.
    pub(crate) zero_division_folds: bool,
}

impl Assumptions {
    pub fn new() -> Assumptions {
        Assumptions::default()
    }

    pub fn lookup(&self, e: &Expr) -> Option<bool> {
        self.facts.get(e).copied()
    }

    /// Records that the simplified condition `e` has value `b`, together with
    /// what follows directly through `not`, `and` and `or`.
    pub fn assume(&mut self, e: &Expr, b: bool) {
        if e.as_lit().is_some() {
            return;
        }
        self.facts.insert(e.clone(), b);
        match e {
            Expr::Un(UnOp::Not, x) => self.assume(x, !b),
            Expr::Bin(BinOp::And, x, y) if b => {
                self.assume(x, true);
                self.assume(y, true);
            }
            Expr::Bin(BinOp::Or, x, y) if !b => {
                self.assume(x, false);
                self.assume(y, false);
            }
            _ => {}
        }
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

/// Normal form of `e` under `asm`. Idempotent.
pub fn simplify(e: &Expr, asm: &Assumptions) -> Expr {
    let out = match e {
        Expr::Lit(_) | Expr::Sym(_) | Expr::Zeros(_) => e.clone(),
        Expr::Bin(op, a, b) => simplify_bin(*op, simplify(a, asm), simplify(b, asm), asm),
        Expr::Un(op, a) => simplify_un(*op, simplify(a, asm)),
        Expr::Load(a, i) => simplify_load(simplify(a, asm), simplify(i, asm)),
        Expr::Store(a, i, v) => Expr::store(simplify(a, asm), simplify(i, asm), simplify(v, asm)),
    };
    match asm.lookup(&out) {
        Some(b) => Expr::Lit(Literal::Bool(b)),
        None => out,
    }
}

fn simplify_bin(op: BinOp, a: Expr, b: Expr, asm: &Assumptions) -> Expr {
    if let (Some(x), Some(y)) = (a.as_lit(), b.as_lit()) {
        // Faulting operations stay symbolic; the fault is tracked separately.
        if let Ok(v) = eval_bin(op, x, y) {
            return Expr::Lit(v);
        }
    }
    if asm.zero_division_folds && op.is_division() {
        if let Some(y) = b.as_lit().filter(|y| y.is_zero()) {
            return Expr::Lit(Literal::zero(y.ty()));
        }
    }
    match op {
        BinOp::And => match (a.as_bool(), b.as_bool()) {
            (Some(false), _) | (_, Some(false)) => return Expr::Lit(Literal::Bool(false)),
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        },
        BinOp::Or => match (a.as_bool(), b.as_bool()) {
            (Some(true), _) | (_, Some(true)) => return Expr::Lit(Literal::Bool(true)),
            (Some(false), _) => return b,
            (_, Some(false)) => return a,
            _ => {}
        },
        _ => {}
    }
    if op.is_commutative() && b < a {
        Expr::bin(op, b, a)
    } else {
        Expr::bin(op, a, b)
    }
}

fn simplify_un(op: UnOp, a: Expr) -> Expr {
    if let Some(x) = a.as_lit() {
        if let Ok(v) = eval_un(op, x) {
            return Expr::Lit(v);
        }
    }
    match (op, &a) {
        (UnOp::Not, Expr::Un(UnOp::Not, x)) | (UnOp::Neg, Expr::Un(UnOp::Neg, x)) => (**x).clone(),
        _ => Expr::un(op, a),
    }
}

fn simplify_load(arr: Expr, idx: Expr) -> Expr {
    match &arr {
        Expr::Zeros(t) => Expr::Lit(Literal::zero(t.elem())),
        Expr::Store(inner, j, v) => {
            if **j == idx {
                (**v).clone()
            } else if j.as_lit().is_some() && idx.as_lit().is_some() {
                simplify_load((**inner).clone(), idx)
            } else {
                Expr::load(arr, idx)
            }
        }
        _ => Expr::load(arr, idx),
    }
}
