//! Fuel-bounded reference interpreter.
//!
//! This is the semantic oracle every pass is differentially tested against.
//! Observables are the termination class plus the values of declared outputs.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ir::{Cond, Instr, Literal, Operand, Program, Type};
use crate::ops::{eval_bin, eval_un, EvalError, FaultKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Scalar(Literal),
    Array(Type, Vec<Literal>),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Scalar(Literal::Int(n))
    }

    pub fn float(x: f64) -> Value {
        Value::Scalar(Literal::float(x))
    }

    pub fn bool(b: bool) -> Value {
        Value::Scalar(Literal::Bool(b))
    }

    pub fn ty(&self) -> Type {
        match self {
            Value::Scalar(l) => l.ty(),
            Value::Array(elem, _) => elem.array_of(),
        }
    }

    /// Zero value for a declaration.
    pub fn default_for(ty: Type, len: Option<usize>) -> Value {
        if ty.is_array() {
            Value::Array(ty.elem(), vec![Literal::zero(ty); len.unwrap_or(0)])
        } else {
            Value::Scalar(Literal::zero(ty))
        }
    }

    fn scalar(&self) -> Literal {
        match self {
            Value::Scalar(l) => *l,
            Value::Array(..) => panic!("array used as scalar in a validated program"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(l) => l.fmt(f),
            Value::Array(_, items) => {
                f.write_str("[")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    x.fmt(f)?;
                }
                f.write_str("]")
            }
        }
    }
}

pub type Inputs = BTreeMap<String, Value>;

/// Machine state: one value per declared variable, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Store {
    pub pc: usize,
    pub values: Vec<Value>,
}

impl Store {
    pub fn get<'a>(&'a self, p: &Program, name: &str) -> Option<&'a Value> {
        p.vars.get_index_of(name).map(|i| &self.values[i])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halted(Vec<(String, Value)>),
    Fault { kind: FaultKind, at: usize },
    OutOfFuel,
}

impl Outcome {
    /// Observational equivalence: fault positions are ignored because passes
    /// renumber instructions.
    pub fn equivalent(&self, other: &Outcome) -> bool {
        match (self, other) {
            (Outcome::Fault { kind: a, .. }, Outcome::Fault { kind: b, .. }) => a == b,
            (a, b) => a == b,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, Outcome::Halted(_))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Halted(outs) => {
                f.write_str("halted")?;
                for (n, v) in outs {
                    write!(f, " {n}={v}")?;
                }
                Ok(())
            }
            Outcome::Fault { kind, at } => write!(f, "fault {kind} at {at}"),
            Outcome::OutOfFuel => f.write_str("out-of-fuel"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("{0}: missing input")]
    Missing(String),
    #[error("{0}: not an input variable")]
    Unexpected(String),
    #[error("{name}: expected {expected:?}")]
    Type { name: String, expected: Type },
    #[error("{name}: expected {expected} elements, found {found}")]
    Length { name: String, expected: usize, found: usize },
}

/// Parses `name=value` against the declaration of `name`. Arrays take a
/// comma-separated list, optionally bracketed; integers are accepted for
/// floats.
pub fn parse_input(p: &Program, text: &str) -> Result<(String, Value), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("`{text}`: expected name=value"))?;
    let name = name.trim();
    let info = p.var(name).ok_or_else(|| format!("{name}: no such variable"))?;
    if !info.input {
        return Err(format!("{name}: not an input variable"));
    }
    let lit = |tok: &str, ty: Type| -> Result<Literal, String> {
        let l = crate::frontend::parse_literal(tok.trim()).ok_or_else(|| format!("{name}: bad literal `{tok}`"))?;
        match (l, ty) {
            (l, t) if l.ty() == t => Ok(l),
            (Literal::Int(n), Type::Float) => Ok(Literal::float(n as f64)),
            _ => Err(format!("{name}: expected {ty}, found `{tok}`")),
        }
    };
    if info.ty.is_array() {
        let body = value.trim().trim_start_matches('[').trim_end_matches(']');
        let items = body
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| lit(t, info.ty.elem()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((name.to_string(), Value::Array(info.ty.elem(), items)))
    } else {
        Ok((name.to_string(), Value::Scalar(lit(value, info.ty)?)))
    }
}

pub fn init_store(p: &Program, inputs: &Inputs) -> Result<Store, InputError> {
    for name in inputs.keys() {
        if !p.var(name).is_some_and(|v| v.input) {
            return Err(InputError::Unexpected(name.clone()));
        }
    }
    let mut values = Vec::with_capacity(p.vars.len());
    for (name, info) in &p.vars {
        if !info.input {
            values.push(Value::default_for(info.ty, info.len));
            continue;
        }
        let v = inputs.get(name).ok_or_else(|| InputError::Missing(name.clone()))?;
        if v.ty() != info.ty {
            return Err(InputError::Type {
                name: name.clone(),
                expected: info.ty,
            });
        }
        if let Value::Array(_, items) = v {
            let expected = info.len.unwrap_or(0);
            if items.len() != expected {
                return Err(InputError::Length {
                    name: name.clone(),
                    expected,
                    found: items.len(),
                });
            }
        }
        values.push(v.clone());
    }
    Ok(Store { pc: 0, values })
}

pub enum Step {
    Running(Store),
    Done(Outcome),
}

/// Executes the instruction at `s.pc`.
pub fn step(p: &Program, s: Store) -> Step {
    let m = Machine::new(p);
    let mut s = s;
    match m.exec(&mut s) {
        Some(o) => Step::Done(o),
        None => Step::Running(s),
    }
}

pub fn run(p: &Program, inputs: &Inputs, fuel: u64) -> Result<Outcome, InputError> {
    let mut s = init_store(p, inputs)?;
    Ok(Machine::new(p).run(&mut s, fuel))
}

#[derive(Clone, Copy)]
enum Slot {
    Var(usize),
    Lit(Literal),
}

enum RCond {
    Slot(Slot),
    Bin(crate::ir::BinOp, Slot, Slot),
    Not(Slot),
}

enum RInstr {
    Copy(usize, Slot),
    Bin(usize, crate::ir::BinOp, Slot, Slot),
    Un(usize, crate::ir::UnOp, Slot),
    Load(usize, usize, Slot),
    Store(usize, Slot, Slot),
    Goto(usize),
    CondGoto(RCond, usize, usize),
    Halt,
    Noop,
}

/// A program with variable names resolved to store slots.
struct Machine<'p> {
    p: &'p Program,
    code: Vec<RInstr>,
    outputs: Vec<(String, usize)>,
}

impl<'p> Machine<'p> {
    fn new(p: &'p Program) -> Machine<'p> {
        let var = |n: &str| p.vars.get_index_of(n).expect("validated program declares every variable");
        let slot = |o: &Operand| match o {
            Operand::Var(n) => Slot::Var(var(n)),
            Operand::Lit(l) => Slot::Lit(*l),
        };
        let code = p
            .instrs
            .iter()
            .map(|ins| match ins {
                Instr::Copy { dst, src } => RInstr::Copy(var(dst), slot(src)),
                Instr::Bin { dst, op, lhs, rhs } => RInstr::Bin(var(dst), *op, slot(lhs), slot(rhs)),
                Instr::Un { dst, op, arg } => RInstr::Un(var(dst), *op, slot(arg)),
                Instr::Load { dst, arr, idx } => RInstr::Load(var(dst), var(arr), slot(idx)),
                Instr::Store { arr, idx, src } => RInstr::Store(var(arr), slot(idx), slot(src)),
                Instr::Goto(t) => RInstr::Goto(*t),
                Instr::CondGoto {
                    cond,
                    then_to,
                    else_to,
                } => {
                    let c = match cond {
                        Cond::Operand(a) => RCond::Slot(slot(a)),
                        Cond::Bin(op, a, b) => RCond::Bin(*op, slot(a), slot(b)),
                        Cond::Not(a) => RCond::Not(slot(a)),
                    };
                    RInstr::CondGoto(c, *then_to, *else_to)
                }
                Instr::Halt => RInstr::Halt,
                Instr::Noop => RInstr::Noop,
            })
            .collect();
        let outputs = p.outputs().map(|n| (n.to_string(), var(n))).collect();
        Machine { p, code, outputs }
    }

    fn run(&self, s: &mut Store, fuel: u64) -> Outcome {
        for _ in 0..fuel {
            if let Some(o) = self.exec(s) {
                return o;
            }
        }
        Outcome::OutOfFuel
    }

    fn read(s: &Store, slot: Slot) -> Literal {
        match slot {
            Slot::Var(i) => s.values[i].scalar(),
            Slot::Lit(l) => l,
        }
    }

    fn index(&self, s: &Store, arr: usize, idx: Slot, at: usize) -> Result<usize, Outcome> {
        let len = match &s.values[arr] {
            Value::Array(_, items) => items.len(),
            Value::Scalar(_) => unreachable!("validated program indexes only arrays"),
        };
        match Self::read(s, idx) {
            Literal::Int(i) if i >= 0 && (i as u64) < len as u64 => Ok(i as usize),
            _ => Err(Outcome::Fault {
                kind: FaultKind::OutOfBounds,
                at,
            }),
        }
    }

    /// Executes one instruction; returns the terminal outcome if execution ended.
    fn exec(&self, s: &mut Store) -> Option<Outcome> {
        let at = s.pc;
        let fault = |e: EvalError| match e {
            EvalError::Fault(kind) => Outcome::Fault { kind, at },
            EvalError::Type => panic!("ill-typed operation at {at} in a validated program"),
        };
        let mut next = at + 1;
        match &self.code[at] {
            RInstr::Copy(d, a) => s.values[*d] = Value::Scalar(Self::read(s, *a)),
            RInstr::Bin(d, op, a, b) => match eval_bin(*op, Self::read(s, *a), Self::read(s, *b)) {
                Ok(v) => s.values[*d] = Value::Scalar(v),
                Err(e) => return Some(fault(e)),
            },
            RInstr::Un(d, op, a) => match eval_un(*op, Self::read(s, *a)) {
                Ok(v) => s.values[*d] = Value::Scalar(v),
                Err(e) => return Some(fault(e)),
            },
            RInstr::Load(d, arr, idx) => {
                let i = match self.index(s, *arr, *idx, at) {
                    Ok(i) => i,
                    Err(o) => return Some(o),
                };
                let v = match &s.values[*arr] {
                    Value::Array(_, items) => items[i],
                    Value::Scalar(_) => unreachable!(),
                };
                s.values[*d] = Value::Scalar(v);
            }
            RInstr::Store(arr, idx, src) => {
                let i = match self.index(s, *arr, *idx, at) {
                    Ok(i) => i,
                    Err(o) => return Some(o),
                };
                let v = Self::read(s, *src);
                if let Value::Array(_, items) = &mut s.values[*arr] {
                    items[i] = v;
                }
            }
            RInstr::Goto(t) => next = *t,
            RInstr::CondGoto(c, t, e) => {
                let v = match c {
                    RCond::Slot(a) => Ok(Self::read(s, *a)),
                    RCond::Bin(op, a, b) => eval_bin(*op, Self::read(s, *a), Self::read(s, *b)),
                    RCond::Not(a) => eval_un(crate::ir::UnOp::Not, Self::read(s, *a)),
                };
                match v {
                    Ok(Literal::Bool(true)) => next = *t,
                    Ok(Literal::Bool(false)) => next = *e,
                    Ok(_) => panic!("non-boolean branch condition at {at}"),
                    Err(e) => return Some(fault(e)),
                }
            }
            RInstr::Halt => {
                let outs = self
                    .outputs
                    .iter()
                    .map(|(n, i)| (n.clone(), s.values[*i].clone()))
                    .collect();
                return Some(Outcome::Halted(outs));
            }
            RInstr::Noop => {}
        }
        debug_assert!(next < self.p.len(), "validated program never falls off the end");
        s.pc = next;
        None
    }
}
