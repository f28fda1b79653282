//! Three-address-code program representation.
//!
//! A [`Program`] is a flat, indexed instruction sequence with entry at index 0.
//! Every instruction either falls through to the next index, branches, or halts;
//! falling off the end of the sequence is a validation error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use arrayvec::ArrayVec;
use indexmap::IndexMap;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Float,
    Bool,
    ArrInt,
    ArrFloat,
    ArrBool,
}

impl Type {
    pub fn is_array(self) -> bool {
        matches!(self, Type::ArrInt | Type::ArrFloat | Type::ArrBool)
    }

    /// Element type of an array tag; scalars map to themselves.
    pub fn elem(self) -> Type {
        match self {
            Type::ArrInt => Type::Int,
            Type::ArrFloat => Type::Float,
            Type::ArrBool => Type::Bool,
            t => t,
        }
    }

    pub fn array_of(self) -> Type {
        match self {
            Type::Int => Type::ArrInt,
            Type::Float => Type::ArrFloat,
            Type::Bool => Type::ArrBool,
            t => t,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Type::Int | Type::Float)
    }

    /// Keyword of the element type (`int`, `float`, `bool`).
    pub fn keyword(self) -> &'static str {
        match self.elem() {
            Type::Int => "int",
            Type::Float => "float",
            _ => "bool",
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_array() {
            write!(f, "{}[]", self.keyword())
        } else {
            f.write_str(self.keyword())
        }
    }
}

/// A scalar constant.
///
/// Floats compare by bit pattern and every NaN is canonicalized on
/// construction, so literals have total equality and ordering.
#[derive(Clone, Copy, Debug)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
}

pub fn canonical_float(x: f64) -> f64 {
    if x.is_nan() {
        f64::NAN
    } else {
        x
    }
}

impl Literal {
    pub fn float(x: f64) -> Literal {
        Literal::Float(canonical_float(x))
    }

    pub fn ty(self) -> Type {
        match self {
            Literal::Int(_) => Type::Int,
            Literal::Float(_) => Type::Float,
            Literal::Bool(_) => Type::Bool,
        }
    }

    /// Default value of a scalar type (0, 0.0, false).
    pub fn zero(ty: Type) -> Literal {
        match ty.elem() {
            Type::Int => Literal::Int(0),
            Type::Float => Literal::Float(0.0),
            _ => Literal::Bool(false),
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Literal::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Literal::Int(n) => n == 0,
            Literal::Float(x) => x == 0.0,
            Literal::Bool(_) => false,
        }
    }

    fn key(self) -> (u8, u64) {
        match self {
            Literal::Int(n) => (0, n as u64),
            Literal::Float(x) => (1, canonical_float(x).to_bits()),
            Literal::Bool(b) => (2, b as u64),
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Literal {}

impl std::hash::Hash for Literal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Literal::Int(a), Literal::Int(b)) => a.cmp(b),
            _ => self.key().cmp(&other.key()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            // Debug is the shortest representation that parses back to the same bits.
            Literal::Float(x) => write!(f, "{:?}", canonical_float(*x)),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Var(String),
    Lit(Literal),
}

impl Operand {
    pub fn var(name: impl Into<String>) -> Operand {
        Operand::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Operand::Var(v) => Some(v),
            Operand::Lit(_) => None,
        }
    }

    pub fn as_lit(&self) -> Option<Literal> {
        match self {
            Operand::Lit(l) => Some(*l),
            Operand::Var(_) => None,
        }
    }
}

impl From<Literal> for Operand {
    fn from(l: Literal) -> Self {
        Operand::Lit(l)
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => f.write_str(v),
            Operand::Lit(l) => l.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 13] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod)
    }

    pub fn is_order(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_equality(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logic(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    pub fn is_division(self) -> bool {
        matches!(self, BinOp::Div | BinOp::Mod)
    }

    /// Operators whose operands may be swapped without changing the result
    /// under wrapping integer and IEEE float semantics.
    pub fn is_commutative(self) -> bool {
        matches!(
            self,
            BinOp::Add | BinOp::Mul | BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or
        )
    }

    /// Whether the operator yields a boolean.
    pub fn is_predicate(self) -> bool {
        self.is_order() || self.is_equality() || self.is_logic()
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    Neg,
    Not,
    IntToFloat,
}

impl UnOp {
    pub fn keyword(self) -> &'static str {
        match self {
            UnOp::Neg => "neg",
            UnOp::Not => "not",
            UnOp::IntToFloat => "itof",
        }
    }

    pub fn from_keyword(s: &str) -> Option<UnOp> {
        match s {
            "neg" => Some(UnOp::Neg),
            "not" => Some(UnOp::Not),
            "itof" => Some(UnOp::IntToFloat),
            _ => None,
        }
    }
}

/// Condition of a conditional branch: a boolean operand, a predicate over two
/// operands, or the negation of an operand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    Operand(Operand),
    Bin(BinOp, Operand, Operand),
    Not(Operand),
}

impl Cond {
    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            Cond::Operand(a) | Cond::Not(a) => vec![a],
            Cond::Bin(_, a, b) => vec![a, b],
        }
    }

    pub fn operands_mut(&mut self) -> Vec<&mut Operand> {
        match self {
            Cond::Operand(a) | Cond::Not(a) => vec![a],
            Cond::Bin(_, a, b) => vec![a, b],
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Operand(a) => write!(f, "{a}"),
            Cond::Bin(op, a, b) => write!(f, "{a} {op} {b}"),
            Cond::Not(a) => write!(f, "not {a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Copy {
        dst: String,
        src: Operand,
    },
    Bin {
        dst: String,
        op: BinOp,
        lhs: Operand,
        rhs: Operand,
    },
    Un {
        dst: String,
        op: UnOp,
        arg: Operand,
    },
    Load {
        dst: String,
        arr: String,
        idx: Operand,
    },
    Store {
        arr: String,
        idx: Operand,
        src: Operand,
    },
    Goto(usize),
    CondGoto {
        cond: Cond,
        then_to: usize,
        else_to: usize,
    },
    Halt,
    Noop,
}

impl Instr {
    /// Scalar variable written by the instruction, if any.
    pub fn dst(&self) -> Option<&str> {
        match self {
            Instr::Copy { dst, .. }
            | Instr::Bin { dst, .. }
            | Instr::Un { dst, .. }
            | Instr::Load { dst, .. } => Some(dst),
            _ => None,
        }
    }

    pub fn is_branch(&self) -> bool {
        matches!(self, Instr::Goto(_) | Instr::CondGoto { .. })
    }

    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            Instr::Copy { src, .. } => vec![src],
            Instr::Bin { lhs, rhs, .. } => vec![lhs, rhs],
            Instr::Un { arg, .. } => vec![arg],
            Instr::Load { idx, .. } => vec![idx],
            Instr::Store { idx, src, .. } => vec![idx, src],
            Instr::CondGoto { cond, .. } => cond.operands(),
            Instr::Goto(_) | Instr::Halt | Instr::Noop => vec![],
        }
    }

    pub fn operands_mut(&mut self) -> Vec<&mut Operand> {
        match self {
            Instr::Copy { src, .. } => vec![src],
            Instr::Bin { lhs, rhs, .. } => vec![lhs, rhs],
            Instr::Un { arg, .. } => vec![arg],
            Instr::Load { idx, .. } => vec![idx],
            Instr::Store { idx, src, .. } => vec![idx, src],
            Instr::CondGoto { cond, .. } => cond.operands_mut(),
            Instr::Goto(_) | Instr::Halt | Instr::Noop => vec![],
        }
    }

    /// Explicit branch targets (not the fall-through successor).
    pub fn targets(&self) -> ArrayVec<usize, 2> {
        let mut out = ArrayVec::new();
        match *self {
            Instr::Goto(t) => out.push(t),
            Instr::CondGoto {
                then_to, else_to, ..
            } => {
                out.push(then_to);
                out.push(else_to);
            }
            _ => {}
        }
        out
    }

    /// Rewrites every branch target through `f`.
    pub fn map_targets(&self, mut f: impl FnMut(usize) -> usize) -> Instr {
        match self {
            Instr::Goto(t) => Instr::Goto(f(*t)),
            Instr::CondGoto {
                cond,
                then_to,
                else_to,
            } => Instr::CondGoto {
                cond: cond.clone(),
                then_to: f(*then_to),
                else_to: f(*else_to),
            },
            other => other.clone(),
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Copy { dst, src } => write!(f, "{dst} := {src}"),
            Instr::Bin { dst, op, lhs, rhs } => write!(f, "{dst} := {lhs} {op} {rhs}"),
            Instr::Un { dst, op, arg } => write!(f, "{dst} := {} {arg}", op.keyword()),
            Instr::Load { dst, arr, idx } => write!(f, "{dst} := {arr}[{idx}]"),
            Instr::Store { arr, idx, src } => write!(f, "{arr}[{idx}] := {src}"),
            Instr::Goto(t) => write!(f, "goto {t}"),
            Instr::CondGoto {
                cond,
                then_to,
                else_to,
            } => write!(f, "if {cond} goto {then_to} else {else_to}"),
            Instr::Halt => f.write_str("halt"),
            Instr::Noop => f.write_str("noop"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub ty: Type,
    /// Element count; present exactly for array types.
    pub len: Option<usize>,
    pub input: bool,
    pub output: bool,
}

impl VarInfo {
    pub fn scalar(ty: Type) -> VarInfo {
        VarInfo {
            ty,
            len: None,
            input: false,
            output: false,
        }
    }

    pub fn array(elem: Type, len: usize) -> VarInfo {
        VarInfo {
            ty: elem.array_of(),
            len: Some(len),
            input: false,
            output: false,
        }
    }

    pub fn input(mut self) -> VarInfo {
        self.input = true;
        self
    }

    pub fn output(mut self) -> VarInfo {
        self.output = true;
        self
    }
}

/// A three-address-code program. Declarations keep their insertion order,
/// which also fixes the order of outputs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Program {
    pub vars: IndexMap<String, VarInfo>,
    pub instrs: Vec<Instr>,
}

impl Program {
    pub fn new(vars: IndexMap<String, VarInfo>, instrs: Vec<Instr>) -> Program {
        Program { vars, instrs }
    }

    /// Instruction count.
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn var(&self, name: &str) -> Option<&VarInfo> {
        self.vars.get(name)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &str> {
        self.vars
            .iter()
            .filter(|(_, v)| v.output)
            .map(|(n, _)| n.as_str())
    }

    pub fn inputs(&self) -> impl Iterator<Item = (&str, &VarInfo)> {
        self.vars
            .iter()
            .filter(|(_, v)| v.input)
            .map(|(n, v)| (n.as_str(), v))
    }

    pub fn operand_type(&self, op: &Operand) -> Option<Type> {
        match op {
            Operand::Var(v) => self.vars.get(v).map(|i| i.ty),
            Operand::Lit(l) => Some(l.ty()),
        }
    }

    /// Control-flow successors of instruction `i`. A conditional branch whose
    /// arms coincide has a single successor.
    pub fn successors(&self, i: usize) -> ArrayVec<usize, 2> {
        let mut out = ArrayVec::new();
        match self.instrs[i] {
            Instr::Goto(t) => out.push(t),
            Instr::CondGoto {
                then_to, else_to, ..
            } => {
                out.push(then_to);
                if else_to != then_to {
                    out.push(else_to);
                }
            }
            Instr::Halt => {}
            _ => out.push(i + 1),
        }
        out
    }

    /// Predecessor lists for every instruction.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.len()];
        for i in 0..self.len() {
            for s in self.successors(i) {
                if s < self.len() {
                    preds[s].push(i);
                }
            }
        }
        preds
    }
}

/// Variables defined and used by one instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefUse<'a> {
    pub def: Option<&'a str>,
    pub uses: BTreeSet<&'a str>,
    pub array_written: Option<&'a str>,
}

pub fn defs_uses(ins: &Instr) -> DefUse<'_> {
    let mut uses: BTreeSet<&str> = ins.operands().into_iter().filter_map(Operand::as_var).collect();
    let mut array_written = None;
    match ins {
        Instr::Load { arr, .. } => {
            uses.insert(arr);
        }
        Instr::Store { arr, .. } => array_written = Some(arr.as_str()),
        _ => {}
    }
    DefUse {
        def: ins.dst(),
        uses,
        array_written,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub at: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.at {
            Some(i) => write!(f, "instr {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks every structural and typing invariant; the result is empty iff the
/// program is well formed.
pub fn validate(p: &Program) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut global = |message: String| out.push(Violation { at: None, message });
    if p.instrs.is_empty() {
        global("program has no instructions".into());
    }
    for (name, info) in &p.vars {
        if info.ty.is_array() != info.len.is_some() {
            global(format!("decl {name}: array length present iff array type"));
        }
        if info.len == Some(0) {
            global(format!("decl {name}: array length must be positive"));
        }
        if name.is_empty() {
            global("empty variable name".into());
        }
    }
    let n = p.len();
    for (i, ins) in p.instrs.iter().enumerate() {
        let mut err = |message: String| out.push(Violation { at: Some(i), message });
        for t in ins.targets() {
            if t >= n {
                err(format!("target {t} out of range (N={n})"));
            }
        }
        if i + 1 == n && !matches!(ins, Instr::Halt | Instr::Goto(_) | Instr::CondGoto { .. }) {
            err("falls through past the end of the program".into());
        }
        for msg in type_errors(p, ins) {
            err(msg);
        }
    }
    out
}

fn type_errors(p: &Program, ins: &Instr) -> Vec<String> {
    let mut errs = Vec::new();
    let mut undeclared = BTreeSet::new();
    let scalar = |op: &Operand, errs: &mut Vec<String>, undeclared: &mut BTreeSet<String>| -> Option<Type> {
        match op {
            Operand::Lit(l) => Some(l.ty()),
            Operand::Var(v) => match p.vars.get(v) {
                None => {
                    undeclared.insert(v.clone());
                    None
                }
                Some(info) if info.ty.is_array() => {
                    errs.push(format!("array {v} used as a scalar operand"));
                    None
                }
                Some(info) => Some(info.ty),
            },
        }
    };
    let var_ty = |v: &str, undeclared: &mut BTreeSet<String>| -> Option<Type> {
        match p.vars.get(v) {
            None => {
                undeclared.insert(v.to_string());
                None
            }
            Some(info) => Some(info.ty),
        }
    };
    let expect = |what: &str, got: Option<Type>, want: Type, errs: &mut Vec<String>| {
        if let Some(got) = got {
            if got != want {
                errs.push(format!("{what}: expected {want}, found {got}"));
            }
        }
    };
    match ins {
        Instr::Copy { dst, src } => {
            let d = var_ty(dst, &mut undeclared);
            let s = scalar(src, &mut errs, &mut undeclared);
            if let Some(d) = d {
                if d.is_array() {
                    errs.push(format!("cannot assign to array {dst}"));
                } else {
                    expect("copy source", s, d, &mut errs);
                }
            }
        }
        Instr::Bin { dst, op, lhs, rhs } => {
            let d = var_ty(dst, &mut undeclared);
            let a = scalar(lhs, &mut errs, &mut undeclared);
            let b = scalar(rhs, &mut errs, &mut undeclared);
            if let (Some(a), Some(b)) = (a, b) {
                if a != b {
                    errs.push(format!("operands of {op} have types {a} and {b}"));
                }
            }
            let operand_ty = a.or(b);
            let result_ty = if op.is_predicate() {
                Some(Type::Bool)
            } else {
                operand_ty
            };
            if let Some(t) = operand_ty {
                if op.is_logic() && t != Type::Bool {
                    errs.push(format!("{op} requires bool operands"));
                }
                if (op.is_arith() || op.is_order()) && !t.is_numeric() {
                    errs.push(format!("{op} requires numeric operands"));
                }
            }
            if let Some(d) = d {
                expect(&format!("result of {op}"), result_ty, d, &mut errs);
            }
        }
        Instr::Un { dst, op, arg } => {
            let d = var_ty(dst, &mut undeclared);
            let a = scalar(arg, &mut errs, &mut undeclared);
            let (want_arg, result): (Option<Type>, Option<Type>) = match op {
                UnOp::Neg => {
                    if let Some(a) = a {
                        if !a.is_numeric() {
                            errs.push("neg requires a numeric operand".into());
                        }
                    }
                    (None, a)
                }
                UnOp::Not => (Some(Type::Bool), Some(Type::Bool)),
                UnOp::IntToFloat => (Some(Type::Int), Some(Type::Float)),
            };
            if let Some(w) = want_arg {
                expect(&format!("operand of {}", op.keyword()), a, w, &mut errs);
            }
            if let Some(d) = d {
                expect(&format!("result of {}", op.keyword()), result, d, &mut errs);
            }
        }
        Instr::Load { dst, arr, idx } => {
            let d = var_ty(dst, &mut undeclared);
            let at = var_ty(arr, &mut undeclared);
            let i = scalar(idx, &mut errs, &mut undeclared);
            expect("array index", i, Type::Int, &mut errs);
            if let Some(at) = at {
                if !at.is_array() {
                    errs.push(format!("{arr} is not an array"));
                } else if let Some(d) = d {
                    expect("load destination", Some(at.elem()), d, &mut errs);
                }
            }
        }
        Instr::Store { arr, idx, src } => {
            let at = var_ty(arr, &mut undeclared);
            let i = scalar(idx, &mut errs, &mut undeclared);
            let s = scalar(src, &mut errs, &mut undeclared);
            expect("array index", i, Type::Int, &mut errs);
            if let Some(at) = at {
                if !at.is_array() {
                    errs.push(format!("{arr} is not an array"));
                } else {
                    expect("stored value", s, at.elem(), &mut errs);
                }
            }
        }
        Instr::CondGoto { cond, .. } => match cond {
            Cond::Operand(a) | Cond::Not(a) => {
                let t = scalar(a, &mut errs, &mut undeclared);
                expect("branch condition", t, Type::Bool, &mut errs);
            }
            Cond::Bin(op, a, b) => {
                let ta = scalar(a, &mut errs, &mut undeclared);
                let tb = scalar(b, &mut errs, &mut undeclared);
                if !op.is_predicate() {
                    errs.push(format!("branch condition operator {op} does not yield bool"));
                }
                if let (Some(ta), Some(tb)) = (ta, tb) {
                    if ta != tb {
                        errs.push(format!("operands of {op} have types {ta} and {tb}"));
                    } else if op.is_logic() && ta != Type::Bool {
                        errs.push(format!("{op} requires bool operands"));
                    } else if op.is_order() && !ta.is_numeric() {
                        errs.push(format!("{op} requires numeric operands"));
                    }
                }
            }
        },
        Instr::Goto(_) | Instr::Halt | Instr::Noop => {}
    }
    let mut out: Vec<String> = undeclared
        .into_iter()
        .map(|v| format!("undeclared variable {v}"))
        .collect();
    out.extend(errs);
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RetargetError {
    #[error("keep set is empty")]
    Empty,
    #[error("keep set does not contain the entry instruction")]
    MissingEntry,
    #[error("index {0} is out of range")]
    OutOfRange(usize),
    #[error("instr {from}: successor {to} is not kept")]
    Dangling { from: usize, to: usize },
}

/// Map from old instruction positions to new ones.
pub type PointMap = BTreeMap<usize, usize>;

/// Keeps exactly the instructions in `keep`, in order, renumbering branch
/// targets. Every successor of a kept instruction must itself be kept.
pub fn retarget(p: &Program, keep: &BTreeSet<usize>) -> Result<(Program, PointMap), RetargetError> {
    if keep.is_empty() {
        return Err(RetargetError::Empty);
    }
    if !keep.contains(&0) {
        return Err(RetargetError::MissingEntry);
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= p.len()) {
        return Err(RetargetError::OutOfRange(bad));
    }
    for &i in keep {
        for s in p.successors(i) {
            if !keep.contains(&s) {
                return Err(RetargetError::Dangling { from: i, to: s });
            }
        }
    }
    Ok(compact(p, keep, |t| t))
}

/// Removes every `noop`, forwarding branch targets that pointed at a removed
/// noop to the next surviving instruction.
pub fn strip_noops(p: &Program) -> (Program, PointMap) {
    let keep: BTreeSet<usize> = (0..p.len())
        .filter(|&i| !matches!(p.instrs[i], Instr::Noop))
        .collect();
    let forward = |t: usize| keep.range(t..).next().copied().unwrap_or(t);
    compact(p, &keep, forward)
}

fn compact(p: &Program, keep: &BTreeSet<usize>, forward: impl Fn(usize) -> usize) -> (Program, PointMap) {
    let map: PointMap = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let instrs = keep
        .iter()
        .map(|&i| p.instrs[i].map_targets(|t| map[&forward(t)]))
        .collect();
    (
        Program {
            vars: p.vars.clone(),
            instrs,
        },
        map,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn fixtures_validate() {
        for (name, p) in fixtures::all() {
            assert_eq!(validate(&p), vec![], "{name}");
        }
    }

    #[test]
    fn out_of_range_target_reported() {
        let mut p = fixtures::p1();
        p.instrs[1] = Instr::Goto(9);
        let v: Vec<String> = validate(&p).iter().map(ToString::to_string).collect();
        assert_eq!(v, vec!["instr 1: target 9 out of range (N=4)"]);
    }

    #[test]
    fn undeclared_variable_reported() {
        let mut p = fixtures::p2();
        p.vars.shift_remove("x");
        let v: Vec<String> = validate(&p).iter().map(ToString::to_string).collect();
        assert_eq!(v, vec!["instr 1: undeclared variable x"]);
    }

    #[test]
    fn fall_through_off_end_rejected() {
        let mut p = fixtures::p2();
        p.instrs.pop();
        let v = validate(&p);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("falls through"));
    }

    #[test]
    fn type_errors_reported() {
        let mut p = fixtures::p6();
        p.instrs[0] = Instr::CondGoto {
            cond: Cond::Operand(Operand::Lit(Literal::Int(7))),
            then_to: 1,
            else_to: 1,
        };
        assert!(validate(&p)[0].message.contains("expected bool"));
    }

    #[test]
    fn successor_sets() {
        assert_eq!(fixtures::p1().successors(1).as_slice(), &[3]);
        assert_eq!(fixtures::p6().successors(0).as_slice(), &[1]);
        assert_eq!(fixtures::p5().successors(0).as_slice(), &[0]);
        assert!(fixtures::p1().successors(3).is_empty());
        assert_eq!(fixtures::p4().successors(2).as_slice(), &[4, 3]);
    }

    #[test]
    fn defs_uses_shapes() {
        let bin = Instr::Bin {
            dst: "x".into(),
            op: BinOp::Add,
            lhs: Operand::var("a"),
            rhs: Operand::var("b"),
        };
        let du = defs_uses(&bin);
        assert_eq!(du.def, Some("x"));
        assert_eq!(du.uses, ["a", "b"].into_iter().collect());
        assert_eq!(du.array_written, None);

        let store = Instr::Store {
            arr: "A".into(),
            idx: Operand::var("i"),
            src: Operand::var("t"),
        };
        let du = defs_uses(&store);
        assert_eq!(du.def, None);
        assert_eq!(du.uses, ["i", "t"].into_iter().collect());
        assert_eq!(du.array_written, Some("A"));

        let load = Instr::Load {
            dst: "x".into(),
            arr: "A".into(),
            idx: Operand::var("i"),
        };
        assert_eq!(defs_uses(&load).uses, ["A", "i"].into_iter().collect());

        let du = defs_uses(&Instr::Halt);
        assert_eq!((du.def, du.uses.len(), du.array_written), (None, 0, None));
    }

    #[test]
    fn retarget_drops_and_renumbers() {
        let p = fixtures::p1();
        let (q, map) = retarget(&p, &set(&[0, 1, 3])).unwrap();
        assert_eq!(q.instrs, vec![p.instrs[0].clone(), Instr::Goto(2), Instr::Halt]);
        assert_eq!(map, [(0, 0), (1, 1), (3, 2)].into_iter().collect());
        assert!(validate(&q).is_empty());
    }

    #[test]
    fn retarget_identity() {
        let p = fixtures::p1();
        let (q, map) = retarget(&p, &set(&[0, 1, 2, 3])).unwrap();
        assert_eq!(q, p);
        assert!(map.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn retarget_rejects_dangling_successor() {
        let p = fixtures::p1();
        assert_eq!(
            retarget(&p, &set(&[0, 2, 3])),
            Err(RetargetError::Dangling { from: 0, to: 1 })
        );
        assert_eq!(retarget(&p, &set(&[])), Err(RetargetError::Empty));
        assert_eq!(retarget(&p, &set(&[1, 3])), Err(RetargetError::MissingEntry));
    }

    #[test]
    fn strip_noops_forwards_targets() {
        let mut p = fixtures::p4();
        p.instrs[3] = Instr::Noop;
        p.instrs[2] = Instr::CondGoto {
            cond: Cond::Operand(Operand::Lit(Literal::Bool(true))),
            then_to: 3,
            else_to: 4,
        };
        let (q, map) = strip_noops(&p);
        assert_eq!(q.len(), 5);
        assert!(matches!(q.instrs[2], Instr::CondGoto { then_to: 3, else_to: 3, .. }));
        assert_eq!(map.get(&3), None);
        assert_eq!(map[&4], 3);
        assert!(validate(&q).is_empty());
    }

    #[test]
    fn literal_equality_is_bitwise() {
        assert_eq!(Literal::float(f64::NAN), Literal::float(-f64::NAN));
        assert_ne!(Literal::Float(0.0), Literal::Float(-0.0));
        assert_eq!(Literal::Float(-0.0).to_string(), "-0.0");
        assert_eq!(Literal::Float(1e300).to_string(), "1e300");
    }
}
