//! Certificate checker: target-driven symbolic simulation with bounded
//! source stuttering.
//!
//! For every entry `(s, t)` the checker assumes the entry's invariant, runs one
//! target instruction symbolically (splitting on an undecided branch), then runs
//! the source from `s` until it reaches the source point paired with the
//! target successor. The successor's invariant must then hold. Faults are
//! compared through the guard conditions under which each side would fault.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::expr::{simplify, Assumptions, Expr};
use super::{identity_invariant, Atom, Certificate, Invariant};
use crate::ir::{BinOp, Cond, Instr, Literal, Operand, Program, UnOp};
use crate::ops::FaultKind;
use crate::passes::reachable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Accept identity entries over identical instructions without symbolic
    /// execution.
    pub fast_path: bool,
    /// Compare fault conditions. Turning this off makes the checker unsound on
    /// purpose; it exists only to show the fuzzer catches such a checker.
    pub fault_guards: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            fast_path: true,
            fault_guards: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    /// Structural problem: bad point, undeclared name, type clash, stutter out
    /// of range, or repeated target point.
    Malformed(String),
    InterfaceMismatch(String),
    Contradiction(String),
    NoSuccessorEntry { target: usize },
    StutterExceeded { bound: usize },
    UnresolvedSourceBranch { at: usize },
    AtomNotEstablished(Atom),
    HaltMismatch(String),
    FaultDivergence,
    Uncovered { target: usize },
}

impl Reason {
    pub fn kind(&self) -> &'static str {
        match self {
            Reason::Malformed(_) => "malformed certificate",
            Reason::InterfaceMismatch(_) => "interface mismatch",
            Reason::Contradiction(_) => "contradictory invariant",
            Reason::NoSuccessorEntry { .. } => "no successor entry",
            Reason::StutterExceeded { .. } => "stutter bound exceeded",
            Reason::UnresolvedSourceBranch { .. } => "unresolved source branch",
            Reason::AtomNotEstablished(_) => "atom not established",
            Reason::HaltMismatch(_) => "halt mismatch",
            Reason::FaultDivergence => "fault divergence",
            Reason::Uncovered { .. } => "target point not covered",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())?;
        match self {
            Reason::Malformed(m) | Reason::InterfaceMismatch(m) | Reason::Contradiction(m) | Reason::HaltMismatch(m) => {
                write!(f, ": {m}")
            }
            Reason::NoSuccessorEntry { target } => write!(f, ": nothing maps to target point {target}"),
            Reason::StutterExceeded { bound } => write!(f, ": more than {bound} source steps"),
            Reason::UnresolvedSourceBranch { at } => write!(f, ": source instr {at}"),
            Reason::AtomNotEstablished(a) => write!(f, ": {a}"),
            Reason::Uncovered { target } => write!(f, ": {target}"),
            Reason::FaultDivergence => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    /// `entry` is the failing entry, or `None` for whole-certificate checks.
    Rejected {
        entry: Option<(usize, usize)>,
        reason: Reason,
    },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected {
                entry: Some((s, t)),
                reason,
            } => write!(f, "rejected at ({s}, {t}): {reason}"),
            Verdict::Rejected { entry: None, reason } => write!(f, "rejected: {reason}"),
        }
    }
}

pub fn check(src: &Program, tgt: &Program, cert: &Certificate) -> Verdict {
    check_with(src, tgt, cert, CheckOptions::default())
}

pub fn check_with(src: &Program, tgt: &Program, cert: &Certificate, opts: CheckOptions) -> Verdict {
    match Checker::new(src, tgt, cert, opts).and_then(|c| c.run()) {
        Ok(()) => Verdict::Accepted,
        Err((entry, reason)) => Verdict::Rejected { entry, reason },
    }
}

type Failure = (Option<(usize, usize)>, Reason);

fn malformed(msg: impl Into<String>) -> Failure {
    (None, Reason::Malformed(msg.into()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Src,
    Tgt,
}

/// Symbolic values of every variable of one program, by declaration position.
type State = Vec<Expr>;

/// Fault conditions met along a path, in order. Literal-false guards are
/// dropped and nothing is recorded after a literal-true one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Guards(Vec<(FaultKind, Expr)>);

impl Guards {
    fn push(&mut self, kind: FaultKind, cond: Expr) {
        if self.certain() || cond.as_bool() == Some(false) {
            return;
        }
        self.0.push((kind, cond));
    }

    fn certain(&self) -> bool {
        self.0.last().is_some_and(|(_, c)| c.as_bool() == Some(true))
    }
}

enum Next {
    Pc(usize),
    Halt,
    Branch(Expr, usize, usize),
}

struct Checker<'a> {
    src: &'a Program,
    tgt: &'a Program,
    cert: &'a Certificate,
    opts: CheckOptions,
    by_target: HashMap<usize, usize>,
    identity: Invariant,
}

impl<'a> Checker<'a> {
    fn new(src: &'a Program, tgt: &'a Program, cert: &'a Certificate, opts: CheckOptions) -> Result<Self, Failure> {
        if cert.stutter == 0 || cert.stutter > src.len() {
            return Err(malformed(format!(
                "stutter bound {} outside 1..={}",
                cert.stutter,
                src.len()
            )));
        }
        check_interfaces(src, tgt).map_err(|m| (None, Reason::InterfaceMismatch(m)))?;
        let mut by_target = HashMap::new();
        for (&(s, t), inv) in &cert.entries {
            let key = Some((s, t));
            if s >= src.len() || t >= tgt.len() {
                return Err((key, Reason::Malformed("point out of range".into())));
            }
            if let Some(prev) = by_target.insert(t, s) {
                return Err((
                    key,
                    Reason::Malformed(format!("target point {t} already paired with {prev}")),
                ));
            }
            for atom in inv {
                check_atom_types(src, tgt, atom).map_err(|m| (key, Reason::Malformed(m)))?;
            }
            bindings(src, tgt, inv).map_err(|m| (key, Reason::Contradiction(m)))?;
        }
        let identity = if src.vars == tgt.vars {
            identity_invariant(src)
        } else {
            Invariant::new()
        };
        Ok(Checker {
            src,
            tgt,
            cert,
            opts,
            by_target,
            identity,
        })
    }

    fn run(&self) -> Result<(), Failure> {
        self.check_initial()?;
        for (&key, inv) in &self.cert.entries {
            self.check_entry(key, inv).map_err(|r| (Some(key), r))?;
        }
        for t in reachable(self.tgt) {
            if !self.by_target.contains_key(&t) {
                return Err((None, Reason::Uncovered { target: t }));
            }
        }
        Ok(())
    }

    fn asm(&self) -> Assumptions {
        let mut asm = Assumptions::new();
        asm.zero_division_folds = !self.opts.fault_guards;
        asm
    }

    /// The source, started alongside the target, must reach the point paired
    /// with target point 0 and establish its invariant there.
    fn check_initial(&self) -> Result<(), Failure> {
        let Some(&s0) = self.by_target.get(&0) else {
            return Err((None, Reason::NoSuccessorEntry { target: 0 }));
        };
        let key = Some((s0, 0));
        let (mut src, tgt) = initial_states(self.src, self.tgt);
        let asm = self.asm();
        let mut guards = Guards::default();
        self.run_source(0, s0, true, &mut src, &mut guards, &asm, Goal::Point)
            .map_err(|r| (key, r))?;
        if self.opts.fault_guards && guards != Guards::default() {
            return Err((key, Reason::FaultDivergence));
        }
        self.establish(&self.cert.entries[&(s0, 0)], &src, &tgt, &asm)
            .map_err(|r| (key, r))
    }

    fn check_entry(&self, (s, t): (usize, usize), inv: &Invariant) -> Result<(), Reason> {
        if self.opts.fast_path && self.fast_path(s, t, inv) {
            return Ok(());
        }
        let (src, mut tgt) = states_from(self.src, self.tgt, inv);
        let asm = self.asm();
        let mut tg = Guards::default();
        match exec(self.tgt, &mut tgt, t, &asm, &mut tg) {
            Next::Halt => self.follow(s, None, src, tgt, tg, &asm),
            Next::Pc(t2) => self.follow(s, Some(t2), src, tgt, tg, &asm),
            Next::Branch(c, a, b) => match c.as_bool() {
                Some(true) => self.follow(s, Some(a), src, tgt, tg, &asm),
                Some(false) => self.follow(s, Some(b), src, tgt, tg, &asm),
                None => {
                    for (value, arm) in [(true, a), (false, b)] {
                        let mut case = asm.clone();
                        case.assume(&c, value);
                        let tgt = tgt.iter().map(|e| simplify(e, &case)).collect();
                        let src = src.iter().map(|e| simplify(e, &case)).collect();
                        self.follow(s, Some(arm), src, tgt, tg.clone(), &case)?;
                    }
                    Ok(())
                }
            },
        }
    }

    /// Runs the source from `s` to match one target step that ended at
    /// `t_next` (`None` when the target halted) and checks the result.
    fn follow(
        &self,
        s: usize,
        t_next: Option<usize>,
        mut src: State,
        tgt: State,
        tg: Guards,
        asm: &Assumptions,
    ) -> Result<(), Reason> {
        let target_faulted = self.opts.fault_guards && tg.certain();
        let mut sg = Guards::default();
        let (goal_s, goal) = match t_next {
            _ if target_faulted => (usize::MAX, Goal::Fault),
            None => (usize::MAX, Goal::Halt),
            Some(t2) => match self.by_target.get(&t2) {
                Some(&s2) => (s2, Goal::Point),
                None => return Err(Reason::NoSuccessorEntry { target: t2 }),
            },
        };
        self.run_source(s, goal_s, false, &mut src, &mut sg, asm, goal)?;
        if self.opts.fault_guards {
            if sg != tg {
                return Err(Reason::FaultDivergence);
            }
            if sg.certain() {
                return Ok(());
            }
        }
        match t_next {
            None => self.outputs_agree(&src, &tgt, asm),
            Some(t2) => self.establish(&self.cert.entries[&(goal_s, t2)], &src, &tgt, asm),
        }
    }

    /// Steps the source from `s` until it stands at `goal_s` (having taken at
    /// least one step unless `initial`), at a `halt`, or has faulted,
    /// depending on `goal`.
    #[allow(clippy::too_many_arguments)]
    fn run_source(
        &self,
        mut s: usize,
        goal_s: usize,
        initial: bool,
        st: &mut State,
        guards: &mut Guards,
        asm: &Assumptions,
        goal: Goal,
    ) -> Result<(), Reason> {
        let mut steps = 0;
        loop {
            if self.opts.fault_guards && guards.certain() {
                return match goal {
                    Goal::Fault => Ok(()),
                    // The caller compares guard lists and reports the divergence.
                    _ => Ok(()),
                };
            }
            let at_halt = matches!(self.src.instrs[s], Instr::Halt);
            match goal {
                Goal::Point if s == goal_s && (initial || steps > 0) => return Ok(()),
                Goal::Halt if at_halt => return Ok(()),
                _ => {}
            }
            if at_halt {
                return Err(match goal {
                    Goal::Fault => Reason::FaultDivergence,
                    _ => Reason::HaltMismatch(format!("source halts at {s}, target does not")),
                });
            }
            if steps == self.cert.stutter {
                return Err(match goal {
                    Goal::Fault => Reason::FaultDivergence,
                    _ => Reason::StutterExceeded {
                        bound: self.cert.stutter,
                    },
                });
            }
            s = match exec(self.src, st, s, asm, guards) {
                Next::Pc(n) => n,
                Next::Halt => unreachable!("halt handled above"),
                Next::Branch(c, a, b) => match c.as_bool() {
                    Some(true) => a,
                    Some(false) => b,
                    None if a == b => a,
                    None => return Err(Reason::UnresolvedSourceBranch { at: s }),
                },
            };
            steps += 1;
        }
    }

    fn establish(&self, inv: &Invariant, src: &State, tgt: &State, asm: &Assumptions) -> Result<(), Reason> {
        let sv = |n: &str| simplify(&src[self.src.vars.get_index_of(n).unwrap()], asm);
        let tv = |n: &str| simplify(&tgt[self.tgt.vars.get_index_of(n).unwrap()], asm);
        for atom in inv {
            let ok = match atom {
                Atom::EqVar(a, b) | Atom::EqArr(a, b) => sv(a) == tv(b),
                Atom::ConstS(x, l) => sv(x) == Expr::Lit(*l),
                Atom::ConstT(x, l) => tv(x) == Expr::Lit(*l),
            };
            if !ok {
                return Err(Reason::AtomNotEstablished(atom.clone()));
            }
        }
        Ok(())
    }

    fn outputs_agree(&self, src: &State, tgt: &State, asm: &Assumptions) -> Result<(), Reason> {
        for name in self.src.outputs() {
            let a = simplify(&src[self.src.vars.get_index_of(name).unwrap()], asm);
            let b = simplify(&tgt[self.tgt.vars.get_index_of(name).unwrap()], asm);
            if a != b {
                return Err(Reason::HaltMismatch(format!("output {name} may differ")));
            }
        }
        Ok(())
    }

    fn is_identity(&self, inv: &Invariant) -> bool {
        !self.identity.is_empty() && *inv == self.identity
    }

    fn maps_identically(&self, s: usize, t: usize) -> bool {
        self.by_target.get(&t) == Some(&s) && self.is_identity(&self.cert.entries[&(s, t)])
    }

    /// Identity invariant, the same instruction on both sides, and identity
    /// invariants at the matching successors.
    fn fast_path(&self, s: usize, t: usize, inv: &Invariant) -> bool {
        if !self.is_identity(inv) {
            return false;
        }
        let (si, ti) = (&self.src.instrs[s], &self.tgt.instrs[t]);
        match (si, ti) {
            (Instr::Halt, Instr::Halt) => true,
            (Instr::Goto(a), Instr::Goto(b)) => self.maps_identically(*a, *b),
            (
                Instr::CondGoto {
                    cond: c1,
                    then_to: a1,
                    else_to: b1,
                },
                Instr::CondGoto {
                    cond: c2,
                    then_to: a2,
                    else_to: b2,
                },
            ) => c1 == c2 && self.maps_identically(*a1, *a2) && self.maps_identically(*b1, *b2),
            (si, ti) if !si.is_branch() && !matches!(si, Instr::Halt) => {
                si == ti && self.maps_identically(s + 1, t + 1)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// Stop at the paired source point.
    Point,
    /// Stop at a `halt`.
    Halt,
    /// The target faulted; the source must fault too.
    Fault,
}

fn check_interfaces(src: &Program, tgt: &Program) -> Result<(), String> {
    let sig = |p: &Program, pick: fn(&crate::ir::VarInfo) -> bool| -> Vec<String> {
        p.vars
            .iter()
            .filter(|(_, v)| pick(v))
            .map(|(n, v)| format!("{n}:{}{:?}", v.ty, v.len))
            .collect()
    };
    if sig(src, |v| v.input) != sig(tgt, |v| v.input) {
        return Err("inputs differ".into());
    }
    if sig(src, |v| v.output) != sig(tgt, |v| v.output) {
        return Err("outputs differ".into());
    }
    Ok(())
}

fn check_atom_types(src: &Program, tgt: &Program, atom: &Atom) -> Result<(), String> {
    fn lookup<'p>(p: &'p Program, n: &str, side: &str) -> Result<&'p crate::ir::VarInfo, String> {
        p.vars
            .get(n)
            .ok_or_else(|| format!("{side} variable {n} is not declared"))
    }
    match atom {
        Atom::EqVar(a, b) | Atom::EqArr(a, b) => {
            let (va, vb) = (lookup(src, a, "source")?, lookup(tgt, b, "target")?);
            let want_array = matches!(atom, Atom::EqArr(..));
            if va.ty.is_array() != want_array || vb.ty.is_array() != want_array {
                return Err(format!("`{atom}` relates the wrong kind of variable"));
            }
            if va.ty != vb.ty || va.len != vb.len {
                return Err(format!("`{atom}` relates variables of different types"));
            }
        }
        Atom::ConstS(x, l) | Atom::ConstT(x, l) => {
            let (p, side) = if matches!(atom, Atom::ConstS(..)) {
                (src, "source")
            } else {
                (tgt, "target")
            };
            let v = lookup(p, x, side)?;
            if v.ty != l.ty() {
                return Err(format!("`{atom}` gives a {} variable a {} literal", v.ty, l.ty()));
            }
        }
    }
    Ok(())
}

/// Union-find over `(side, variable)` nodes: source variables first, then
/// target variables.
struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn new(n: usize) -> Classes {
        Classes {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn node(src: &Program, tgt: &Program, side: Side, name: &str) -> usize {
    match side {
        Side::Src => src.vars.get_index_of(name).unwrap(),
        Side::Tgt => src.vars.len() + tgt.vars.get_index_of(name).unwrap(),
    }
}

/// Equivalence classes of the invariant with the literal each class is bound to.
fn bindings(src: &Program, tgt: &Program, inv: &Invariant) -> Result<(Classes, BTreeMap<usize, Literal>), String> {
    let mut cls = Classes::new(src.vars.len() + tgt.vars.len());
    for atom in inv {
        if let Atom::EqVar(a, b) | Atom::EqArr(a, b) = atom {
            cls.union(node(src, tgt, Side::Src, a), node(src, tgt, Side::Tgt, b));
        }
    }
    let mut bound: BTreeMap<usize, Literal> = BTreeMap::new();
    for atom in inv {
        let (side, x, l) = match atom {
            Atom::ConstS(x, l) => (Side::Src, x, l),
            Atom::ConstT(x, l) => (Side::Tgt, x, l),
            _ => continue,
        };
        let root = cls.find(node(src, tgt, side, x));
        if let Some(prev) = bound.insert(root, *l) {
            if prev != *l {
                return Err(format!("{x} is both {prev} and {l}"));
            }
        }
    }
    Ok((cls, bound))
}

/// Symbolic states described by an invariant: equated variables share a
/// symbol, constant atoms bind literals, everything else is a fresh symbol.
fn states_from(src: &Program, tgt: &Program, inv: &Invariant) -> (State, State) {
    let (mut cls, bound) = bindings(src, tgt, inv).expect("contradictions rejected up front");
    let mut value = |n: usize| {
        let root = cls.find(n);
        bound.get(&root).map_or(Expr::Sym(root as u32), |l| Expr::Lit(*l))
    };
    let ns = src.vars.len();
    let s = (0..ns).map(&mut value).collect();
    let t = (0..tgt.vars.len()).map(|k| value(ns + k)).collect();
    (s, t)
}

/// States at program start: inputs shared by name, everything else zero.
fn initial_states(src: &Program, tgt: &Program) -> (State, State) {
    let mut inputs: HashMap<String, u32> = HashMap::new();
    let mut build = |p: &Program| -> State {
        p.vars
            .iter()
            .map(|(n, v)| {
                if v.input {
                    let next = inputs.len() as u32;
                    Expr::Sym(*inputs.entry(n.clone()).or_insert(next))
                } else if v.ty.is_array() {
                    Expr::Zeros(v.ty)
                } else {
                    Expr::Lit(Literal::zero(v.ty))
                }
            })
            .collect()
    };
    let s = build(src);
    let t = build(tgt);
    (s, t)
}

fn operand(p: &Program, st: &State, op: &Operand) -> Expr {
    match op {
        Operand::Lit(l) => Expr::Lit(*l),
        Operand::Var(v) => st[p.vars.get_index_of(v.as_str()).unwrap()].clone(),
    }
}

fn zero_like(p: &Program, op: &Operand) -> Expr {
    Expr::Lit(Literal::zero(p.operand_type(op).expect("validated operand")))
}

fn bounds_guard(len: usize, idx: &Expr, asm: &Assumptions) -> Expr {
    let below = Expr::bin(BinOp::Lt, idx.clone(), Expr::Lit(Literal::Int(0)));
    let above = Expr::bin(BinOp::Ge, idx.clone(), Expr::Lit(Literal::Int(len as i64)));
    simplify(&Expr::bin(BinOp::Or, below, above), asm)
}

/// Symbolically executes instruction `pc`, updating `st` and recording fault
/// guards.
fn exec(p: &Program, st: &mut State, pc: usize, asm: &Assumptions, guards: &mut Guards) -> Next {
    let slot = |name: &str| p.vars.get_index_of(name).unwrap();
    match &p.instrs[pc] {
        Instr::Copy { dst, src } => {
            st[slot(dst)] = operand(p, st, src);
        }
        Instr::Bin { dst, op, lhs, rhs } => {
            let (a, b) = (operand(p, st, lhs), operand(p, st, rhs));
            if op.is_division() {
                let kind = if *op == BinOp::Div {
                    FaultKind::DivByZero
                } else {
                    FaultKind::ModByZero
                };
                let g = simplify(&Expr::bin(BinOp::Eq, b.clone(), zero_like(p, rhs)), asm);
                guards.push(kind, g);
            }
            st[slot(dst)] = simplify(&Expr::bin(*op, a, b), asm);
        }
        Instr::Un { dst, op, arg } => {
            let a = operand(p, st, arg);
            st[slot(dst)] = simplify(&Expr::un(*op, a), asm);
        }
        Instr::Load { dst, arr, idx } => {
            let i = operand(p, st, idx);
            let len = p.vars[arr.as_str()].len.unwrap_or(0);
            guards.push(FaultKind::OutOfBounds, bounds_guard(len, &i, asm));
            let a = st[slot(arr)].clone();
            st[slot(dst)] = simplify(&Expr::load(a, i), asm);
        }
        Instr::Store { arr, idx, src } => {
            let i = operand(p, st, idx);
            let v = operand(p, st, src);
            let len = p.vars[arr.as_str()].len.unwrap_or(0);
            guards.push(FaultKind::OutOfBounds, bounds_guard(len, &i, asm));
            let k = slot(arr);
            st[k] = simplify(&Expr::store(st[k].clone(), i, v), asm);
        }
        Instr::Goto(t) => return Next::Pc(*t),
        Instr::CondGoto {
            cond,
            then_to,
            else_to,
        } => {
            let c = match cond {
                Cond::Operand(a) => operand(p, st, a),
                Cond::Bin(op, a, b) => Expr::bin(*op, operand(p, st, a), operand(p, st, b)),
                Cond::Not(a) => Expr::un(UnOp::Not, operand(p, st, a)),
            };
            return Next::Branch(simplify(&c, asm), *then_to, *else_to);
        }
        Instr::Halt => return Next::Halt,
        Instr::Noop => {}
    }
    Next::Pc(pc + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::gen_cert;
    use crate::fixtures;
    use crate::frontend::parse_tac;
    use crate::passes::PassKind;

    const SLOW: CheckOptions = CheckOptions {
        fast_path: false,
        fault_guards: true,
    };

    fn certify(kind: PassKind, p: &Program) -> (Program, Certificate) {
        let r = kind.run(p);
        let c = gen_cert(&r);
        (r.after, c)
    }

    #[test]
    fn honest_certificates_pass_on_fixtures() {
        let kinds = [PassKind::Uce, PassKind::DaeOnce, PassKind::Dae, PassKind::UceDae, PassKind::Cp];
        for (name, p) in fixtures::all() {
            for kind in kinds {
                let (t, c) = certify(kind, &p);
                for opts in [CheckOptions::default(), SLOW] {
                    let v = check_with(&p, &t, &c, opts);
                    assert!(v.is_accepted(), "{name} {}: {v}", kind.name());
                }
            }
        }
    }

    #[test]
    fn extra_atom_on_dead_variable_is_rejected() {
        let p = fixtures::p2();
        let (t, mut c) = certify(PassKind::UceDae, &p);
        c.entries
            .get_mut(&(1, 0))
            .unwrap()
            .insert(Atom::EqVar("d".into(), "d".into()));
        let v = check(&p, &t, &c);
        assert_eq!(v.to_string(), "rejected at (1, 0): atom not established: eq d d");
    }

    #[test]
    fn missing_entry_is_rejected() {
        let p = fixtures::p2();
        let (t, mut c) = certify(PassKind::UceDae, &p);
        c.entries.remove(&(1, 0));
        let v = check(&p, &t, &c);
        assert!(matches!(
            v,
            Verdict::Rejected {
                reason: Reason::NoSuccessorEntry { target: 0 },
                ..
            }
        ));
    }

    #[test]
    fn stutter_bound_is_enforced() {
        let p = fixtures::p3();
        let (t, mut c) = certify(PassKind::UceDae, &p);
        c.stutter = 1;
        let v = check(&p, &t, &c);
        assert!(!v.is_accepted());
        c.stutter = 0;
        assert!(matches!(
            check(&p, &t, &c),
            Verdict::Rejected {
                reason: Reason::Malformed(_),
                ..
            }
        ));
    }

    #[test]
    fn wrong_constant_is_rejected() {
        let p = fixtures::p4();
        let (t, mut c) = certify(PassKind::Cp, &p);
        let inv = c.entries.get_mut(&(2, 2)).unwrap();
        inv.remove(&Atom::ConstS("y".into(), Literal::Int(7)));
        inv.insert(Atom::ConstS("y".into(), Literal::Int(8)));
        let v = check(&p, &t, &c);
        assert!(!v.is_accepted(), "{v}");
    }

    #[test]
    fn contradictory_invariant_is_rejected() {
        let p = fixtures::p4();
        let (t, mut c) = certify(PassKind::Cp, &p);
        c.entries
            .get_mut(&(4, 4))
            .unwrap()
            .insert(Atom::ConstT("y".into(), Literal::Int(1)));
        assert!(matches!(
            check(&p, &t, &c),
            Verdict::Rejected {
                entry: Some((4, 4)),
                reason: Reason::Contradiction(_)
            }
        ));
    }

    #[test]
    fn ill_typed_atoms_are_malformed() {
        let p = fixtures::p4();
        let (t, mut c) = certify(PassKind::Cp, &p);
        c.entries
            .get_mut(&(0, 0))
            .unwrap()
            .insert(Atom::ConstS("x".into(), Literal::Bool(true)));
        assert!(matches!(
            check(&p, &t, &c),
            Verdict::Rejected {
                reason: Reason::Malformed(_),
                ..
            }
        ));
        let mut c2 = certify(PassKind::Cp, &p).1;
        c2.entries
            .get_mut(&(0, 0))
            .unwrap()
            .insert(Atom::EqVar("nope".into(), "x".into()));
        assert!(!check(&p, &t, &c2).is_accepted());
    }

    #[test]
    fn uncovered_target_point_is_rejected() {
        let p = fixtures::p4();
        let (t, mut c) = certify(PassKind::Cp, &p);
        c.entries.remove(&(5, 5));
        let v = check(&p, &t, &c);
        assert!(!v.is_accepted());
    }

    #[test]
    fn folding_a_division_by_zero_is_caught() {
        let src = parse_tac("tac v1\ndecl int x out\n0: x := 5 / 0\n1: halt\n").unwrap();
        let tgt = parse_tac("tac v1\ndecl int x out\n0: x := 0\n1: halt\n").unwrap();
        let mut c = Certificate::new(1);
        c.entries.insert((0, 0), identity_invariant(&src));
        c.entries.insert((1, 1), identity_invariant(&src));
        let v = check(&src, &tgt, &c);
        assert!(matches!(
            v,
            Verdict::Rejected {
                reason: Reason::FaultDivergence,
                ..
            }
        ));
        let canary = CheckOptions {
            fast_path: true,
            fault_guards: false,
        };
        assert!(check_with(&src, &tgt, &c, canary).is_accepted());
    }

    #[test]
    fn faults_on_both_sides_agree() {
        let text = "tac v1\ndecl int a in\ndecl int x out\n0: x := 5 / a\n1: halt\n";
        let p = parse_tac(text).unwrap();
        let mut c = Certificate::new(1);
        c.entries.insert((0, 0), identity_invariant(&p));
        c.entries.insert((1, 1), identity_invariant(&p));
        assert!(check_with(&p, &p, &c, SLOW).is_accepted());
    }

    #[test]
    fn changed_output_is_rejected() {
        let src = parse_tac("tac v1\ndecl int a in\ndecl int x out\n0: x := a + 1\n1: halt\n").unwrap();
        let tgt = parse_tac("tac v1\ndecl int a in\ndecl int x out\n0: x := a + 2\n1: halt\n").unwrap();
        let mut c = Certificate::new(1);
        c.entries.insert((0, 0), identity_invariant(&src));
        c.entries.insert((1, 1), identity_invariant(&src));
        assert!(!check(&src, &tgt, &c).is_accepted());
        c.entries.get_mut(&(1, 1)).unwrap().remove(&Atom::EqVar("x".into(), "x".into()));
        let v = check(&src, &tgt, &c);
        assert!(matches!(
            v,
            Verdict::Rejected {
                reason: Reason::HaltMismatch(_),
                ..
            }
        ));
    }

    #[test]
    fn interface_change_is_rejected() {
        let src = parse_tac("tac v1\ndecl int x out\n0: x := 1\n1: halt\n").unwrap();
        let tgt = parse_tac("tac v1\ndecl int x\n0: x := 1\n1: halt\n").unwrap();
        let mut c = Certificate::new(1);
        c.entries.insert((0, 0), identity_invariant(&src));
        assert!(matches!(
            check(&src, &tgt, &c),
            Verdict::Rejected {
                reason: Reason::InterfaceMismatch(_),
                ..
            }
        ));
    }
}
