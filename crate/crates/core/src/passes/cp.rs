use std::fmt;

use super::{PassFacts, PassKind, PassResult};
use crate::dataflow::{solve_worklist, Direction, LatticeFacts, LatticeSpec};
use crate::ir::{Cond, Instr, Literal, Operand, Program, UnOp};
use crate::ops::{eval_bin, eval_un};

/// Value of one variable in the constant lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstVal {
    /// No path reaches this point yet.
    Undef,
    Known(Literal),
    Unknown,
}

impl ConstVal {
    pub fn join(self, other: ConstVal) -> ConstVal {
        match (self, other) {
            (ConstVal::Undef, x) | (x, ConstVal::Undef) => x,
            (ConstVal::Known(a), ConstVal::Known(b)) if a == b => ConstVal::Known(a),
            _ => ConstVal::Unknown,
        }
    }

    pub fn known(self) -> Option<Literal> {
        match self {
            ConstVal::Known(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for ConstVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstVal::Undef => f.write_str("undef"),
            ConstVal::Known(l) => write!(f, "{l}"),
            ConstVal::Unknown => f.write_str("?"),
        }
    }
}

/// One [`ConstVal`] per declared variable, by declaration position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstEnv(pub Vec<ConstVal>);

impl ConstEnv {
    /// False for points no feasible path reaches.
    pub fn is_reached(&self) -> bool {
        !self.0.contains(&ConstVal::Undef)
    }

    pub fn get(&self, p: &Program, name: &str) -> ConstVal {
        p.vars
            .get_index_of(name)
            .and_then(|k| self.0.get(k).copied())
            .unwrap_or(ConstVal::Unknown)
    }

    fn set(&mut self, p: &Program, name: &str, v: ConstVal) {
        let k = p.vars.get_index_of(name).expect("declared");
        self.0[k] = v;
    }

    pub fn operand(&self, p: &Program, op: &Operand) -> ConstVal {
        match op {
            Operand::Lit(l) => ConstVal::Known(*l),
            Operand::Var(v) => self.get(p, v),
        }
    }

    /// Known `(name, value)` pairs in declaration order.
    pub fn known<'a>(&'a self, p: &'a Program) -> impl Iterator<Item = (&'a str, Literal)> + 'a {
        p.vars
            .keys()
            .zip(&self.0)
            .filter_map(|(n, v)| v.known().map(|l| (n.as_str(), l)))
    }

    /// Value of a branch condition, when every operand is known.
    pub fn cond(&self, p: &Program, cond: &Cond) -> Option<bool> {
        let lit = |o: &Operand| self.operand(p, o).known();
        let v = match cond {
            Cond::Operand(a) => lit(a)?,
            Cond::Bin(op, a, b) => eval_bin(*op, lit(a)?, lit(b)?).ok()?,
            Cond::Not(a) => eval_un(UnOp::Not, lit(a)?).ok()?,
        };
        v.as_bool()
    }
}

/// Forward constant propagation with branch pruning.
pub struct ConstProp;

impl LatticeSpec for ConstProp {
    type Fact = ConstEnv;

    fn direction(&self) -> Direction {
        Direction::Forward
    }

    fn bottom(&self, p: &Program) -> ConstEnv {
        ConstEnv(vec![ConstVal::Undef; p.vars.len()])
    }

    fn boundary(&self, p: &Program) -> ConstEnv {
        ConstEnv(
            p.vars
                .values()
                .map(|v| {
                    if v.input || v.ty.is_array() {
                        ConstVal::Unknown
                    } else {
                        ConstVal::Known(Literal::zero(v.ty))
                    }
                })
                .collect(),
        )
    }

    fn join(&self, a: &ConstEnv, b: &ConstEnv) -> ConstEnv {
        ConstEnv(a.0.iter().zip(&b.0).map(|(x, y)| x.join(*y)).collect())
    }

    fn transfer(&self, p: &Program, i: usize, env: &ConstEnv) -> ConstEnv {
        if !env.is_reached() {
            return env.clone();
        }
        let mut out = env.clone();
        let val = |o: &Operand| env.operand(p, o).known();
        let result = |r: Option<Literal>| r.map_or(ConstVal::Unknown, ConstVal::Known);
        match &p.instrs[i] {
            Instr::Copy { dst, src } => out.set(p, dst, env.operand(p, src)),
            Instr::Bin { dst, op, lhs, rhs } => {
                let r = val(lhs).zip(val(rhs)).and_then(|(a, b)| eval_bin(*op, a, b).ok());
                out.set(p, dst, result(r));
            }
            Instr::Un { dst, op, arg } => {
                let r = val(arg).and_then(|a| eval_un(*op, a).ok());
                out.set(p, dst, result(r));
            }
            Instr::Load { dst, .. } => out.set(p, dst, ConstVal::Unknown),
            _ => {}
        }
        out
    }

    fn edge_feasible(&self, p: &Program, from: usize, to: usize, before: &ConstEnv) -> bool {
        match &p.instrs[from] {
            Instr::CondGoto {
                cond,
                then_to,
                else_to,
            } if before.is_reached() => match before.cond(p, cond) {
                Some(true) => to == *then_to,
                Some(false) => to == *else_to,
                None => true,
            },
            _ => true,
        }
    }

    /// Each variable can climb undef, known, unknown independently.
    fn height(&self, p: &Program) -> usize {
        2 * p.vars.len() + 2
    }
}

pub fn cp_analyze(p: &Program) -> LatticeFacts<ConstEnv> {
    solve_worklist(p, &ConstProp).expect("constant propagation is monotone")
}

/// Rewrites `ins` under `env`: known variables become literals, pure
/// operations over literals are folded, and decided branches become jumps.
pub fn fold_instr(p: &Program, ins: &Instr, env: &ConstEnv) -> Instr {
    let mut out = ins.clone();
    for o in out.operands_mut() {
        if let Some(l) = env.operand(p, o).known() {
            *o = Operand::Lit(l);
        }
    }
    match &out {
        Instr::Bin { dst, op, lhs, rhs } => {
            if let (Some(a), Some(b)) = (lhs.as_lit(), rhs.as_lit()) {
                if let Ok(v) = eval_bin(*op, a, b) {
                    return Instr::Copy {
                        dst: dst.clone(),
                        src: Operand::Lit(v),
                    };
                }
            }
        }
        Instr::Un { dst, op, arg } => {
            if let Some(Ok(v)) = arg.as_lit().map(|a| eval_un(*op, a)) {
                return Instr::Copy {
                    dst: dst.clone(),
                    src: Operand::Lit(v),
                };
            }
        }
        Instr::CondGoto {
            cond,
            then_to,
            else_to,
        } => {
            let empty = ConstEnv(Vec::new());
            if let Some(b) = empty.cond(p, cond) {
                return Instr::Goto(if b { *then_to } else { *else_to });
            }
        }
        _ => {}
    }
    out
}

/// Constant propagation and folding. Positions never move.
pub fn cp(p: &Program) -> PassResult {
    let facts = cp_analyze(p);
    let instrs = p
        .instrs
        .iter()
        .zip(&facts.before)
        .map(|(ins, env)| {
            if env.is_reached() {
                fold_instr(p, ins, env)
            } else {
                ins.clone()
            }
        })
        .collect();
    PassResult {
        pass: PassKind::Cp,
        before: p.clone(),
        after: Program::new(p.vars.clone(), instrs),
        point_map: (0..p.len()).map(|i| (i, i)).collect(),
        facts: PassFacts::Constants(facts),
    }
}
