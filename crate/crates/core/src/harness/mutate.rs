//! Single-site mutations of a pass result or its certificate, standing in for
//! buggy passes and buggy certificate generators.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cert::{Atom, Certificate};
use crate::ir::{BinOp, Cond, Instr, Literal, Operand, Program};
use crate::passes::{reachable, PassResult};

/// What was changed and where.
#[derive(Clone, Debug, PartialEq)]
pub enum Mutation {
    RetargetBranch { at: usize, from: usize, to: usize },
    ChangeLiteral { at: usize, from: Literal, to: Literal },
    SwapOp { at: usize, from: BinOp, to: BinOp },
    DeleteEntry { key: (usize, usize) },
    /// An entry moved to a different source point.
    MoveEntry { key: (usize, usize), to: usize },
    /// An equality on a variable the invariant left out.
    AddEqVar { key: (usize, usize), var: String },
    AddConst { key: (usize, usize), var: String, value: Literal },
    ShrinkStutter { from: usize },
}

impl Mutation {
    /// Whether the target program changed, as opposed to only the certificate.
    pub fn changes_program(&self) -> bool {
        matches!(
            self,
            Mutation::RetargetBranch { .. } | Mutation::ChangeLiteral { .. } | Mutation::SwapOp { .. }
        )
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::RetargetBranch { at, from, to } => write!(f, "retarget branch at {at}: {from} -> {to}"),
            Mutation::ChangeLiteral { at, from, to } => write!(f, "change literal at {at}: {from} -> {to}"),
            Mutation::SwapOp { at, from, to } => write!(f, "swap operator at {at}: {from} -> {to}"),
            Mutation::DeleteEntry { key } => write!(f, "delete entry {key:?}"),
            Mutation::MoveEntry { key, to } => write!(f, "move entry {key:?} to source point {to}"),
            Mutation::AddEqVar { key, var } => write!(f, "add eq {var} {var} at {key:?}"),
            Mutation::AddConst { key, var, value } => write!(f, "add consts {var} {value} at {key:?}"),
            Mutation::ShrinkStutter { from } => write!(f, "stutter {from} -> {}", from - 1),
        }
    }
}

/// Applies one random mutation to either the target program or the
/// certificate. Returns `None` when nothing in either can be mutated.
pub fn mutate(r: &PassResult, cert: &Certificate, seed: u64) -> Option<(PassResult, Certificate, Mutation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let program_first = rng.gen_bool(0.5);
    let program = |rng: &mut ChaCha8Rng| {
        mutate_program(&r.after, rng).map(|(after, m)| {
            let mut r2 = r.clone();
            r2.after = after;
            (r2, cert.clone(), m)
        })
    };
    let certificate =
        |rng: &mut ChaCha8Rng| mutate_cert(&r.before, cert, rng).map(|(c, m)| (r.clone(), c, m));
    if program_first {
        program(&mut rng).or_else(|| certificate(&mut rng))
    } else {
        certificate(&mut rng).or_else(|| program(&mut rng))
    }
}

/// Sites in reachable instructions are preferred so the change is likely to
/// be observable.
pub fn mutate_program(p: &Program, rng: &mut ChaCha8Rng) -> Option<(Program, Mutation)> {
    let live = reachable(p);
    let mut sites: Vec<(usize, u8)> = Vec::new();
    for &i in &live {
        let ins = &p.instrs[i];
        if !ins.targets().is_empty() {
            sites.push((i, 0));
        }
        if ins.operands().iter().any(|o| o.as_lit().is_some()) {
            sites.push((i, 1));
        }
        if swappable(ins).is_some() {
            sites.push((i, 2));
        }
    }
    let &(at, kind) = sites.choose(rng)?;
    let mut out = p.clone();
    let m = match kind {
        0 => {
            let arms = p.instrs[at].targets();
            let arm = rng.gen_range(0..arms.len());
            let from = arms[arm];
            let choices: Vec<usize> = (0..p.len()).filter(|&t| t != from).collect();
            let &to = choices.choose(rng)?;
            let mut k = 0;
            out.instrs[at] = p.instrs[at].map_targets(|t| {
                let keep = k != arm;
                k += 1;
                if keep {
                    t
                } else {
                    to
                }
            });
            Mutation::RetargetBranch { at, from, to }
        }
        1 => {
            let mut lits: Vec<&mut Operand> = out.instrs[at]
                .operands_mut()
                .into_iter()
                .filter(|o| o.as_lit().is_some())
                .collect();
            let k = rng.gen_range(0..lits.len());
            let from = lits[k].as_lit().expect("literal operand");
            let to = perturb(from, rng);
            *lits[k] = Operand::Lit(to);
            Mutation::ChangeLiteral { at, from, to }
        }
        _ => {
            let (from, group) = swappable(&p.instrs[at]).expect("swap site");
            let &to = group.iter().filter(|&&o| o != from).collect::<Vec<_>>().choose(rng)?;
            match &mut out.instrs[at] {
                Instr::Bin { op, .. } | Instr::CondGoto { cond: Cond::Bin(op, ..), .. } => *op = *to,
                _ => unreachable!("swappable checked the shape"),
            }
            Mutation::SwapOp { at, from, to: *to }
        }
    };
    Some((out, m))
}

const ARITH: &[BinOp] = &[BinOp::Add, BinOp::Sub, BinOp::Mul];
const DIVS: &[BinOp] = &[BinOp::Div, BinOp::Mod];
const ORDERS: &[BinOp] = &[BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne];
const EQUALITIES: &[BinOp] = &[BinOp::Eq, BinOp::Ne];
const LOGIC: &[BinOp] = &[BinOp::And, BinOp::Or, BinOp::Eq, BinOp::Ne];

/// Operator at `ins` and the operators it can be swapped with without
/// breaking types.
fn swappable(ins: &Instr) -> Option<(BinOp, &'static [BinOp])> {
    let op = match ins {
        Instr::Bin { op, .. } | Instr::CondGoto { cond: Cond::Bin(op, ..), .. } => *op,
        _ => return None,
    };
    let group = match op {
        BinOp::Add | BinOp::Sub | BinOp::Mul => ARITH,
        BinOp::Div | BinOp::Mod => DIVS,
        BinOp::And | BinOp::Or => LOGIC,
        // Equality may compare bools, which have no order.
        BinOp::Eq | BinOp::Ne => EQUALITIES,
        _ => ORDERS,
    };
    Some((op, group))
}

fn perturb(l: Literal, rng: &mut ChaCha8Rng) -> Literal {
    match l {
        Literal::Int(n) => {
            let d = *[1i64, -1, 2, 7, -100].choose(rng).unwrap();
            Literal::Int(n.wrapping_add(d))
        }
        Literal::Float(x) => {
            let d = *[1.0, -0.5, 2.0].choose(rng).unwrap();
            let y = x + d;
            Literal::float(if y == x || y.is_nan() { 1.0 } else { y })
        }
        Literal::Bool(b) => Literal::Bool(!b),
    }
}

pub fn mutate_cert(src: &Program, cert: &Certificate, rng: &mut ChaCha8Rng) -> Option<(Certificate, Mutation)> {
    let keys: Vec<(usize, usize)> = cert.entries.keys().copied().collect();
    let mut out = cert.clone();
    let kinds: &[u8] = if cert.stutter > 1 { &[0, 1, 2, 3, 4] } else { &[0, 1, 2, 3] };
    let key = *keys.choose(rng)?;
    let m = match *kinds.choose(rng).unwrap() {
        0 => {
            out.entries.remove(&key);
            Mutation::DeleteEntry { key }
        }
        1 => {
            let used: Vec<usize> = keys.iter().map(|k| k.0).collect();
            let choices: Vec<usize> = (0..src.len()).filter(|s| !used.contains(s)).collect();
            let &to = choices.choose(rng)?;
            let inv = out.entries.remove(&key).unwrap();
            out.entries.insert((to, key.1), inv);
            Mutation::MoveEntry { key, to }
        }
        2 => {
            let inv = &cert.entries[&key];
            let missing: Vec<&String> = src
                .vars
                .iter()
                .filter(|(n, v)| !v.ty.is_array() && !inv.contains(&Atom::EqVar((*n).clone(), (*n).clone())))
                .map(|(n, _)| n)
                .collect();
            let &var = missing.choose(rng)?;
            out.entries
                .get_mut(&key)
                .unwrap()
                .insert(Atom::EqVar(var.clone(), var.clone()));
            Mutation::AddEqVar { key, var: var.clone() }
        }
        3 => {
            let scalars: Vec<(&String, crate::ir::Type)> = src
                .vars
                .iter()
                .filter(|(_, v)| !v.ty.is_array())
                .map(|(n, v)| (n, v.ty))
                .collect();
            let &(var, ty) = scalars.choose(rng)?;
            let inv = out.entries.get_mut(&key).unwrap();
            let existing = inv.iter().find_map(|a| match a {
                Atom::ConstS(x, l) if x == var => Some(*l),
                _ => None,
            });
            let value = match existing {
                Some(l) => {
                    inv.remove(&Atom::ConstS(var.clone(), l));
                    perturb(l, rng)
                }
                None => perturb(Literal::zero(ty), rng),
            };
            inv.insert(Atom::ConstS(var.clone(), value));
            Mutation::AddConst {
                key,
                var: var.clone(),
                value,
            }
        }
        _ => {
            out.stutter -= 1;
            Mutation::ShrinkStutter { from: cert.stutter }
        }
    };
    Some((out, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::{check, gen_cert, Reason, Verdict};
    use crate::fixtures;
    use crate::ir::validate;
    use crate::passes::{uce, uce_dae};

    #[test]
    fn mutants_stay_well_formed() {
        for seed in 0..200 {
            let p = crate::harness::gen_random_program(seed, 30);
            let r = crate::passes::cp(&p);
            let c = gen_cert(&r);
            if let Some((r2, _, m)) = mutate(&r, &c, seed) {
                assert_eq!(validate(&r2.after), vec![], "{m}");
            }
        }
    }

    #[test]
    fn false_equality_on_p2_is_rejected() {
        let r = uce_dae(&fixtures::p2());
        let mut c = gen_cert(&r);
        c.entries
            .get_mut(&(1, 0))
            .unwrap()
            .insert(Atom::EqVar("d".into(), "d".into()));
        assert!(!check(&r.before, &r.after, &c).is_accepted());
    }

    #[test]
    fn deleting_p1_entry_is_rejected() {
        let r = uce(&fixtures::p1());
        let mut c = gen_cert(&r);
        c.entries.remove(&(3, 2));
        assert!(matches!(
            check(&r.before, &r.after, &c),
            Verdict::Rejected {
                reason: Reason::NoSuccessorEntry { target: 2 },
                ..
            }
        ));
    }

    #[test]
    fn retargeting_p1_is_rejected() {
        let r = uce(&fixtures::p1());
        let c = gen_cert(&r);
        let mut after = r.after.clone();
        after.instrs[1] = Instr::Goto(0);
        assert!(!check(&r.before, &after, &c).is_accepted());
    }
}
