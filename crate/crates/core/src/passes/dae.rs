use std::collections::BTreeSet;

use super::{uce, PassFacts, PassKind, PassResult, VarSet};
use crate::dataflow::{solve_worklist, Direction, LatticeFacts, LatticeSpec};
use crate::ir::{defs_uses, strip_noops, Instr, Operand, PointMap, Program};

/// Backward liveness over variable positions. Outputs and every array are live
/// at `halt`.
pub struct Liveness;

impl LatticeSpec for Liveness {
    type Fact = VarSet;

    fn direction(&self) -> Direction {
        Direction::Backward
    }

    fn bottom(&self, _: &Program) -> VarSet {
        VarSet::default()
    }

    fn boundary(&self, p: &Program) -> VarSet {
        p.vars
            .values()
            .enumerate()
            .filter(|(_, v)| v.output || v.ty.is_array())
            .map(|(k, _)| k)
            .collect()
    }

    fn join(&self, a: &VarSet, b: &VarSet) -> VarSet {
        a.union(b)
    }

    fn transfer(&self, p: &Program, i: usize, after: &VarSet) -> VarSet {
        let du = defs_uses(&p.instrs[i]);
        let mut out = after.clone();
        if let Some(d) = du.def {
            out.remove(index_of(p, d));
        }
        for u in du.uses {
            out.insert(index_of(p, u));
        }
        out
    }
}

fn index_of(p: &Program, name: &str) -> usize {
    p.vars.get_index_of(name).expect("validated program declares every variable")
}

pub fn liveness(p: &Program) -> LatticeFacts<VarSet> {
    solve_worklist(p, &Liveness).expect("liveness is monotone")
}

/// Names in a live set, in declaration order.
pub fn live_names<'a>(p: &'a Program, set: &VarSet) -> Vec<&'a str> {
    set.iter().map(|k| p.vars.get_index(k).unwrap().0.as_str()).collect()
}

/// True when deleting `ins` cannot change behaviour beyond its destination:
/// it writes one scalar and can never fault.
pub fn is_removable(ins: &Instr) -> bool {
    match ins {
        Instr::Copy { .. } | Instr::Un { .. } => true,
        Instr::Bin { op, rhs, .. } => !op.is_division() || matches!(rhs, Operand::Lit(l) if !l.is_zero()),
        _ => false,
    }
}

fn is_dead(p: &Program, i: usize, live_after: &VarSet) -> bool {
    let ins = &p.instrs[i];
    match ins.dst() {
        Some(d) => is_removable(ins) && !live_after.contains(index_of(p, d)),
        None => false,
    }
}

/// Facts shared by the dead-assignment passes.
#[derive(Clone, Debug)]
pub struct DeadFacts {
    /// Reachable source points when unreachable code was removed first.
    pub reachable: Option<BTreeSet<usize>>,
    /// Source points to positions in `intermediate`.
    pub to_intermediate: PointMap,
    /// The program the dead assignments were removed from.
    pub intermediate: Program,
    /// Positions in `intermediate` that were removed.
    pub removed: Vec<bool>,
    /// Liveness of `intermediate` with the removed instructions made `noop`.
    pub live: LatticeFacts<VarSet>,
}

/// Marks dead assignments as `noop` in place. Returns how many were marked.
fn mark_dead(q: &mut Program, removed: &mut [bool]) -> (usize, LatticeFacts<VarSet>) {
    let live = liveness(q);
    let mut marked = 0;
    for (i, gone) in removed.iter_mut().enumerate().take(q.len()) {
        if !*gone && is_dead(q, i, &live.after[i]) {
            q.instrs[i] = Instr::Noop;
            *gone = true;
            marked += 1;
        }
    }
    (marked, live)
}

fn dead_pass(p: &Program, fixpoint: bool, pass: PassKind) -> PassResult {
    let mut q = p.clone();
    // Pre-existing noops vanish too, so they count as removed.
    let mut removed: Vec<bool> = p.instrs.iter().map(|i| matches!(i, Instr::Noop)).collect();
    let mut live = loop {
        let (marked, live) = mark_dead(&mut q, &mut removed);
        if marked == 0 || !fixpoint {
            break live;
        }
    };
    if !fixpoint {
        live = liveness(&q);
    }
    let (after, point_map) = strip_noops(&q);
    PassResult {
        pass,
        before: p.clone(),
        after,
        point_map,
        facts: PassFacts::Dead(DeadFacts {
            reachable: None,
            to_intermediate: (0..p.len()).map(|i| (i, i)).collect(),
            intermediate: p.clone(),
            removed,
            live,
        }),
    }
}

/// One round of dead assignment elimination.
pub fn dae_once(p: &Program) -> PassResult {
    dead_pass(p, false, PassKind::DaeOnce)
}

/// Dead assignment elimination iterated until nothing more is removed.
pub fn dae_fixpoint(p: &Program) -> PassResult {
    dead_pass(p, true, PassKind::Dae)
}

/// Unreachable code elimination followed by dead assignment elimination to a
/// fixed point.
pub fn uce_dae(p: &Program) -> PassResult {
    let first = uce(p);
    let PassFacts::Reachable(reach) = first.facts else {
        unreachable!()
    };
    let second = dae_fixpoint(&first.after);
    let PassFacts::Dead(mut facts) = second.facts else {
        unreachable!()
    };
    let point_map = first
        .point_map
        .iter()
        .filter_map(|(&s, m)| second.point_map.get(m).map(|&t| (s, t)))
        .collect();
    facts.reachable = Some(reach);
    facts.to_intermediate = first.point_map;
    PassResult {
        pass: PassKind::UceDae,
        before: p.clone(),
        after: second.after,
        point_map,
        facts: PassFacts::Dead(facts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::frontend::parse_tac;

    fn tac(body: &str) -> Program {
        parse_tac(body).unwrap()
    }

    #[test]
    fn liveness_of_p3() {
        let p = fixtures::p3();
        let l = liveness(&p);
        let names: Vec<Vec<&str>> = l.before.iter().map(|s| live_names(&p, s)).collect();
        assert_eq!(names, vec![vec![], vec!["a"], vec![], vec!["x"]]);
    }

    #[test]
    fn p2_drops_dead_store() {
        let r = dae_fixpoint(&fixtures::p2());
        assert_eq!(r.after, tac("tac v1\ndecl int d\ndecl int x out\n0: x := 7\n1: halt\n"));
        assert_eq!(r.point_map, [(1, 0), (2, 1)].into());
    }

    #[test]
    fn p3_needs_two_rounds() {
        let once = dae_once(&fixtures::p3());
        assert_eq!(once.after.len(), 3);
        let fix = dae_fixpoint(&fixtures::p3());
        assert_eq!(fix.after.len(), 2);
        assert_eq!(fix.point_map, [(2, 0), (3, 1)].into());
        assert_eq!(dae_once(&once.after).after, fix.after);
    }

    #[test]
    fn faulting_division_survives() {
        let p = tac("tac v1\ndecl int a in\ndecl int b\ndecl int c\ndecl int x out\n0: b := 1 / a\n1: c := 1 / 2\n2: x := 0\n3: halt\n");
        let r = dae_fixpoint(&p);
        assert_eq!(r.after.len(), 3);
        assert!(matches!(&r.after.instrs[0], Instr::Bin { dst, .. } if dst == "b"));
    }

    #[test]
    fn branch_into_removed_instruction_is_forwarded() {
        let p = tac("tac v1\ndecl bool c in\ndecl int d\ndecl int x out\n0: if c goto 2 else 1\n1: x := 1\n2: d := 3\n3: halt\n");
        let r = dae_fixpoint(&p);
        assert_eq!(
            r.after,
            tac("tac v1\ndecl bool c in\ndecl int d\ndecl int x out\n0: if c goto 2 else 1\n1: x := 1\n2: halt\n")
        );
    }

    #[test]
    fn uce_dae_composes_maps() {
        let r = uce_dae(&fixtures::p1());
        assert_eq!(r.point_map, [(0, 0), (1, 1), (3, 2)].into());
        let PassFacts::Dead(f) = &r.facts else { panic!() };
        assert_eq!(f.reachable, Some([0, 1, 3].into()));
    }
}
