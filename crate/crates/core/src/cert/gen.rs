//! Certificate generators, one per pass family.

use super::{identity_invariant, Atom, Certificate};
use crate::dataflow::{solve_worklist, Direction, LatticeFacts, LatticeSpec};
use crate::ir::Program;
use crate::passes::{DeadFacts, PassFacts, PassResult, VarSet};

/// Certificate for any pass result.
pub fn gen_cert(r: &PassResult) -> Certificate {
    match &r.facts {
        PassFacts::Reachable(_) => gen_cert_uce(r),
        PassFacts::Dead(_) => gen_cert_dae(r),
        PassFacts::Constants(_) => gen_cert_cp(r),
    }
}

/// Identity at every surviving point.
pub fn gen_cert_uce(r: &PassResult) -> Certificate {
    let inv = identity_invariant(&r.before);
    let mut c = Certificate::new(1);
    for (&s, &t) in &r.point_map {
        c.entries.insert((s, t), inv.clone());
    }
    c
}

/// Forward "may differ" analysis over the program dead assignments were
/// removed from: a removed definition makes its variable differ between
/// source and target until a surviving definition overwrites it.
pub struct Divergence<'a> {
    pub removed: &'a [bool],
}

impl LatticeSpec for Divergence<'_> {
    type Fact = VarSet;

    fn direction(&self) -> Direction {
        Direction::Forward
    }

    fn bottom(&self, _: &Program) -> VarSet {
        VarSet::default()
    }

    fn boundary(&self, _: &Program) -> VarSet {
        VarSet::default()
    }

    fn join(&self, a: &VarSet, b: &VarSet) -> VarSet {
        a.union(b)
    }

    fn transfer(&self, p: &Program, i: usize, before: &VarSet) -> VarSet {
        let mut out = before.clone();
        if let Some(d) = p.instrs[i].dst() {
            let k = p.vars.get_index_of(d).expect("declared");
            if self.removed[i] {
                out.insert(k);
            } else {
                out.remove(k);
            }
        }
        out
    }
}

pub fn diverged(facts: &DeadFacts) -> LatticeFacts<VarSet> {
    let spec = Divergence {
        removed: &facts.removed,
    };
    solve_worklist(&facts.intermediate, &spec).expect("divergence is monotone")
}

/// Identity minus variables that may differ, at every surviving point.
pub fn gen_cert_dae(r: &PassResult) -> Certificate {
    let PassFacts::Dead(facts) = &r.facts else {
        panic!("gen_cert_dae needs dead-assignment facts");
    };
    let div = diverged(facts);
    let mut longest = 0;
    let mut run = 0;
    for &gone in &facts.removed {
        run = if gone { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    let mut c = Certificate::new(1 + longest);
    let p = &facts.intermediate;
    for (&s, &t) in &r.point_map {
        let m = facts.to_intermediate[&s];
        let differ = &div.before[m];
        let inv = p
            .vars
            .iter()
            .enumerate()
            .filter_map(|(k, (n, v))| {
                if v.ty.is_array() {
                    Some(Atom::EqArr(n.clone(), n.clone()))
                } else if differ.contains(k) {
                    None
                } else {
                    Some(Atom::EqVar(n.clone(), n.clone()))
                }
            })
            .collect();
        c.entries.insert((s, t), inv);
    }
    c
}

/// Identity plus the source constants known before each target-reachable
/// point.
pub fn gen_cert_cp(r: &PassResult) -> Certificate {
    let PassFacts::Constants(facts) = &r.facts else {
        panic!("gen_cert_cp needs constant facts");
    };
    let base = identity_invariant(&r.before);
    let mut c = Certificate::new(1);
    for i in crate::passes::reachable(&r.after) {
        let mut inv = base.clone();
        let env = &facts.before[i];
        if env.is_reached() {
            inv.extend(env.known(&r.before).map(|(n, l)| Atom::ConstS(n.to_string(), l)));
        }
        c.entries.insert((i, i), inv);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::Invariant;
    use crate::fixtures;
    use crate::ir::Literal;
    use crate::passes::{cp, dae_fixpoint, uce, uce_dae};

    fn eq(x: &str) -> Atom {
        Atom::EqVar(x.into(), x.into())
    }

    #[test]
    fn uce_p1_entries() {
        let c = gen_cert_uce(&uce(&fixtures::p1()));
        let keys: Vec<_> = c.entries.keys().copied().collect();
        assert_eq!(keys, vec![(0, 0), (1, 1), (3, 2)]);
        let ident: Invariant = [eq("x"), eq("y")].into();
        assert!(c.entries.values().all(|i| *i == ident));
        assert_eq!(c.stutter, 1);
    }

    #[test]
    fn uce_p5_single_entry() {
        let c = gen_cert_uce(&uce(&fixtures::p5()));
        assert_eq!(c.entries.keys().copied().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn dae_p2_omits_dead_variable() {
        let c = gen_cert_dae(&uce_dae(&fixtures::p2()));
        assert_eq!(c.entries[&(1, 0)], [eq("x")].into());
        assert!(!c.entries.contains_key(&(0, 0)));
        assert_eq!(c.stutter, 2);
    }

    #[test]
    fn dae_p3_equates_only_x() {
        let c = gen_cert_dae(&uce_dae(&fixtures::p3()));
        assert_eq!(c.entries[&(2, 0)], [eq("x")].into());
        assert_eq!(c.stutter, 3);
    }

    #[test]
    fn dae_clean_program_is_identity() {
        let p = fixtures::p4();
        let c = gen_cert_dae(&dae_fixpoint(&p));
        assert_eq!(c.stutter, 1);
        assert!(c.entries.iter().all(|((s, t), inv)| s == t && *inv == identity_invariant(&p)));
    }

    #[test]
    fn cp_p4_carries_constants() {
        let c = gen_cert_cp(&cp(&fixtures::p4()));
        let keys: Vec<_> = c.entries.keys().copied().collect();
        assert_eq!(keys, vec![(0, 0), (1, 1), (2, 2), (4, 4), (5, 5)]);
        let y7 = Atom::ConstS("y".into(), Literal::Int(7));
        assert!(c.entries[&(2, 2)].contains(&y7));
        assert!(c.entries[&(4, 4)].contains(&y7));
    }

    #[test]
    fn cp_without_constants_is_identity() {
        let p = crate::frontend::parse_tac("tac v1\ndecl int a in\ndecl int x out\n0: x := a\n1: halt\n").unwrap();
        let c = gen_cert_cp(&cp(&p));
        assert_eq!(c.entries[&(1, 1)], identity_invariant(&p));
    }
}
