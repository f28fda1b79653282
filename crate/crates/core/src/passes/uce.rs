use std::collections::BTreeSet;

use super::{PassFacts, PassKind, PassResult};
use crate::ir::{retarget, Program};

/// Indices reachable from the entry. Iterative depth-first search; each
/// instruction is pushed at most once.
pub fn reachable(p: &Program) -> BTreeSet<usize> {
    let mut seen = vec![false; p.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for s in p.successors(i) {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    seen.iter()
        .enumerate()
        .filter_map(|(i, &r)| r.then_some(i))
        .collect()
}

/// Unreachable code elimination.
pub fn uce(p: &Program) -> PassResult {
    let live = reachable(p);
    let (after, point_map) = retarget(p, &live).expect("reachable set is closed under successors");
    PassResult {
        pass: PassKind::Uce,
        before: p.clone(),
        after,
        point_map,
        facts: PassFacts::Reachable(live),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::frontend::parse_tac;

    #[test]
    fn reachable_sets() {
        assert_eq!(reachable(&fixtures::p1()), [0, 1, 3].into());
        assert_eq!(reachable(&fixtures::p5()), [0].into());
        assert_eq!(reachable(&fixtures::p4()), (0..6).collect());
    }

    #[test]
    fn uce_removes_unreachable() {
        let r = uce(&fixtures::p1());
        let expected = parse_tac("tac v1\ndecl int x out\ndecl int y\n0: x := 3\n1: goto 2\n2: halt\n").unwrap();
        assert_eq!(r.after, expected);
        assert_eq!(r.point_map, [(0, 0), (1, 1), (3, 2)].into());
    }

    #[test]
    fn uce_identity_cases() {
        for p in [fixtures::p4(), fixtures::p5(), fixtures::p6()] {
            let r = uce(&p);
            assert!(r.is_identity());
            assert!(r.point_map.iter().all(|(a, b)| a == b));
        }
    }
}
