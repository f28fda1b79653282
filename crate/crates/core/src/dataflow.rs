//! Generic dataflow solver over instruction-level program points.
//!
//! Two strategies compute the same least fixed point: a FIFO worklist that
//! revisits only points whose inputs changed, and a round-robin solver that
//! sweeps every instruction until a sweep changes nothing. The round-robin
//! solver doubles as the oracle for the worklist one.

use std::collections::VecDeque;
use std::fmt::Debug;

use thiserror::Error;

use crate::ir::{Instr, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A monotone dataflow problem.
pub trait LatticeSpec {
    type Fact: Clone + PartialEq + Debug;

    fn direction(&self) -> Direction;

    fn bottom(&self, p: &Program) -> Self::Fact;

    /// Fact at entry (forward) or after every `halt` (backward).
    fn boundary(&self, p: &Program) -> Self::Fact;

    fn join(&self, a: &Self::Fact, b: &Self::Fact) -> Self::Fact;

    /// Forward: fact after `i` given the fact before it. Backward: fact before
    /// `i` given the fact after it.
    fn transfer(&self, p: &Program, i: usize, fact: &Self::Fact) -> Self::Fact;

    /// Forward problems may prune edges the fact before `from` proves infeasible.
    fn edge_feasible(&self, _p: &Program, _from: usize, _to: usize, _before: &Self::Fact) -> bool {
        true
    }

    /// Longest strictly ascending chain of a single point's fact.
    fn height(&self, p: &Program) -> usize {
        p.vars.len() + 2
    }
}

/// Facts before and after every instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeFacts<F> {
    pub before: Vec<F>,
    pub after: Vec<F>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataflowError {
    #[error("instr {index}: fact changed {changes} times, exceeding height bound {bound} (non-monotone transfer?)")]
    Diverged {
        index: usize,
        changes: usize,
        bound: usize,
    },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolverConfig {
    /// Overrides [`LatticeSpec::height`] for the divergence guard.
    pub height_bound: Option<usize>,
}

struct Table<'a, S: LatticeSpec> {
    p: &'a Program,
    spec: &'a S,
    preds: Vec<Vec<usize>>,
    facts: LatticeFacts<S::Fact>,
    changes: Vec<usize>,
    bound: usize,
}

impl<'a, S: LatticeSpec> Table<'a, S> {
    fn new(p: &'a Program, spec: &'a S, cfg: SolverConfig) -> Self {
        let bottom = spec.bottom(p);
        Table {
            p,
            spec,
            preds: p.predecessors(),
            facts: LatticeFacts {
                before: vec![bottom.clone(); p.len()],
                after: vec![bottom; p.len()],
            },
            changes: vec![0; p.len()],
            bound: cfg.height_bound.unwrap_or_else(|| spec.height(p)),
        }
    }

    /// Recomputes both facts of `i` from its neighbours; reports whether they changed.
    fn update(&mut self, i: usize) -> Result<bool, DataflowError> {
        let (p, spec) = (self.p, self.spec);
        let (before, after) = match spec.direction() {
            Direction::Forward => {
                let mut acc = if i == 0 { spec.boundary(p) } else { spec.bottom(p) };
                for &q in &self.preds[i] {
                    if spec.edge_feasible(p, q, i, &self.facts.before[q]) {
                        acc = spec.join(&acc, &self.facts.after[q]);
                    }
                }
                let out = spec.transfer(p, i, &acc);
                (acc, out)
            }
            Direction::Backward => {
                let acc = if matches!(p.instrs[i], Instr::Halt) {
                    spec.boundary(p)
                } else {
                    p.successors(i)
                        .iter()
                        .fold(spec.bottom(p), |acc, &s| spec.join(&acc, &self.facts.before[s]))
                };
                let before = spec.transfer(p, i, &acc);
                (before, acc)
            }
        };
        if before == self.facts.before[i] && after == self.facts.after[i] {
            return Ok(false);
        }
        self.facts.before[i] = before;
        self.facts.after[i] = after;
        self.changes[i] += 1;
        if self.changes[i] > self.bound {
            return Err(DataflowError::Diverged {
                index: i,
                changes: self.changes[i],
                bound: self.bound,
            });
        }
        Ok(true)
    }

    fn order(&self) -> Vec<usize> {
        match self.spec.direction() {
            Direction::Forward => (0..self.p.len()).collect(),
            Direction::Backward => (0..self.p.len()).rev().collect(),
        }
    }

    fn dependents(&self, i: usize) -> Vec<usize> {
        match self.spec.direction() {
            Direction::Forward => self.p.successors(i).to_vec(),
            Direction::Backward => self.preds[i].clone(),
        }
    }
}

pub fn solve_worklist<S: LatticeSpec>(p: &Program, spec: &S) -> Result<LatticeFacts<S::Fact>, DataflowError> {
    solve_worklist_with(p, spec, SolverConfig::default())
}

pub fn solve_worklist_with<S: LatticeSpec>(
    p: &Program,
    spec: &S,
    cfg: SolverConfig,
) -> Result<LatticeFacts<S::Fact>, DataflowError> {
    let mut t = Table::new(p, spec, cfg);
    let mut queue: VecDeque<usize> = t.order().into();
    let mut queued = vec![true; p.len()];
    while let Some(i) = queue.pop_front() {
        queued[i] = false;
        if t.update(i)? {
            for d in t.dependents(i) {
                if !queued[d] {
                    queued[d] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    Ok(t.facts)
}

pub fn solve_roundrobin<S: LatticeSpec>(p: &Program, spec: &S) -> Result<LatticeFacts<S::Fact>, DataflowError> {
    solve_roundrobin_with(p, spec, SolverConfig::default())
}

pub fn solve_roundrobin_with<S: LatticeSpec>(
    p: &Program,
    spec: &S,
    cfg: SolverConfig,
) -> Result<LatticeFacts<S::Fact>, DataflowError> {
    let mut t = Table::new(p, spec, cfg);
    let order = t.order();
    loop {
        let mut changed = false;
        for &i in &order {
            changed |= t.update(i)?;
        }
        if !changed {
            return Ok(t.facts);
        }
    }
}

/// True when one more full sweep over `facts` changes nothing.
pub fn is_fixed_point<S: LatticeSpec>(p: &Program, spec: &S, facts: &LatticeFacts<S::Fact>) -> bool {
    let mut t = Table::new(p, spec, SolverConfig::default());
    t.facts = facts.clone();
    let order = t.order();
    for i in order {
        match t.update(i) {
            Ok(false) => {}
            _ => return false,
        }
    }
    true
}
