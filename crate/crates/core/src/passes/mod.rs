//! Optimization passes. Each pass returns a [`PassResult`] carrying the
//! transformed program, the source-to-target point map, and the analysis facts
//! the matching certificate generator needs.

mod cp;
mod dae;
mod uce;
mod varset;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use cp::{cp, cp_analyze, fold_instr, ConstEnv, ConstProp, ConstVal};
pub use dae::{dae_fixpoint, dae_once, is_removable, liveness, live_names, uce_dae, DeadFacts, Liveness};
pub use uce::{reachable, uce};
pub use varset::VarSet;

use crate::dataflow::LatticeFacts;
use crate::ir::{PointMap, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PassKind {
    Uce,
    DaeOnce,
    Dae,
    UceDae,
    Cp,
}

impl PassKind {
    pub fn name(self) -> &'static str {
        match self {
            PassKind::Uce => "uce",
            PassKind::DaeOnce => "dae-once",
            PassKind::Dae => "dae",
            PassKind::UceDae => "uce-dae",
            PassKind::Cp => "cp",
        }
    }

    pub fn run(self, p: &Program) -> PassResult {
        match self {
            PassKind::Uce => uce(p),
            PassKind::DaeOnce => dae_once(p),
            PassKind::Dae => dae_fixpoint(p),
            PassKind::UceDae => uce_dae(p),
            PassKind::Cp => cp(p),
        }
    }
}

impl fmt::Display for PassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PassKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uce" => Ok(PassKind::Uce),
            "dae-once" => Ok(PassKind::DaeOnce),
            "dae" => Ok(PassKind::Dae),
            "uce-dae" | "uce_dae" => Ok(PassKind::UceDae),
            "cp" => Ok(PassKind::Cp),
            other => Err(format!("unknown pass `{other}` (expected cp, uce-dae, uce, dae, dae-once)")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PassFacts {
    Reachable(BTreeSet<usize>),
    Dead(DeadFacts),
    Constants(LatticeFacts<ConstEnv>),
}

#[derive(Clone, Debug)]
pub struct PassResult {
    pub pass: PassKind,
    pub before: Program,
    pub after: Program,
    /// Surviving source points to their target positions.
    pub point_map: PointMap,
    pub facts: PassFacts,
}

impl PassResult {
    /// True when the pass left the program untouched.
    pub fn is_identity(&self) -> bool {
        self.before == self.after
    }
}
