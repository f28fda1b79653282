//! Certificates relating a source program to its optimized target, their text
//! form, per-pass generators, and the checker.

mod check;
mod expr;
mod format;
mod gen;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use check::{check, check_with, CheckOptions, Reason, Verdict};
pub use expr::{simplify, Assumptions, Expr};
pub use format::{parse_cert, print_cert, CertParseError};
pub use gen::{diverged, gen_cert, gen_cert_cp, gen_cert_dae, gen_cert_uce, Divergence};

use crate::ir::{Literal, Program};

/// One relational fact between a source state and a target state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// Source scalar equals target scalar.
    EqVar(String, String),
    /// Source scalar holds a literal.
    ConstS(String, Literal),
    /// Target scalar holds a literal.
    ConstT(String, Literal),
    /// Source array equals target array element-wise.
    EqArr(String, String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::EqVar(a, b) => write!(f, "eq {a} {b}"),
            Atom::ConstS(x, l) => write!(f, "consts {x} {}", format::lit_text(l)),
            Atom::ConstT(x, l) => write!(f, "constt {x} {}", format::lit_text(l)),
            Atom::EqArr(a, b) => write!(f, "eqarr {a} {b}"),
        }
    }
}

pub type Invariant = BTreeSet<Atom>;

/// Every scalar equated with itself and every array with itself.
pub fn identity_invariant(p: &Program) -> Invariant {
    p.vars
        .iter()
        .map(|(n, v)| {
            if v.ty.is_array() {
                Atom::EqArr(n.clone(), n.clone())
            } else {
                Atom::EqVar(n.clone(), n.clone())
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// `(source point, target point)` to the invariant holding there.
    pub entries: BTreeMap<(usize, usize), Invariant>,
    /// Most source steps matched against one target step.
    pub stutter: usize,
    /// Content hashes of the programs the certificate was generated for.
    pub programs: Option<(String, String)>,
}

impl Certificate {
    pub fn new(stutter: usize) -> Certificate {
        Certificate {
            entries: BTreeMap::new(),
            stutter,
            programs: None,
        }
    }

    /// Source point paired with target point `t`, if any.
    pub fn source_of(&self, t: usize) -> Option<usize> {
        self.entries.keys().find(|k| k.1 == t).map(|k| k.0)
    }

    /// Records the content hashes of `src` and `tgt` in the header.
    pub fn bind(mut self, src: &Program, tgt: &Program) -> Certificate {
        use crate::frontend::content_hash;
        self.programs = Some((content_hash(src), content_hash(tgt)));
        self
    }
}
