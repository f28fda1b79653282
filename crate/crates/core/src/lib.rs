//! Credible compilation middle-end: a three-address-code IR, an interpreter,
//! a generic dataflow engine, optimization passes that emit simulation
//! certificates, and an independent checker for those certificates.

pub mod cert;
pub mod dataflow;
pub mod fixtures;
pub mod frontend;
pub mod harness;
pub mod interp;
pub mod ir;
pub mod ops;
pub mod passes;

pub use cert::{check, gen_cert, parse_cert, print_cert, Certificate, Verdict};
pub use dataflow::{Direction, LatticeFacts, LatticeSpec};
pub use frontend::{compile_source, parse_tac, print_tac};
pub use interp::{run, Inputs, Outcome, Value};
pub use ir::{validate, BinOp, Cond, Instr, Literal, Operand, PointMap, Program, Type, UnOp, VarInfo};
pub use passes::{PassKind, PassResult};
