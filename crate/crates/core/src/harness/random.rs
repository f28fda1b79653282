//! Seeded random TAC programs for fuzzing and property tests.
//!
//! Programs are built from structured pieces (straight-line code, if/else,
//! counted loops) plus the awkward shapes the checker must handle: guarded
//! self loops, branches whose arms coincide, and regions jumped over. Every
//! back edge is controlled by a dedicated counter, so programs halt unless a
//! fault or an improbable input sends them into a self loop.

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ir::{BinOp, Cond, Instr, Literal, Operand, Program, Type, UnOp, VarInfo};

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Approximate instruction count; at least 2.
    pub size: usize,
    pub branch_rate: f64,
    pub loop_rate: f64,
    pub array_rate: f64,
    pub self_loop_rate: f64,
    pub equal_arms_rate: f64,
    pub unreachable_rate: f64,
    /// Share of integer divisions and array indices that use an unchecked
    /// variable and so may fault.
    pub risky_rate: f64,
    pub max_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            size: 24,
            branch_rate: 0.12,
            loop_rate: 0.08,
            array_rate: 0.12,
            self_loop_rate: 0.03,
            equal_arms_rate: 0.05,
            unreachable_rate: 0.06,
            risky_rate: 0.02,
            max_depth: 2,
        }
    }
}

/// Random program of roughly `size` instructions; identical for equal seeds.
pub fn gen_random_program(seed: u64, size: usize) -> Program {
    gen_with(
        seed,
        &GenConfig {
            size,
            ..GenConfig::default()
        },
    )
}

const INTS: [&str; 4] = ["v0", "v1", "v2", "v3"];
const FLOATS: [&str; 2] = ["g0", "g1"];
const BOOLS: [&str; 2] = ["q0", "q1"];
const ARR_LEN: usize = 4;
/// Input value that guards reachable self loops.
const TRAP: i64 = 7919;

pub fn gen_with(seed: u64, cfg: &GenConfig) -> Program {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        cfg,
        instrs: Vec::new(),
        counters: 0,
    };
    let budget = cfg.size.max(2);
    g.block(budget.saturating_sub(4), 0);
    g.epilogue();
    g.instrs.push(Instr::Halt);
    let mut vars = IndexMap::new();
    vars.insert("a".to_string(), VarInfo::scalar(Type::Int).input());
    vars.insert("b".to_string(), VarInfo::scalar(Type::Int).input());
    vars.insert("f".to_string(), VarInfo::scalar(Type::Float).input());
    vars.insert("c".to_string(), VarInfo::scalar(Type::Bool).input());
    vars.insert("A".to_string(), VarInfo::array(Type::Int, ARR_LEN).input().output());
    for v in INTS {
        vars.insert(v.to_string(), VarInfo::scalar(Type::Int));
    }
    for v in FLOATS {
        vars.insert(v.to_string(), VarInfo::scalar(Type::Float));
    }
    for v in BOOLS {
        vars.insert(v.to_string(), VarInfo::scalar(Type::Bool));
    }
    vars.insert("B".to_string(), VarInfo::array(Type::Float, 3));
    for k in 0..g.counters {
        vars.insert(format!("k{k}"), VarInfo::scalar(Type::Int));
    }
    vars.insert("o".to_string(), VarInfo::scalar(Type::Int).output());
    vars.insert("h".to_string(), VarInfo::scalar(Type::Float).output());
    vars.insert("r".to_string(), VarInfo::scalar(Type::Bool).output());
    Program::new(vars, g.instrs)
}

struct Gen<'c> {
    rng: ChaCha8Rng,
    cfg: &'c GenConfig,
    instrs: Vec<Instr>,
    counters: usize,
}

impl Gen<'_> {
    fn pc(&self) -> usize {
        self.instrs.len()
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs.choose(&mut self.rng).copied().expect("non-empty")
    }

    /// Emits code until about `budget` instructions have been added.
    fn block(&mut self, budget: usize, depth: usize) {
        let end = self.pc() + budget;
        while self.pc() < end {
            let left = end - self.pc();
            let nested = depth < self.cfg.max_depth && left >= 6;
            let roll: f64 = self.rng.gen();
            let mut acc = 0.0;
            let mut hit = |rate: f64| {
                acc += rate;
                roll < acc
            };
            if nested && hit(self.cfg.branch_rate) {
                self.if_else(left.min(12), depth);
            } else if nested && hit(self.cfg.loop_rate) {
                self.counted_loop(left.min(10), depth);
            } else if hit(self.cfg.array_rate) {
                self.array_op();
            } else if hit(self.cfg.self_loop_rate) {
                self.guarded_self_loop();
            } else if hit(self.cfg.equal_arms_rate) {
                let c = self.cond();
                let next = self.pc() + 1;
                self.instrs.push(Instr::CondGoto {
                    cond: c,
                    then_to: next,
                    else_to: next,
                });
            } else if left >= 3 && hit(self.cfg.unreachable_rate) {
                self.skipped_region(left.min(5));
            } else {
                self.assign();
            }
        }
    }

    fn int_operand(&mut self) -> Operand {
        if self.chance(0.6) {
            Operand::var(self.pick(&["a", "b", "v0", "v1", "v2", "v3"]))
        } else {
            Operand::Lit(Literal::Int(self.rng.gen_range(-9..=9)))
        }
    }

    fn nonzero_int(&mut self) -> Operand {
        let n: i64 = self.rng.gen_range(1..=5);
        Operand::Lit(Literal::Int(if self.chance(0.3) { -n } else { n }))
    }

    fn float_operand(&mut self) -> Operand {
        if self.chance(0.6) {
            Operand::var(self.pick(&["f", "g0", "g1"]))
        } else {
            let xs = [0.0, 0.5, 1.0, -2.0, 3.25, 10.0];
            Operand::Lit(Literal::float(*xs.choose(&mut self.rng).unwrap()))
        }
    }

    fn bool_operand(&mut self) -> Operand {
        if self.chance(0.75) {
            Operand::var(self.pick(&["c", "q0", "q1"]))
        } else {
            Operand::Lit(Literal::Bool(self.rng.gen()))
        }
    }

    fn cond(&mut self) -> Cond {
        match self.rng.gen_range(0..4) {
            0 => Cond::Operand(self.bool_operand()),
            1 => Cond::Not(self.bool_operand()),
            2 => {
                let op = *[BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne]
                    .choose(&mut self.rng)
                    .unwrap();
                Cond::Bin(op, self.int_operand(), self.int_operand())
            }
            _ => {
                let op = *[BinOp::Lt, BinOp::Ge].choose(&mut self.rng).unwrap();
                Cond::Bin(op, self.float_operand(), self.float_operand())
            }
        }
    }

    fn assign(&mut self) {
        match self.rng.gen_range(0..10) {
            0..=4 => self.int_assign(),
            5..=7 => self.float_assign(),
            _ => self.bool_assign(),
        }
    }

    fn int_assign(&mut self) {
        let dst = self.pick(&["v0", "v1", "v2", "v3", "v0", "v1", "o", "b"]).to_string();
        let ins = match self.rng.gen_range(0..10) {
            0 => Instr::Copy {
                dst,
                src: self.int_operand(),
            },
            1 => Instr::Un {
                dst,
                op: UnOp::Neg,
                arg: self.int_operand(),
            },
            2 => {
                let op = if self.chance(0.5) { BinOp::Div } else { BinOp::Mod };
                let rhs = if self.chance(self.cfg.risky_rate * 5.0) {
                    self.int_operand()
                } else {
                    self.nonzero_int()
                };
                Instr::Bin {
                    dst,
                    op,
                    lhs: self.int_operand(),
                    rhs,
                }
            }
            _ => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul].choose(&mut self.rng).unwrap();
                Instr::Bin {
                    dst,
                    op,
                    lhs: self.int_operand(),
                    rhs: self.int_operand(),
                }
            }
        };
        self.instrs.push(ins);
    }

    fn float_assign(&mut self) {
        let dst = self.pick(&["g0", "g1", "g0", "h"]).to_string();
        let ins = match self.rng.gen_range(0..8) {
            0 => Instr::Un {
                dst,
                op: UnOp::IntToFloat,
                arg: self.int_operand(),
            },
            1 => Instr::Un {
                dst,
                op: UnOp::Neg,
                arg: self.float_operand(),
            },
            2 => Instr::Copy {
                dst,
                src: self.float_operand(),
            },
            _ => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Add]
                    .choose(&mut self.rng)
                    .unwrap();
                Instr::Bin {
                    dst,
                    op,
                    lhs: self.float_operand(),
                    rhs: self.float_operand(),
                }
            }
        };
        self.instrs.push(ins);
    }

    fn bool_assign(&mut self) {
        let dst = self.pick(&["q0", "q1", "r"]).to_string();
        let ins = match self.rng.gen_range(0..5) {
            0 => Instr::Un {
                dst,
                op: UnOp::Not,
                arg: self.bool_operand(),
            },
            1 => {
                let op = *[BinOp::And, BinOp::Or, BinOp::Eq].choose(&mut self.rng).unwrap();
                Instr::Bin {
                    dst,
                    op,
                    lhs: self.bool_operand(),
                    rhs: self.bool_operand(),
                }
            }
            _ => {
                let op = *[BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne].choose(&mut self.rng).unwrap();
                Instr::Bin {
                    dst,
                    op,
                    lhs: self.int_operand(),
                    rhs: self.int_operand(),
                }
            }
        };
        self.instrs.push(ins);
    }

    fn index(&mut self, len: usize) -> Operand {
        if self.chance(self.cfg.risky_rate * 2.0) {
            self.int_operand()
        } else {
            Operand::Lit(Literal::Int(self.rng.gen_range(0..len as i64)))
        }
    }

    fn array_op(&mut self) {
        let ins = match self.rng.gen_range(0..4) {
            0 => Instr::Load {
                dst: self.pick(&["v0", "v1", "v2", "v3", "o"]).to_string(),
                arr: "A".into(),
                idx: self.index(ARR_LEN),
            },
            1 => Instr::Store {
                arr: "A".into(),
                idx: self.index(ARR_LEN),
                src: self.int_operand(),
            },
            2 => Instr::Load {
                dst: self.pick(&["g0", "g1", "h"]).to_string(),
                arr: "B".into(),
                idx: self.index(3),
            },
            _ => Instr::Store {
                arr: "B".into(),
                idx: self.index(3),
                src: self.float_operand(),
            },
        };
        self.instrs.push(ins);
    }

    /// `if c goto T else E; E: ...; goto J; T: ...; J:`
    fn if_else(&mut self, budget: usize, depth: usize) {
        let c = self.cond();
        let head = self.pc();
        self.instrs.push(Instr::Halt);
        let else_start = self.pc();
        let arm = (budget.saturating_sub(2) / 2).max(1);
        self.block(arm, depth + 1);
        let jump = self.pc();
        self.instrs.push(Instr::Halt);
        let then_start = self.pc();
        if self.chance(0.8) {
            self.block(arm, depth + 1);
        }
        let join = self.pc();
        self.instrs[head] = Instr::CondGoto {
            cond: c,
            then_to: then_start,
            else_to: else_start,
        };
        self.instrs[jump] = Instr::Goto(join);
    }

    /// A loop whose back edge is governed by a fresh counter running from 0
    /// to a small literal bound. Either test-at-top or test-at-bottom.
    fn counted_loop(&mut self, budget: usize, depth: usize) {
        let k = format!("k{}", self.counters);
        self.counters += 1;
        let bound = Operand::Lit(Literal::Int(self.rng.gen_range(1..=4)));
        let kv = Operand::var(k.clone());
        self.instrs.push(Instr::Copy {
            dst: k.clone(),
            src: Operand::Lit(Literal::Int(0)),
        });
        let step = Instr::Bin {
            dst: k.clone(),
            op: BinOp::Add,
            lhs: kv.clone(),
            rhs: Operand::Lit(Literal::Int(1)),
        };
        let body = budget.saturating_sub(4).max(1);
        if self.chance(0.5) {
            let head = self.pc();
            self.instrs.push(Instr::Halt);
            self.block(body, depth + 1);
            self.instrs.push(step);
            self.instrs.push(Instr::Goto(head));
            let exit = self.pc();
            self.instrs[head] = Instr::CondGoto {
                cond: Cond::Bin(BinOp::Lt, kv, bound),
                then_to: head + 1,
                else_to: exit,
            };
        } else {
            let top = self.pc();
            self.block(body, depth + 1);
            self.instrs.push(step);
            let next = self.pc() + 1;
            self.instrs.push(Instr::CondGoto {
                cond: Cond::Bin(BinOp::Lt, kv, bound),
                then_to: top,
                else_to: next,
            });
        }
    }

    /// `if a == TRAP goto L else L+1; L: goto L`
    fn guarded_self_loop(&mut self) {
        let at = self.pc();
        self.instrs.push(Instr::CondGoto {
            cond: Cond::Bin(BinOp::Eq, Operand::var("a"), Operand::Lit(Literal::Int(TRAP))),
            then_to: at + 1,
            else_to: at + 2,
        });
        self.instrs.push(Instr::Goto(at + 1));
    }

    /// `goto J; <dead code>; J:`
    fn skipped_region(&mut self, budget: usize) {
        let jump = self.pc();
        self.instrs.push(Instr::Halt);
        for _ in 0..budget.saturating_sub(1).max(1) {
            if self.chance(0.2) {
                let here = self.pc();
                self.instrs.push(Instr::Goto(here));
            } else {
                self.assign();
            }
        }
        let join = self.pc();
        self.instrs[jump] = Instr::Goto(join);
    }

    /// Folds a few locals into the outputs so that not everything is dead.
    fn epilogue(&mut self) {
        let (x, y) = (self.pick(&INTS), self.pick(&INTS));
        self.instrs.push(Instr::Bin {
            dst: "o".into(),
            op: BinOp::Add,
            lhs: Operand::var("o"),
            rhs: Operand::var(x),
        });
        self.instrs.push(Instr::Bin {
            dst: "o".into(),
            op: BinOp::Sub,
            lhs: Operand::var("o"),
            rhs: Operand::var(y),
        });
        let g = self.pick(&FLOATS);
        self.instrs.push(Instr::Bin {
            dst: "h".into(),
            op: BinOp::Add,
            lhs: Operand::var("h"),
            rhs: Operand::var(g),
        });
        let q = self.pick(&BOOLS);
        self.instrs.push(Instr::Bin {
            dst: "r".into(),
            op: BinOp::Or,
            lhs: Operand::var("r"),
            rhs: Operand::var(q),
        });
    }
}
