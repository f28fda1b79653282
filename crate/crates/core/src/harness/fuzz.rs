//! Differential fuzzing of the passes, generators and checker.
//!
//! Each trial generates a program, runs a random pass, checks the honest
//! certificate, then mutates the result. An accepted mutant is run against
//! the source on a batch of inputs; any observable difference is a soundness
//! violation of the checker.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::mutate::mutate;
use super::random::{gen_with, GenConfig};
use crate::cert::{check_with, gen_cert, CheckOptions};
use crate::interp::{run, Inputs, Outcome, Value};
use crate::ir::{BinOp, Instr, Literal, Operand, Program, Type};
use crate::passes::{cp, PassKind};

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    /// Inputs each accepted mutant is run on.
    pub inputs_per_trial: usize,
    pub fuel: u64,
    pub check: CheckOptions,
    pub gen: GenConfig,
    /// Replace the mutation step by a constant propagator that folds
    /// division by zero to zero. Paired with a checker that ignores faults,
    /// this is the known-broken build the fuzzer must flag.
    pub broken_cp: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 100,
            seed: 0,
            inputs_per_trial: 50,
            fuel: super::DEFAULT_FUEL,
            check: CheckOptions::default(),
            gen: GenConfig::default(),
            broken_cp: false,
        }
    }
}

/// Outcome counts. The three mutant counters partition `trials`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzReport {
    pub trials: usize,
    pub accepted_honest: usize,
    pub rejected_honest: usize,
    pub rejected_mutant: usize,
    pub accepted_mutant_equivalent: usize,
    pub soundness_violations: usize,
    /// Descriptions of the first few honest rejections and violations.
    pub failures: Vec<String>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.soundness_violations == 0 && self.rejected_honest == 0
    }

    fn note(&mut self, msg: String) {
        if self.failures.len() < 10 {
            self.failures.push(msg);
        }
    }
}

const FUZZ_PASSES: [PassKind; 5] = [PassKind::Uce, PassKind::DaeOnce, PassKind::Dae, PassKind::UceDae, PassKind::Cp];

pub fn fuzz(trials: usize, seed: u64) -> FuzzReport {
    fuzz_with(&FuzzConfig {
        trials,
        seed,
        ..FuzzConfig::default()
    })
}

pub fn fuzz_with(cfg: &FuzzConfig) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = FuzzReport {
        trials: cfg.trials,
        ..FuzzReport::default()
    };
    for trial in 0..cfg.trials {
        let pseed: u64 = rng.gen();
        let size = rng.gen_range(4..=48);
        let p = gen_with(
            pseed,
            &GenConfig {
                size,
                ..cfg.gen.clone()
            },
        );
        let pass = if cfg.broken_cp {
            PassKind::Cp
        } else {
            *FUZZ_PASSES.choose(&mut rng).unwrap()
        };
        let r = pass.run(&p);
        let cert = gen_cert(&r);
        let honest = check_with(&r.before, &r.after, &cert, cfg.check);
        if honest.is_accepted() {
            report.accepted_honest += 1;
        } else {
            report.rejected_honest += 1;
            report.note(format!("trial {trial}: honest {} rejected on seed {pseed}: {honest}", pass.name()));
        }
        let mseed: u64 = rng.gen();
        let (tgt, what) = if cfg.broken_cp {
            (fold_division_by_zero(&r.after), "broken cp".to_string())
        } else {
            match mutate(&r, &cert, mseed) {
                Some((r2, c2, m)) => {
                    if !check_with(&r2.before, &r2.after, &c2, cfg.check).is_accepted() {
                        report.rejected_mutant += 1;
                        continue;
                    }
                    (r2.after, m.to_string())
                }
                None => (r.after.clone(), "no mutation site".to_string()),
            }
        };
        if cfg.broken_cp {
            let broken_cert = gen_cert(&crate::passes::PassResult {
                after: tgt.clone(),
                ..cp(&p)
            });
            if !check_with(&p, &tgt, &broken_cert, cfg.check).is_accepted() {
                report.rejected_mutant += 1;
                continue;
            }
        }
        let inputs = differential_inputs(&p, cfg.inputs_per_trial, mseed);
        match inputs.iter().find(|i| diverges(&p, &tgt, i, cfg.fuel)) {
            Some(i) => {
                report.soundness_violations += 1;
                report.note(format!(
                    "trial {trial}: accepted {what} diverges on program seed {pseed} with {}",
                    show_inputs(i)
                ));
            }
            None => report.accepted_mutant_equivalent += 1,
        }
    }
    report
}

/// Whether `src` and `tgt` are observably different on `inputs`. A run that
/// only one side finishes within `fuel` is retried with more fuel before it
/// counts.
pub fn diverges(src: &Program, tgt: &Program, inputs: &Inputs, fuel: u64) -> bool {
    let go = |p: &Program, f: u64| run(p, inputs, f).expect("inputs match the interface");
    let (a, b) = (go(src, fuel), go(tgt, fuel));
    if a.equivalent(&b) {
        return false;
    }
    if matches!(a, Outcome::OutOfFuel) || matches!(b, Outcome::OutOfFuel) {
        let more = fuel.saturating_mul(8);
        return !go(src, more).equivalent(&go(tgt, more));
    }
    true
}

/// `n` input assignments for `p`: all zeros first, then seeded values with
/// a bias toward small integers and special floats.
pub fn differential_inputs(p: &Program, n: usize, seed: u64) -> Vec<Inputs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut inputs = BTreeMap::new();
        for (name, info) in p.inputs() {
            let value = if info.ty.is_array() {
                let items = (0..info.len.unwrap_or(0))
                    .map(|_| random_lit(info.ty.elem(), k, &mut rng))
                    .collect();
                Value::Array(info.ty.elem(), items)
            } else {
                Value::Scalar(random_lit(info.ty, k, &mut rng))
            };
            inputs.insert(name.to_string(), value);
        }
        out.push(inputs);
    }
    out
}

fn random_lit(ty: Type, k: usize, rng: &mut ChaCha8Rng) -> Literal {
    if k == 0 {
        return Literal::zero(ty);
    }
    match ty {
        Type::Int => Literal::Int(match rng.gen_range(0..10) {
            0 => *[i64::MIN, i64::MAX, -1, 7919].choose(rng).unwrap(),
            1..=3 => rng.gen_range(-1000..=1000),
            _ => rng.gen_range(-10..=10),
        }),
        Type::Float => Literal::float(match rng.gen_range(0..10) {
            0 => *[-0.0, f64::NAN, f64::INFINITY, 1e300].choose(rng).unwrap(),
            _ => rng.gen_range(-10.0..10.0),
        }),
        _ => Literal::Bool(rng.gen()),
    }
}

fn show_inputs(i: &Inputs) -> String {
    i.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// The deliberate bug: `x := y / 0` becomes `x := 0`.
fn fold_division_by_zero(p: &Program) -> Program {
    let mut out = p.clone();
    for ins in &mut out.instrs {
        if let Instr::Bin {
            dst,
            op: BinOp::Div | BinOp::Mod,
            rhs: Operand::Lit(l),
            ..
        } = ins
        {
            if l.is_zero() {
                *ins = Instr::Copy {
                    dst: dst.clone(),
                    src: Operand::Lit(Literal::zero(l.ty())),
                };
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_clean() {
        let r = fuzz(60, 7);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.accepted_honest, 60);
        assert_eq!(r.rejected_mutant + r.accepted_mutant_equivalent + r.soundness_violations, r.trials);
    }

    #[test]
    fn fast_path_does_not_change_verdicts() {
        let slow = FuzzConfig {
            trials: 40,
            seed: 3,
            check: CheckOptions {
                fast_path: false,
                fault_guards: true,
            },
            ..FuzzConfig::default()
        };
        let fast = FuzzConfig {
            check: CheckOptions::default(),
            ..slow.clone()
        };
        assert_eq!(fuzz_with(&slow), fuzz_with(&fast));
    }

    #[test]
    fn differential_inputs_cover_the_interface() {
        let p = crate::harness::gen_random_program(1, 10);
        let ins = differential_inputs(&p, 50, 1);
        assert_eq!(ins.len(), 50);
        for i in &ins {
            assert!(run(&p, i, 1000).is_ok());
        }
    }
}
