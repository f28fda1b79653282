//! Pass pipeline with optional certificate generation and checking.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::cert::{check, gen_cert, Certificate, Verdict};
use crate::ir::Program;
use crate::passes::{PassKind, PassResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Generate and check a certificate for every pass; discard rejected output.
    Cc,
    /// Run the passes without certificates.
    Plain,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "cc" => Ok(Mode::Cc),
            "plain" => Ok(Mode::Plain),
            _ => Err(format!("unknown mode `{s}` (expected cc or plain)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cc => "cc",
            Mode::Plain => "plain",
        })
    }
}

/// Time spent in each phase of one pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub opt: Duration,
    pub gen: Duration,
    pub chk: Duration,
}

/// One pass application.
#[derive(Clone, Debug)]
pub struct Stage {
    pub pass: PassKind,
    /// `None` in plain mode.
    pub verdict: Option<Verdict>,
    pub cert: Option<Certificate>,
    pub timings: PhaseTimings,
    /// Wall time around the whole stage.
    pub wall: Duration,
    /// Program the pass ran on.
    pub input: Program,
    /// Program the pass produced, kept even when it was discarded.
    pub output: Program,
}

impl Stage {
    /// Whether the stage's output became the pipeline's current program.
    pub fn kept(&self) -> bool {
        self.verdict.as_ref().is_none_or(Verdict::is_accepted)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub program: Program,
    pub stages: Vec<Stage>,
}

impl PipelineRun {
    pub fn verdicts(&self) -> Vec<&Verdict> {
        self.stages.iter().filter_map(|s| s.verdict.as_ref()).collect()
    }

    pub fn all_accepted(&self) -> bool {
        self.stages.iter().all(Stage::kept)
    }
}

pub fn pipeline(p: &Program, passes: &[PassKind], mode: Mode) -> PipelineRun {
    pipeline_with(p, passes, mode, &gen_cert)
}

/// Like [`pipeline`] with a substitute certificate generator, used to inject
/// faulty generators.
pub fn pipeline_with(
    p: &Program,
    passes: &[PassKind],
    mode: Mode,
    generate: &dyn Fn(&PassResult) -> Certificate,
) -> PipelineRun {
    let mut current = p.clone();
    let mut stages = Vec::with_capacity(passes.len());
    for &pass in passes {
        let outer = Instant::now();
        let t = Instant::now();
        let r = pass.run(&current);
        let opt = t.elapsed();
        let (verdict, cert, gen, chk) = match mode {
            Mode::Plain => (None, None, Duration::ZERO, Duration::ZERO),
            Mode::Cc => {
                let t = Instant::now();
                let cert = generate(&r);
                let gen = t.elapsed();
                let t = Instant::now();
                let v = check(&r.before, &r.after, &cert);
                let chk = t.elapsed();
                (Some(v), Some(cert), gen, chk)
            }
        };
        let wall = outer.elapsed();
        let stage = Stage {
            pass,
            verdict,
            cert,
            timings: PhaseTimings { opt, gen, chk },
            wall,
            input: r.before,
            output: r.after,
        };
        if stage.kept() {
            current = stage.output.clone();
        }
        stages.push(stage);
    }
    PipelineRun {
        program: current,
        stages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::interp::{run, Outcome, Value};
    use crate::ir::Instr;

    #[test]
    fn p4_cc_pipeline_folds_and_prunes() {
        let p = fixtures::p4();
        let out = pipeline(&p, &[PassKind::Cp, PassKind::UceDae], Mode::Cc);
        assert!(out.verdicts().iter().all(|v| v.is_accepted()));
        assert_eq!(out.verdicts().len(), 2);
        let r = run(&out.program, &Default::default(), 1000).unwrap();
        assert_eq!(r, Outcome::Halted(vec![("z".into(), Value::int(7))]));
        assert_eq!(out.program.instrs.iter().filter(|i| matches!(i, Instr::Halt)).count(), 1);
    }

    #[test]
    fn plain_mode_has_no_verdicts() {
        let out = pipeline(&fixtures::p1(), &[PassKind::Uce], Mode::Plain);
        assert!(out.verdicts().is_empty());
        assert_eq!(out.stages.len(), 1);
        assert_eq!(out.stages[0].timings.gen, Duration::ZERO);
        assert_eq!(out.program.len(), 3);
    }

    #[test]
    fn rejected_pass_is_discarded() {
        let p = fixtures::p2();
        let broken = |r: &PassResult| {
            let mut c = gen_cert(r);
            for inv in c.entries.values_mut() {
                inv.insert(crate::cert::Atom::EqVar("d".into(), "d".into()));
            }
            c
        };
        let out = pipeline_with(&p, &[PassKind::Dae], Mode::Cc, &broken);
        assert!(!out.verdicts()[0].is_accepted());
        assert_eq!(out.program, p);
    }

    #[test]
    fn phases_fit_inside_the_stage() {
        let out = pipeline(&fixtures::p4(), &[PassKind::Cp, PassKind::UceDae], Mode::Cc);
        for s in &out.stages {
            let t = s.timings;
            assert!(t.opt + t.gen + t.chk <= s.wall);
        }
    }
}
