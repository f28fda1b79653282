//! Per-kernel opt/gen/chk timing breakdown.

use std::fmt::Write;

use serde::Serialize;

use super::pipeline::{pipeline, Mode};
use super::stats::{trimmed, Summary};
use crate::ir::Program;
use crate::passes::PassKind;

/// Passes timed per kernel, in pipeline order.
pub const BENCH_PASSES: [PassKind; 2] = [PassKind::Cp, PassKind::UceDae];

/// Timings of one pass on one kernel.
#[derive(Clone, Debug)]
pub struct BenchCell {
    pub pass: PassKind,
    /// The pass alone, without certificate work.
    pub plain: Summary,
    pub opt: Summary,
    pub gen: Summary,
    pub chk: Summary,
}

impl BenchCell {
    fn phases(&self) -> [(&'static str, &Summary); 4] {
        [("plain", &self.plain), ("opt", &self.opt), ("gen", &self.gen), ("chk", &self.chk)]
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub kernel: String,
    pub cells: Vec<BenchCell>,
}

/// Whether checking took longer on average than both optimizing and
/// generating the certificate.
pub fn chk_dominates(c: &BenchCell) -> bool {
    c.chk.mean_ms > c.opt.mean_ms && c.chk.mean_ms > c.gen.mean_ms
}

/// Runs the pipeline `reps` times per mode after one discarded warm-up run.
pub fn bench_kernel(kernel: &str, p: &Program, reps: usize) -> BenchRow {
    let n = BENCH_PASSES.len();
    let mut plain = vec![Vec::with_capacity(reps); n];
    let mut opt = vec![Vec::with_capacity(reps); n];
    let mut gen = vec![Vec::with_capacity(reps); n];
    let mut chk = vec![Vec::with_capacity(reps); n];
    pipeline(p, &BENCH_PASSES, Mode::Cc);
    for _ in 0..reps {
        let run = pipeline(p, &BENCH_PASSES, Mode::Cc);
        for (k, s) in run.stages.iter().enumerate() {
            opt[k].push(s.timings.opt);
            gen[k].push(s.timings.gen);
            chk[k].push(s.timings.chk);
        }
    }
    pipeline(p, &BENCH_PASSES, Mode::Plain);
    for _ in 0..reps {
        let run = pipeline(p, &BENCH_PASSES, Mode::Plain);
        for (k, s) in run.stages.iter().enumerate() {
            plain[k].push(s.timings.opt);
        }
    }
    let cells = BENCH_PASSES
        .iter()
        .enumerate()
        .map(|(k, &pass)| BenchCell {
            pass,
            plain: trimmed(&plain[k]),
            opt: trimmed(&opt[k]),
            gen: trimmed(&gen[k]),
            chk: trimmed(&chk[k]),
        })
        .collect();
    BenchRow {
        kernel: kernel.to_string(),
        cells,
    }
}

/// One machine-readable record per kernel, pass and phase.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub kernel: String,
    pub pass: String,
    pub phase: String,
    #[serde(flatten)]
    pub stats: Summary,
    /// Set on the `chk` record only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chk_dominates: Option<bool>,
}

pub fn bench_records(rows: &[BenchRow]) -> Vec<BenchRecord> {
    let mut out = Vec::new();
    for row in rows {
        for cell in &row.cells {
            for (phase, stats) in cell.phases() {
                out.push(BenchRecord {
                    kernel: row.kernel.clone(),
                    pass: cell.pass.name().to_string(),
                    phase: phase.to_string(),
                    stats: *stats,
                    chk_dominates: (phase == "chk").then(|| chk_dominates(cell)),
                });
            }
        }
    }
    out
}

/// Mean milliseconds per phase, followed by relative standard deviations.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let mut header = format!("{:<16}", "kernel");
    for pass in BENCH_PASSES {
        for phase in ["plain", "opt", "gen", "chk"] {
            header.push_str(&format!(" {:>11}", format!("{}.{phase}", pass.name())));
        }
    }
    for pass in BENCH_PASSES {
        header.push_str(&format!(" {:>13}", format!("{}.chk-dom", pass.name())));
    }
    for (title, pick) in [
        ("mean ms", (|s: &Summary| s.mean_ms) as fn(&Summary) -> f64),
        ("rsd %", |s: &Summary| s.rsd_pct),
    ] {
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "{header}");
        for row in rows {
            let _ = write!(out, "{:<16}", row.kernel);
            for cell in &row.cells {
                for (_, s) in cell.phases() {
                    let _ = write!(out, " {:>11.4}", pick(s));
                }
            }
            for cell in &row.cells {
                let _ = write!(out, " {:>13}", if chk_dominates(cell) { "yes" } else { "no" });
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn twenty_reps_retain_eighteen_per_cell() {
        let row = bench_kernel("p4", &fixtures::p4(), 20);
        assert_eq!(row.cells.len(), 2);
        for c in &row.cells {
            for (_, s) in c.phases() {
                assert_eq!((s.reps, s.retained), (20, 18));
            }
        }
    }

    #[test]
    fn records_carry_the_report_fields() {
        let rows = vec![bench_kernel("p4", &fixtures::p4(), 3)];
        let recs = bench_records(&rows);
        assert_eq!(recs.len(), 8);
        let json = serde_json::to_value(&recs[3]).unwrap();
        for key in ["mean_ms", "stddev_ms", "rsd_pct", "reps", "retained"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["phase"], "chk");
        assert!(json["chk_dominates"].is_boolean());
        assert!(render_table(&rows).contains("p4"));
    }
}
