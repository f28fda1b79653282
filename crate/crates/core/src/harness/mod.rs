//! Driver-level plumbing: the credible-compilation pipeline, timing
//! statistics, random programs, certificate mutation and fuzzing.

mod bench;
mod fuzz;
mod mutate;
mod pipeline;
mod random;
mod stats;

pub use bench::{bench_kernel, bench_records, chk_dominates, render_table, BenchCell, BenchRecord, BenchRow, BENCH_PASSES};
pub use fuzz::{differential_inputs, diverges, fuzz, fuzz_with, FuzzConfig, FuzzReport};
pub use mutate::{mutate, mutate_cert, mutate_program, Mutation};
pub use pipeline::{pipeline, pipeline_with, Mode, PhaseTimings, PipelineRun, Stage};
pub use random::{gen_random_program, gen_with, GenConfig};
pub use stats::{trimmed, Summary};

/// Step budget used when none is given.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_FUEL`].
pub const FUEL_ENV: &str = "TACC_FUEL";

/// Default fuel, honouring `TACC_FUEL` when it holds a positive integer.
pub fn default_fuel() -> u64 {
    std::env::var(FUEL_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_FUEL)
}
