//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every line is printed even
//! when all criteria pass.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tacc_core::cert::{check, gen_cert, parse_cert, print_cert, CheckOptions};
use tacc_core::dataflow::{solve_roundrobin, solve_worklist};
use tacc_core::fixtures;
use tacc_core::frontend::{compile_source, parse_tac, print_tac};
use tacc_core::harness::{
    bench_kernel, bench_records, chk_dominates, differential_inputs, diverges, fuzz, fuzz_with, gen_random_program,
    mutate_program, pipeline, FuzzConfig, Mode, Mutation, DEFAULT_FUEL,
};
use tacc_core::interp::{run, Outcome, Value};
use tacc_core::passes::{cp, dae_fixpoint, is_removable, liveness, reachable, uce_dae, ConstProp, Liveness};
use tacc_core::{PassKind, Program};

/// Passes every honest certificate must be accepted for.
const HONEST: [PassKind; 4] = [PassKind::Uce, PassKind::Dae, PassKind::UceDae, PassKind::Cp];

struct Line {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Line {
    Line {
        pass,
        detail: detail.into(),
    }
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn kernels() -> Vec<(String, Program)> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "knl"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let name = f.file_stem().unwrap().to_string_lossy().into_owned();
            let p = compile_source(&fs::read_to_string(&f).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, p)
        })
        .collect()
}

fn random_size(seed: u64) -> usize {
    4 + (seed as usize * 7) % 57
}

fn honest_completeness() -> Line {
    let started = Instant::now();
    let ks = kernels();
    let mut checked = 0;
    let mut rejected = Vec::new();
    let programs = ks
        .iter()
        .map(|(n, p)| (n.clone(), p.clone()))
        .chain((0..1000u64).map(|s| (format!("random seed {s}"), gen_random_program(s, random_size(s)))));
    for (name, p) in programs {
        for kind in HONEST {
            let r = kind.run(&p);
            let v = check(&r.before, &r.after, &gen_cert(&r));
            checked += 1;
            if !v.is_accepted() {
                rejected.push(format!("{name} {kind}: {v}"));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    verdict(
        rejected.is_empty() && ks.len() >= 10 && secs < 300.0,
        format!(
            "{}/{checked} honest certificates accepted over {} kernels and 1000 random programs in {secs:.1}s{}",
            checked - rejected.len(),
            ks.len(),
            rejected.first().map(|r| format!("; first rejection: {r}")).unwrap_or_default()
        ),
    )
}

fn checker_soundness() -> Line {
    let report = fuzz(1000, 20_240_601);
    let canary = fuzz_with(&FuzzConfig {
        trials: 300,
        seed: 5,
        check: CheckOptions {
            fast_path: true,
            fault_guards: false,
        },
        broken_cp: true,
        gen: tacc_core::harness::GenConfig {
            risky_rate: 0.2,
            ..Default::default()
        },
        ..FuzzConfig::default()
    });
    let partition = report.rejected_mutant + report.accepted_mutant_equivalent + report.soundness_violations;
    verdict(
        report.soundness_violations == 0
            && report.accepted_honest == 1000
            && partition == report.trials
            && canary.soundness_violations > 0,
        format!(
            "1000 trials: {} honest accepted, {} mutants rejected, {} accepted but equivalent, {} violations; broken-build canary flagged {} violations",
            report.accepted_honest,
            report.rejected_mutant,
            report.accepted_mutant_equivalent,
            report.soundness_violations,
            canary.soundness_violations
        ),
    )
}

fn mutation_sensitivity() -> Line {
    let mut mutants = 0;
    let mut rejected = 0;
    let mut violations = Vec::new();
    let mut seed = 0u64;
    while mutants < 500 {
        seed += 1;
        let p = gen_random_program(seed, 12 + (seed as usize % 30));
        let kind = HONEST[seed as usize % HONEST.len()];
        let r = kind.run(&p);
        let cert = gen_cert(&r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some((tgt, m)) = mutate_program(&r.after, &mut rng) else {
            continue;
        };
        if !matches!(m, Mutation::ChangeLiteral { .. } | Mutation::RetargetBranch { .. }) {
            continue;
        }
        mutants += 1;
        if !check(&p, &tgt, &cert).is_accepted() {
            rejected += 1;
            continue;
        }
        if differential_inputs(&p, 50, seed)
            .iter()
            .any(|i| diverges(&p, &tgt, i, DEFAULT_FUEL))
        {
            violations.push(format!("seed {seed} {kind}: {m}"));
        }
    }
    let pct = 100.0 * rejected as f64 / mutants as f64;
    verdict(
        violations.is_empty() && pct >= 80.0,
        format!(
            "{rejected}/{mutants} literal and branch mutants rejected ({pct:.1}%), {} accepted mutants diverge{}",
            violations.len(),
            violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

fn regression_pair() -> Line {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, p) in [("self loop", fixtures::p5()), ("both arms to next", fixtures::p6())] {
        for kind in HONEST {
            let r = kind.run(&p);
            let v = check(&r.before, &r.after, &gen_cert(&r));
            ok &= v.is_accepted();
            if !v.is_accepted() {
                notes.push(format!("{name} {kind}: {v}"));
            }
        }
    }
    verdict(
        ok,
        if ok {
            "trivial self loop and both-arms-to-next certificates accepted under every pass".to_string()
        } else {
            notes.join("; ")
        },
    )
}

fn closure(p: &Program) -> BTreeSet<usize> {
    let n = p.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        for s in p.successors(i) {
            row[s] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    (0..n).filter(|&j| j == 0 || reach[0][j]).collect()
}

fn pass_oracles() -> Line {
    let mut failures = Vec::new();
    for s in 0..500u64 {
        let p = gen_random_program(s, random_size(s));
        if reachable(&p) != closure(&p) {
            failures.push(format!("reachable differs from closure on seed {s}"));
        }
        let d = dae_fixpoint(&p).after;
        let live = liveness(&d);
        for (i, ins) in d.instrs.iter().enumerate() {
            if let Some(dst) = ins.dst() {
                let k = d.vars.get_index_of(dst).unwrap();
                if is_removable(ins) && !live.after[i].contains(k) {
                    failures.push(format!("dead assignment survives at {i} on seed {s}"));
                }
            }
        }
        let once = cp(&p).after;
        if cp(&once).after != once {
            failures.push(format!("cp not idempotent on seed {s}"));
        }
    }
    for s in 0..200u64 {
        let p = gen_random_program(1000 + s, random_size(s));
        let (a, b) = (
            solve_worklist(&p, &Liveness).unwrap(),
            solve_roundrobin(&p, &Liveness).unwrap(),
        );
        if a != b {
            failures.push(format!("liveness strategies differ on seed {}", 1000 + s));
        }
        let (a, b) = (
            solve_worklist(&p, &ConstProp).unwrap(),
            solve_roundrobin(&p, &ConstProp).unwrap(),
        );
        if a != b {
            failures.push(format!("constant strategies differ on seed {}", 1000 + s));
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "reachability matches closure (500), no dead pure assignment after dae, cp idempotent, worklist equals round-robin on both lattices (200)".to_string()
        } else {
            format!("{} failures; first: {}", failures.len(), failures[0])
        },
    )
}

fn p4_end_to_end() -> Line {
    let p = fixtures::p4();
    let out = pipeline(&p, &[PassKind::Cp, PassKind::UceDae], Mode::Cc);
    let accepted = out.verdicts().len() == 2 && out.verdicts().iter().all(|v| v.is_accepted());
    let outcome = run(&out.program, &Default::default(), DEFAULT_FUEL).unwrap();
    let want = Outcome::Halted(vec![("z".into(), Value::int(7))]);
    let pruned = uce_dae(&cp(&p).after);
    let removed = !pruned.point_map.contains_key(&3) && !reachable(&cp(&p).after).contains(&3);
    verdict(
        accepted && outcome == want && removed,
        format!(
            "verdicts [{}], final run {outcome}, instruction 3 {}",
            out.verdicts().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
            if removed { "removed as unreachable" } else { "still present" }
        ),
    )
}

fn timing_breakdown_shape() -> Line {
    let ks = kernels();
    let rows: Vec<_> = ks.iter().map(|(n, p)| bench_kernel(n, p, 5)).collect();
    let cells: Vec<_> = rows.iter().flat_map(|r| r.cells.iter()).collect();
    let dominated = cells.iter().filter(|c| chk_dominates(c)).count();
    let structured = rows.len() == ks.len()
        && rows.iter().all(|r| r.cells.len() == 2)
        && bench_records(&rows).len() == rows.len() * 2 * 4;
    verdict(
        structured,
        format!(
            "opt/gen/chk breakdown for {} kernels; chk dominates opt and gen in {dominated}/{} cells (observation only)",
            rows.len(),
            cells.len()
        ),
    )
}

fn statistics_protocol() -> Line {
    let (name, p) = kernels().into_iter().next().unwrap();
    let row = bench_kernel(&name, &p, 20);
    let records = bench_records(std::slice::from_ref(&row));
    let counts_ok = records.iter().all(|r| r.stats.reps == 20 && r.stats.retained == 18);
    let fields_ok = records.iter().all(|r| {
        let v = serde_json::to_value(r).unwrap();
        ["mean_ms", "stddev_ms", "rsd_pct", "reps", "retained"]
            .iter()
            .all(|k| v.get(k).is_some_and(|x| x.is_number()))
    });
    verdict(
        counts_ok && fields_ok && !records.is_empty(),
        format!(
            "{} records for {name} at reps=20, each retaining 18 samples with mean, stddev and rsd",
            records.len()
        ),
    )
}

fn format_round_trips() -> Line {
    let mut programs = 0;
    let mut certs = 0;
    let mut failures = Vec::new();
    let mut artifacts: Vec<(String, Program)> = kernels();
    artifacts.extend((0..100u64).map(|s| (format!("random {s}"), gen_random_program(s, 30))));
    artifacts.extend(fixtures::all().into_iter().map(|(n, p)| (n.to_string(), p)));
    for (name, p) in &artifacts {
        let mut stage_programs = vec![p.clone()];
        for kind in HONEST {
            let r = kind.run(p);
            let c = gen_cert(&r).bind(&r.before, &r.after);
            let text = print_cert(&c);
            certs += 1;
            match parse_cert(&text) {
                Ok(back) if back == c && print_cert(&back) == text => {}
                _ => failures.push(format!("{name} {kind} certificate")),
            }
            stage_programs.push(r.after);
        }
        for q in stage_programs {
            let text = print_tac(&q);
            programs += 1;
            match parse_tac(&text) {
                Ok(back) if back == q && print_tac(&back) == text => {}
                _ => failures.push(format!("{name} program")),
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{programs} programs and {certs} certificates round-trip byte-exact{}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

type Criterion = (&'static str, fn() -> Line);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("honest-certificate completeness", honest_completeness),
        ("tested checker soundness", checker_soundness),
        ("mutation sensitivity", mutation_sensitivity),
        ("checker regression pair", regression_pair),
        ("pass-behavior oracles", pass_oracles),
        ("P4 end-to-end", p4_end_to_end),
        ("timing breakdown shape", timing_breakdown_shape),
        ("statistics protocol", statistics_protocol),
        ("format round-trips", format_round_trips),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let line = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !line.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if line.pass { "PASS" } else { "FAIL" }, line.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
