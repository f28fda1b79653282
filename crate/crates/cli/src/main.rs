//! `tacc`: compile `.knl` kernels, run optimization pipelines with
//! certificate checking, check certificates, interpret programs, benchmark
//! and fuzz.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tacc_core::cert::{check, parse_cert, print_cert, CheckOptions};
use tacc_core::frontend::{compile_source, content_hash, parse_tac, print_tac};
use tacc_core::harness::{
    bench_kernel, bench_records, default_fuel, fuzz_with, pipeline, render_table, FuzzConfig, Mode, BENCH_PASSES,
};
use tacc_core::interp::{parse_input, run, Inputs, Outcome};
use tacc_core::{PassKind, Program};

#[derive(Parser)]
#[command(name = "tacc", version, about = "Certificate-checked optimization of three-address code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower a `.knl` kernel to TAC.
    Compile {
        file: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a pass pipeline over a program.
    Opt {
        /// `.tac` program, or `.knl` source compiled on the fly.
        file: PathBuf,
        /// Comma-separated passes: cp, uce, dae, dae-once, uce-dae.
        #[arg(long, value_delimiter = ',', default_value = "cp,uce-dae")]
        passes: Vec<PassKind>,
        #[arg(long, value_enum, default_value_t = ModeArg::Cc)]
        mode: ModeArg,
        /// Write each stage's source, target and certificate here.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a certificate against a source and target program.
    Check { src: PathBuf, tgt: PathBuf, cert: PathBuf },
    /// Interpret a program.
    Run {
        file: PathBuf,
        /// Input assignments such as `n=4` or `A=1,2,3`.
        #[arg(long = "input", num_args = 1..)]
        inputs: Vec<String>,
        /// Step budget; defaults to TACC_FUEL or 1000000.
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Time opt, gen and chk per pass for every kernel in a directory.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(3..))]
        reps: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Mutate honest pass results and look for accepted divergent ones.
    Fuzz {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Differential inputs per accepted mutant.
        #[arg(long, default_value_t = 50)]
        inputs: usize,
        /// Check with the fast path disabled.
        #[arg(long)]
        no_fast_path: bool,
        /// Fuzz a known-broken build: a constant propagator that folds
        /// division by zero, checked without fault conditions.
        #[arg(long)]
        canary: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cc,
    Plain,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Compile { file, output } => {
            let p = load_program(&file)?;
            emit(output.as_deref(), &print_tac(&p))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Opt {
            file,
            passes,
            mode,
            emit_cert,
            output,
        } => opt(&file, &passes, mode, emit_cert.as_deref(), output.as_deref()),
        Command::Check { src, tgt, cert } => check_files(&src, &tgt, &cert),
        Command::Run { file, inputs, fuel } => run_file(&file, &inputs, fuel.unwrap_or_else(default_fuel)),
        Command::Bench { dir, reps, format } => bench_dir(&dir, reps as usize, format),
        Command::Fuzz {
            trials,
            seed,
            inputs,
            no_fast_path,
            canary,
            format,
        } => {
            let cfg = FuzzConfig {
                trials: trials as usize,
                seed,
                inputs_per_trial: inputs,
                fuel: default_fuel(),
                check: CheckOptions {
                    fast_path: !no_fast_path,
                    fault_guards: !canary,
                },
                broken_cp: canary,
                ..FuzzConfig::default()
            };
            let report = fuzz_with(&cfg);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Table => {
                    println!("trials                      {}", report.trials);
                    println!("accepted honest             {}", report.accepted_honest);
                    println!("rejected honest             {}", report.rejected_honest);
                    println!("rejected mutant             {}", report.rejected_mutant);
                    println!("accepted mutant, equivalent {}", report.accepted_mutant_equivalent);
                    println!("soundness violations        {}", report.soundness_violations);
                    for f in &report.failures {
                        println!("  {f}");
                    }
                }
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a `.knl` source or a `.tac` program.
fn load_program(path: &Path) -> Result<Program> {
    let text = read(path)?;
    let shown = path.display();
    if path.extension().is_some_and(|e| e == "knl") {
        compile_source(&text).map_err(|e| anyhow::anyhow!("{shown}: {e}"))
    } else {
        parse_tac(&text).map_err(|e| anyhow::anyhow!("{shown}: {e}"))
    }
}

fn opt(file: &Path, passes: &[PassKind], mode: ModeArg, certs: Option<&Path>, output: Option<&Path>) -> Result<ExitCode> {
    let p = load_program(file)?;
    let mode = match mode {
        ModeArg::Cc => Mode::Cc,
        ModeArg::Plain => Mode::Plain,
    };
    if certs.is_some() && mode == Mode::Plain {
        bail!("--emit-cert needs --mode cc");
    }
    let out = pipeline(&p, passes, mode);
    if let Some(dir) = certs {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (k, s) in out.stages.iter().enumerate() {
            let stem = dir.join(format!("{k:02}_{}", s.pass.name()));
            fs::write(stem.with_extension("src.tac"), print_tac(&s.input))?;
            fs::write(stem.with_extension("tgt.tac"), print_tac(&s.output))?;
            if let Some(c) = &s.cert {
                let bound = c.clone().bind(&s.input, &s.output);
                fs::write(stem.with_extension("cert"), print_cert(&bound))?;
            }
        }
    }
    let mut rejected = false;
    for s in &out.stages {
        let t = s.timings;
        let status = match &s.verdict {
            None => "ran".to_string(),
            Some(v) if v.is_accepted() => v.to_string(),
            Some(v) => {
                rejected = true;
                format!("{v}; output discarded")
            }
        };
        eprintln!(
            "{:<8} {status} (opt {:.3} ms, gen {:.3} ms, chk {:.3} ms)",
            s.pass.name(),
            t.opt.as_secs_f64() * 1e3,
            t.gen.as_secs_f64() * 1e3,
            t.chk.as_secs_f64() * 1e3
        );
    }
    emit(output, &print_tac(&out.program))?;
    Ok(if rejected { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn check_files(src: &Path, tgt: &Path, cert: &Path) -> Result<ExitCode> {
    let (s, t) = (load_program(src)?, load_program(tgt)?);
    let c = parse_cert(&read(cert)?).map_err(|e| anyhow::anyhow!("{}: {e}", cert.display()))?;
    if let Some((hs, ht)) = &c.programs {
        if *hs != content_hash(&s) || *ht != content_hash(&t) {
            bail!("{} was generated for different programs", cert.display());
        }
    }
    let v = check(&s, &t, &c);
    println!("{v}");
    Ok(if v.is_accepted() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_file(file: &Path, specs: &[String], fuel: u64) -> Result<ExitCode> {
    let p = load_program(file)?;
    let mut inputs = Inputs::new();
    for spec in specs {
        let (name, value) = parse_input(&p, spec).map_err(anyhow::Error::msg)?;
        inputs.insert(name, value);
    }
    let outcome = run(&p, &inputs, fuel)?;
    println!("{outcome}");
    Ok(match outcome {
        Outcome::Halted(_) => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

fn bench_dir(dir: &Path, reps: usize, format: Format) -> Result<ExitCode> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "knl" || e == "tac"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for f in &files {
        match load_program(f) {
            Ok(p) => {
                let name = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                rows.push(bench_kernel(&name, &p, reps));
            }
            Err(e) => eprintln!("warning: skipping {e:#}"),
        }
    }
    if rows.is_empty() {
        eprintln!("error: no kernel in {} could be benchmarked", dir.display());
        return Ok(ExitCode::from(1));
    }
    match format {
        Format::Table => {
            let names: Vec<&str> = BENCH_PASSES.iter().map(|p| p.name()).collect();
            println!("passes {} in cc mode, {reps} reps, min and max dropped", names.join(" then "));
            print!("{}", render_table(&rows));
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&bench_records(&rows))?),
    }
    Ok(ExitCode::SUCCESS)
}
