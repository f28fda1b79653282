//! Shared setup for the criterion benches in `benches/`.

use std::fs;
use std::path::{Path, PathBuf};

use tacc_core::{compile_source, Program};

/// The `corpus/` directory at the workspace root.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every `.knl` kernel in the corpus, compiled, sorted by name.
pub fn corpus() -> Vec<(String, Program)> {
    let mut out: Vec<(String, Program)> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "knl"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = fs::read_to_string(&p).expect("readable kernel");
            let prog = compile_source(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, prog)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
