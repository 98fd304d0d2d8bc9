#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use zeta_ladder::hl_table::{HlTable, DEFAULT_STEP};
use zeta_ladder::ZetaEngine;

pub const T_MAX: f64 = 12_000.0;

/// A table cache covering the default profile, built once per test binary.
pub fn cache() -> &'static Path {
    static CACHE: OnceLock<PathBuf> = OnceLock::new();
    CACHE.get_or_init(|| {
        let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("hl_table.csv");
        let (_, warning) = HlTable::load_or_build(&path, ZetaEngine::default(), DEFAULT_STEP, T_MAX).unwrap();
        assert!(warning.is_none(), "{warning:?}");
        path
    })
}

pub fn run_with_cache(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeta-ladder"))
        .args(args)
        .arg("--cache")
        .arg(cache)
        .output()
        .expect("binary runs")
}

pub fn run(args: &[&str]) -> Output {
    run_with_cache(args, cache())
}

pub fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}
