#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use zeta_ladder::generator::{Generator, Legendre, OrthogonalSystem};
use zeta_ladder::hl_table::{HlTable, DEFAULT_STEP};
use zeta_ladder::ladder::{JacobsLadder, LadderConstants};
use zeta_ladder::ZetaEngine;

pub const T_MAX: f64 = 12_000.0;

pub fn cache_path() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hl_table.csv")
}

pub fn table() -> &'static HlTable {
    static TABLE: OnceLock<HlTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (table, _) = HlTable::load_or_build(&cache_path(), ZetaEngine::default(), DEFAULT_STEP, T_MAX)
            .expect("table fixture");
        table
    })
}

pub fn ladder() -> Arc<JacobsLadder> {
    static LADDER: OnceLock<Arc<JacobsLadder>> = OnceLock::new();
    LADDER
        .get_or_init(|| Arc::new(JacobsLadder::new(table().clone(), LadderConstants::default()).expect("ladder")))
        .clone()
}

/// The default profile: T = 10⁴, k = 3 on [−1, 1].
pub fn generator() -> Arc<Generator> {
    static GEN: OnceLock<Arc<Generator>> = OnceLock::new();
    GEN.get_or_init(|| Arc::new(Generator::new(ladder(), 1e4, 3, -1.0, 1.0).expect("generator"))).clone()
}

pub fn legendre() -> Arc<dyn OrthogonalSystem> {
    Arc::new(Legendre::new(-1.0, 1.0).expect("legendre"))
}
