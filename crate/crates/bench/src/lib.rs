//! Shared fixture for the benchmarks in `benches/`.

use std::path::PathBuf;
use std::sync::Arc;

use zeta_ladder::hl_table::{HlTable, DEFAULT_STEP};
use zeta_ladder::ladder::{JacobsLadder, LadderConstants};
use zeta_ladder::ZetaEngine;

/// A ladder over a table reaching `t_max`, cached under the target directory.
pub fn ladder(t_max: f64) -> Arc<JacobsLadder> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/bench_hl_table.csv");
    let (table, _) = HlTable::load_or_build(&path, ZetaEngine::default(), DEFAULT_STEP, t_max).expect("table builds");
    Arc::new(JacobsLadder::new(table, LadderConstants::default()).expect("valid constants"))
}
