//! Everything a command needs, built once from a validated configuration.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use zeta_ladder::generator::{Cosine, GeneratedSystem, Generator, Legendre, OrthogonalSystem, Tabulated};
use zeta_ladder::harness::QuadratureSpec;
use zeta_ladder::hl_table::{HlTable, DEFAULT_STEP};
use zeta_ladder::ladder::{C0Fit, JacobsLadder, LadderConstants};
use zeta_ladder::{ZetaEngine, ZetaEngineConfig};

use crate::config::{BaseSpec, C0Mode, RunConfig};

/// Orthogonality tolerance applied to sample files used as a base.
pub const FILE_BASE_TOL: f64 = 1e-3;

pub struct Session {
    pub config: RunConfig,
    pub ladder: Arc<JacobsLadder>,
    pub c0_fit: Option<C0Fit>,
}

/// Calibration window for `c0 = calibrate`.
pub fn calibration_range(t: f64) -> (f64, f64) {
    ((0.1 * t).max(200.0), t)
}

impl Session {
    pub fn open(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let engine = ZetaEngine::new(ZetaEngineConfig { rs_correction_order: config.rs_order, ..Default::default() })?;
        let reach = config.t + 2.0 * config.l + 1.0;
        let (table, warning) = HlTable::load_or_build(&config.cache, engine, DEFAULT_STEP, reach)
            .with_context(|| format!("loading cache {}", config.cache.display()))?;
        if let Some(w) = warning {
            eprintln!("warning: could not write cache {}: {w}", config.cache.display());
        }
        let (c0, c0_fit) = match config.c0 {
            C0Mode::Fixed(c0) => (c0, None),
            C0Mode::Calibrate => {
                let probe = JacobsLadder::new(table.clone(), LadderConstants::default())?;
                let (lo, hi) = calibration_range(config.t);
                let fit = probe.calibrate_c0(lo, hi)?;
                (fit.c0, Some(fit))
            }
        };
        let ladder = JacobsLadder::new(table, LadderConstants::default().with_c0(c0))?.with_cache(&config.cache);
        Ok(Session { config, ladder: Arc::new(ladder), c0_fit })
    }

    pub fn c0(&self) -> f64 {
        self.ladder.constants().c0
    }

    pub fn generator(&self, k: usize) -> Result<Arc<Generator>> {
        let c = &self.config;
        Ok(Arc::new(Generator::new(self.ladder.clone(), c.t, k, c.a, c.l)?))
    }

    pub fn base(&self) -> Result<Arc<dyn OrthogonalSystem>> {
        let c = &self.config;
        Ok(match &c.base {
            BaseSpec::Legendre => Arc::new(Legendre::new(c.a, c.l)?),
            BaseSpec::Cosine => Arc::new(Cosine::new(c.a, c.l)?),
            BaseSpec::File(path) => {
                let tab = Tabulated::from_file(path, FILE_BASE_TOL)?;
                let (a, l) = tab.interval();
                if (a - c.a).abs() > 1e-12 * c.a.abs().max(1.0) || (l - c.l).abs() > 1e-12 * c.l {
                    bail!("{} spans [{a}, {}] but the run uses [{}, {}]", path.display(), a + 2.0 * l, c.a, c.a + 2.0 * c.l);
                }
                if let Some(top) = tab.max_index() {
                    if top < c.n {
                        bail!("{} has members 0..={top} but N = {}", path.display(), c.n);
                    }
                }
                Arc::new(tab)
            }
        })
    }

    pub fn system(&self, path: Vec<usize>) -> Result<GeneratedSystem> {
        Ok(GeneratedSystem::new(self.base()?, self.generator(self.config.k)?, path)?)
    }

    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec::default().with_abs_tol(self.config.abs_tol)
    }

    /// Surfaces a failed cache write from on-demand table growth.
    pub fn report_cache_error(&self) {
        if let Some(e) = self.ladder.cache_error() {
            eprintln!("warning: could not update cache {}: {e}", self.config.cache.display());
        }
    }
}

/// Parses `1,2,3`; an empty string is the empty path.
pub fn parse_path(text: &str) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .enumerate()
        .map(|(i, p)| p.trim().parse::<usize>().with_context(|| format!("path entry {} is not an index: `{p}`", i + 1)))
        .collect()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
