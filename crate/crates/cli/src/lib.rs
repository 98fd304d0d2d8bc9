//! Command-line driver for the zeta-ladder experiments.
//!
//! Every command reads a [`RunConfig`] (file plus flag overrides), opens the
//! Hardy–Littlewood table cache and writes CSV or JSON. Identical
//! configuration and seed give byte-identical output.

pub mod args;
pub mod commands;
pub mod config;
pub mod session;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};

pub use args::{Cli, Command, CommonArgs};
pub use config::{BaseSpec, C0Mode, ConfigError, RunConfig};
pub use session::Session;

use commands::{write_artifacts, Artifact};

pub const DEFAULT_VERIFY_DIR: &str = "verify_reports";
pub const DEFAULT_GRAM_DIR: &str = "gram_reports";

fn emit(artifact: Artifact, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(dir) => {
            for p in write_artifacts(dir, std::slice::from_ref(&artifact))? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", artifact.text),
    }
    Ok(())
}

/// Runs one parsed command. `Ok(false)` means some verification failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let common = cli.command.common();
    if let Command::Verify { list: true, .. } = &cli.command {
        for name in verify::CHECKS {
            println!("{name}");
        }
        return Ok(true);
    }
    let config = common.resolve()?;
    let session = Session::open(config)?;
    if let Some(fit) = &session.c0_fit {
        eprintln!("calibrated c0 = {:.6} from {} samples", fit.c0, fit.samples);
    }
    let out = common.out.as_ref();
    let c = &session.config;
    let ok = match &cli.command {
        Command::Ladder { from, to, points, .. } => {
            let from = from.unwrap_or(c.t);
            let to = to.unwrap_or(c.t + 2.0 * c.l);
            emit(commands::ladder(&session, from, to, *points)?, out)?;
            true
        }
        Command::Segments { .. } => {
            emit(commands::segments(&session)?, out)?;
            true
        }
        Command::Generate { enumerate_all, .. } => {
            let paths = match (common.path()?, enumerate_all) {
                (Some(_), true) => bail!("--path and --enumerate-all are mutually exclusive"),
                (Some(p), false) => vec![p],
                (None, true) => zeta_ladder::generator::enumerate_paths(c.k, c.s),
                (None, false) if c.s == 0 => vec![Vec::new()],
                (None, false) => bail!("generate needs --path, --enumerate-all or s = 0"),
            };
            let artifacts = commands::generate(&session, c.k, &paths, common.normalize)?;
            if artifacts.len() == 1 && out.is_none() && !enumerate_all {
                print!("{}", artifacts[0].text);
            } else {
                let dir = out.cloned().unwrap_or_else(|| PathBuf::from("."));
                let written = write_artifacts(&dir, &artifacts)?;
                eprintln!("wrote {} systems to {}", written.len(), dir.display());
            }
            true
        }
        Command::Gram { .. } => {
            let paths = match common.path()? {
                Some(p) => vec![p],
                None => commands::paths_up_to(c.k, c.s),
            };
            let (artifacts, summary) = commands::gram(&session, &paths)?;
            let dir = out.cloned().unwrap_or_else(|| PathBuf::from(DEFAULT_GRAM_DIR));
            write_artifacts(&dir, &artifacts)?;
            print!("{summary}");
            !summary.contains("FAILED")
        }
        Command::Verify { only, .. } => {
            let names = verify::resolve(only)?;
            let dir = out.cloned().unwrap_or_else(|| PathBuf::from(DEFAULT_VERIFY_DIR));
            let outcomes = verify::run_all(&session, &dir, &names)?;
            let failing: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.check.as_str()).collect();
            if !failing.is_empty() {
                eprintln!("failing checks: {}", failing.join(", "));
            }
            failing.is_empty()
        }
        Command::CalibrateC0 { from, to, .. } => {
            emit(commands::calibrate_c0(&session, *from, *to)?, out)?;
            true
        }
    };
    session.report_cache_error();
    Ok(ok)
}

/// Exit status 0 on success, 1 on failed checks, 2 on errors.
pub fn main_with(cli: &Cli) -> ExitCode {
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
