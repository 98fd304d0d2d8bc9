use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{BaseSpec, RunConfig};
use crate::session::parse_path;

#[derive(Parser, Debug)]
#[command(name = "zeta-ladder", version, about = "Jacob's ladder experiments: φ₁, iteration towers and generated orthogonal systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// CSV of t, φ₁(t), Z̃²(t), |Z(t)| over a grid.
    Ladder {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid start [default: T]
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        /// Grid end [default: T + 2l]
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// The iteration tower over [T, T + 2l] as JSON.
    Segments {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample exports of generated systems.
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit every path of length s, one file each.
        #[arg(long)]
        enumerate_all: bool,
    },
    /// Gram matrices of generated systems, raw and normalized.
    Gram {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the property suite; exit status 0 iff every check passes.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated subset of checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// List the available checks and exit.
        #[arg(long)]
        list: bool,
    },
    /// Least-squares fit of the additive ladder constant.
    #[command(name = "calibrate-c0")]
    CalibrateC0 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
    },
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Ladder { common, .. }
            | Command::Segments { common }
            | Command::Generate { common, .. }
            | Command::Gram { common }
            | Command::Verify { common, .. }
            | Command::CalibrateC0 { common, .. } => common,
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "T", value_name = "T", allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<f64>,
    /// legendre, cosine or file:<samples.csv>
    #[arg(long)]
    pub base: Option<BaseSpec>,
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// A number or `calibrate`.
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rs_order: Option<usize>,
    /// Hardy–Littlewood table cache.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Points per exported system.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Generator path p1,p2,…; sets s unless --s is given.
    #[arg(long, allow_hyphen_values = true)]
    pub path: Option<String>,
    /// Scale exported members to unit norm.
    #[arg(long)]
    pub normalize: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    /// The configuration file with flag overrides applied, validated.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.t {
            c.t = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.s {
            c.s = v;
        }
        if let Some(v) = self.a {
            c.a = v;
        }
        if let Some(v) = self.l {
            c.l = v;
        }
        if let Some(v) = &self.base {
            c.base = v.clone();
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = &self.c0 {
            c.set("c0", v).map_err(|e| anyhow::anyhow!("--c0: {e}"))?;
        }
        if let Some(v) = self.abs_tol {
            c.abs_tol = v;
        }
        if let Some(v) = self.rs_order {
            c.rs_order = v;
        }
        if let Some(v) = &self.cache {
            c.cache = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(path) = self.path()? {
            match self.s {
                Some(s) if s != path.len() => bail!("invalid `s`: --s {s} disagrees with a path of length {}", path.len()),
                _ => c.s = path.len(),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn path(&self) -> Result<Option<Vec<usize>>> {
        self.path.as_deref().map(parse_path).transpose()
    }
}
