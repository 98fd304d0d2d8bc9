use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use zeta_ladder::generator::{enumerate_paths, write_samples, GeneratedSystem};
use zeta_ladder::harness::{gram_matrix, GramReport};
use zeta_ladder::ladder::IterationTower;
use zeta_ladder::report::{num, nums, Report};

use crate::config::BaseSpec;
use crate::session::{calibration_range, ensure_dir, write_file, Session};

/// A named output: written under `--out` when given, printed otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub text: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Artifact { name: name.into(), text: text.into() }
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let p = dir.join(&a.name);
            write_file(&p, &a.text)?;
            Ok(p)
        })
        .collect()
}

/// `n` points from `from` to `to`, both ends exact.
pub fn grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n).map(|i| if i + 1 == n { to } else { from + (to - from) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

pub fn ladder(session: &Session, from: f64, to: f64, points: usize) -> Result<Artifact> {
    if points == 0 {
        bail!("--points must be at least 1");
    }
    if !(from.is_finite() && to.is_finite() && to >= from) {
        bail!("grid [{from}, {to}] is empty");
    }
    let engine = session.ladder.table().engine().clone();
    let mut out = String::from("t,phi1,ztilde_sq,abs_z\n");
    for t in grid(from, to, points) {
        let phi = session.ladder.phi1(t)?;
        let zt = session.ladder.ztilde_sq(t)?;
        let z = engine.hardy_z(t)?.abs();
        writeln!(out, "{t:.16e},{phi:.16e},{zt:.16e},{z:.16e}").expect("writing to a string");
    }
    Ok(Artifact::new("ladder.csv", out))
}

pub fn segments(session: &Session) -> Result<Artifact> {
    let c = &session.config;
    let tower = IterationTower::build(&session.ladder, c.t, c.k, c.l)?;
    Ok(Artifact::new("segments.json", tower.to_json() + "\n"))
}

fn base_tag(base: &BaseSpec) -> &'static str {
    match base {
        BaseSpec::Legendre => "legendre",
        BaseSpec::Cosine => "cosine",
        BaseSpec::File(_) => "file",
    }
}

pub fn system_file_name(base: &BaseSpec, path: &[usize]) -> String {
    let label = if path.is_empty() {
        "base".to_string()
    } else {
        path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
    };
    format!("system_{}_{label}.csv", base_tag(base))
}

/// Sample exports of `paths` under a `k`-step generator.
pub fn generate(session: &Session, k: usize, paths: &[Vec<usize>], normalize: bool) -> Result<Vec<Artifact>> {
    let c = &session.config;
    let base = session.base()?;
    let generator = session.generator(k)?;
    paths
        .iter()
        .map(|path| {
            let sys = GeneratedSystem::new(base.clone(), generator.clone(), path.clone())?;
            let text = write_samples(&sys, c.n, c.samples, normalize)?;
            Ok(Artifact::new(system_file_name(&c.base, path), text))
        })
        .collect()
}

/// Every path with `1 ≤ len ≤ s`, shortest first.
pub fn paths_up_to(k: usize, s: usize) -> Vec<Vec<usize>> {
    (1..=s).flat_map(|len| enumerate_paths(k, len)).collect()
}

/// Off-diagonal bound relative to the largest diagonal entry.
pub const ORTHOGONALITY_TOL: f64 = 1e-6;
/// Allowed deviation of normalized diagonal entries from 1.
pub const NORMALIZATION_TOL: f64 = 1e-5;

pub struct GramEntry {
    pub path: Vec<usize>,
    pub raw: GramReport,
    pub normalized: GramReport,
}

impl GramEntry {
    pub fn label(&self) -> String {
        if self.path.is_empty() {
            "base".into()
        } else {
            self.path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
        }
    }

    pub fn orthogonal(&self) -> bool {
        self.raw.converged
            && self.raw.relative_offdiag() < ORTHOGONALITY_TOL
            && self.raw.symmetry_defect() <= 1e-12 * self.raw.max_diag().max(1.0)
    }

    pub fn diag_deviation(&self) -> f64 {
        self.normalized.diag.iter().fold(0.0, |m, d| m.max((d - 1.0).abs()))
    }

    pub fn normalized_ok(&self) -> bool {
        self.diag_deviation() <= NORMALIZATION_TOL
    }

    pub fn reports(&self, session: &Session) -> (Report, Report) {
        let c = &session.config;
        let tag = |r: Report| r.input("path", self.path.clone()).input("T", c.t).input("k", c.k).input("N", c.n);
        let raw = tag(self.raw.to_report("gram", self.orthogonal()));
        let mut normalized = tag(self.normalized.to_report("normalization", self.normalized_ok()));
        normalized.residuals.push(num(self.diag_deviation()));
        (raw, normalized)
    }
}

pub fn gram_entries(session: &Session, paths: &[Vec<usize>]) -> Result<Vec<GramEntry>> {
    let c = &session.config;
    if c.n < 1 {
        bail!("a Gram matrix needs N ≥ 1");
    }
    let base = session.base()?;
    let generator = session.generator(c.k)?;
    let spec = session.spec();
    paths
        .iter()
        .map(|path| {
            let sys = GeneratedSystem::new(base.clone(), generator.clone(), path.clone())?;
            let raw = gram_matrix(&sys, c.n, &spec)?;
            let factors: Vec<f64> = (0..=c.n).map(|n| sys.normalization_factor(n)).collect::<zeta_ladder::Result<_>>()?;
            let normalized = raw.scaled(&factors);
            Ok(GramEntry { path: path.clone(), raw, normalized })
        })
        .collect()
}

/// Gram reports for each path plus a one-line summary per path.
pub fn gram(session: &Session, paths: &[Vec<usize>]) -> Result<(Vec<Artifact>, String)> {
    let entries = gram_entries(session, paths)?;
    let mut artifacts = Vec::new();
    let mut summary = String::new();
    for e in &entries {
        let (raw, normalized) = e.reports(session);
        artifacts.push(Artifact::new(format!("gram_{}.json", e.label()), raw.to_json() + "\n"));
        artifacts.push(Artifact::new(format!("gram_{}_normalized.json", e.label()), normalized.to_json() + "\n"));
        writeln!(
            summary,
            "path {}: relative off-diagonal {:.3e}, normalized diagonal deviation {:.3e}, {}",
            e.label(),
            e.raw.relative_offdiag(),
            e.diag_deviation(),
            if e.orthogonal() && e.normalized_ok() { "ok" } else { "FAILED" }
        )
        .expect("writing to a string");
    }
    Ok((artifacts, summary))
}

pub fn calibrate_c0(session: &Session, from: Option<f64>, to: Option<f64>) -> Result<Artifact> {
    let (lo, hi) = calibration_range(session.config.t);
    let (lo, hi) = (from.unwrap_or(lo), to.unwrap_or(hi));
    let fit = session.ladder.calibrate_c0(lo, hi)?;
    let mut r = Report::new("calibrate_c0").input("from", lo).input("to", hi).input("samples", fit.samples);
    r.values = nums(&[fit.c0, fit.rms]);
    r.residuals = nums(&fit.bin_rms);
    r.pass = fit.trend_decreasing;
    Ok(Artifact::new("calibrate_c0.json", r.to_json() + "\n"))
}
