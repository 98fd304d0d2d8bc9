//! The property suite behind `verify`. Each check writes `<name>.json` and
//! reports pass or fail; errors inside a check count as failures.

use std::cell::OnceCell;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use zeta_ladder::generator::GeneratedSystem;
use zeta_ladder::harness::{check_lemma1, check_theorem_equality_chain};
use zeta_ladder::ladder::IterationTower;
use zeta_ladder::report::{num, nums, Report};
use zeta_ladder::Dd;

use crate::commands::{generate, gram_entries, paths_up_to, write_artifacts, GramEntry};
use crate::session::{ensure_dir, write_file, Session};

pub const CHECKS: [&str; 10] =
    ["zeta", "ladder", "lemma1", "chain", "gram", "normalization", "automorphism", "tower", "ingham", "counting"];

pub const ZETA_SAMPLES: usize = 1000;
pub const ZETA_RANGE: (f64, f64) = (50.0, 1e4);
pub const ZETA_REL_TOL: f64 = 1e-6;
pub const ZERO_TOL: f64 = 1e-4;
pub const LADDER_SAMPLES: usize = 100;
pub const RELATION_REL_TOL: f64 = 1e-11;
pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-5;
pub const FD_MIN_ABS_Z: f64 = 0.1;
pub const LEMMA_U: f64 = 2.0;
pub const LEMMA_TOL: f64 = 1e-7;
pub const CHAIN_TOL: f64 = 1e-7;
pub const ENDPOINT_TOL: f64 = 1e-8;
pub const MONOTONE_PAIRS: usize = 100;
pub const GAP_WINDOW: (f64, f64) = (0.8, 1.2);
/// Regression baseline for `max |R(T)| / (T^{1/2} ln T)` on the step-500 grid
/// up to 10⁴; the measured maximum is 0.1375, at T = 4000.
pub const INGHAM_BASELINE: f64 = 0.15;
pub const INGHAM_STEP: f64 = 500.0;
pub const INGHAM_MAIN_TOL: f64 = 0.01;
pub const COUNTING_CASES: [(usize, usize); 3] = [(2, 2), (3, 2), (2, 3)];
pub const COUNTING_SAMPLES: usize = 33;

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub schema: &'static str,
    pub check: String,
    pub pass: bool,
    pub summary: String,
    pub reports: Vec<Report>,
}

impl CheckOutcome {
    fn new(name: &str, pass: bool, summary: String, reports: Vec<Report>) -> Self {
        CheckOutcome { schema: zeta_ladder::report::SCHEMA_VERSION, check: name.to_string(), pass, summary, reports }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.check, self.summary)
    }
}

pub fn resolve(only: &[String]) -> Result<Vec<&'static str>> {
    if only.is_empty() {
        return Ok(CHECKS.to_vec());
    }
    let mut names = Vec::new();
    for name in only {
        let found = CHECKS
            .iter()
            .find(|c| **c == name.as_str())
            .ok_or_else(|| anyhow!("unknown check `{name}`; available: {}", CHECKS.join(", ")))?;
        if !names.contains(found) {
            names.push(*found);
        }
    }
    Ok(names)
}

pub struct Verifier<'a> {
    session: &'a Session,
    out: PathBuf,
    grams: OnceCell<Vec<GramEntry>>,
}

impl<'a> Verifier<'a> {
    pub fn new(session: &'a Session, out: &Path) -> Self {
        Verifier { session, out: out.to_path_buf(), grams: OnceCell::new() }
    }

    fn rng(&self, name: &str) -> ChaCha8Rng {
        let index = CHECKS.iter().position(|c| *c == name).unwrap_or(CHECKS.len()) as u64;
        ChaCha8Rng::seed_from_u64(self.session.config.seed.wrapping_mul(1_000_003).wrapping_add(index))
    }

    /// Runs `name`, writes its JSON and returns the outcome.
    pub fn run(&self, name: &str) -> Result<CheckOutcome> {
        let outcome = match self.dispatch(name) {
            Ok(o) => o,
            Err(e) => CheckOutcome::new(name, false, format!("error: {e:#}"), Vec::new()),
        };
        ensure_dir(&self.out)?;
        let text = serde_json::to_string_pretty(&outcome)? + "\n";
        write_file(&self.out.join(format!("{name}.json")), &text)?;
        Ok(outcome)
    }

    fn dispatch(&self, name: &str) -> Result<CheckOutcome> {
        match name {
            "zeta" => self.zeta(),
            "ladder" => self.ladder(),
            "lemma1" => self.lemma1(),
            "chain" => self.chain(),
            "gram" => self.gram(),
            "normalization" => self.normalization(),
            "automorphism" => self.automorphism(),
            "tower" => self.tower(),
            "ingham" => self.ingham(),
            "counting" => self.counting(),
            _ => Err(anyhow!("unknown check `{name}`")),
        }
    }

    fn zeta(&self) -> Result<CheckOutcome> {
        let engine = self.session.ladder.table().engine().clone();
        let mut rng = self.rng("zeta");
        let mut worst: f64 = 0.0;
        let mut worst_t = 0.0;
        for _ in 0..ZETA_SAMPLES {
            let t = rng.gen_range(ZETA_RANGE.0..ZETA_RANGE.1);
            let fast = engine.hardy_z(t)?.abs();
            let oracle = engine.zeta_oracle(num_complex(t))?.norm();
            let rel = (fast - oracle).abs() / oracle;
            if !(rel <= worst) {
                worst = rel;
                worst_t = t;
            }
        }
        let fast_zeros: Vec<f64> = engine.zeros_in(10.0, 26.0)?.into_iter().take(3).collect();
        let oracle_zeros = oracle_zeros(&engine, 10.0, 26.0, 3)?;
        let zero_diffs: Vec<f64> = fast_zeros.iter().zip(&oracle_zeros).map(|(a, b)| a - b).collect();
        let zeros_ok = fast_zeros.len() == 3 && oracle_zeros.len() == 3 && zero_diffs.iter().all(|d| d.abs() < ZERO_TOL);
        let pass = worst < ZETA_REL_TOL && zeros_ok;

        let mut values = Report::new("zeta_values").input("samples", ZETA_SAMPLES).input("worst_t", worst_t);
        values.residuals = nums(&[worst]);
        values.pass = worst < ZETA_REL_TOL;
        let mut zeros = Report::new("zeta_zeros");
        zeros.values = nums(&fast_zeros);
        zeros.residuals = nums(&zero_diffs);
        zeros.pass = zeros_ok;
        let summary = format!(
            "max relative error {worst:.2e} over {ZETA_SAMPLES} points; first zeros {:?} off by at most {:.2e}",
            fast_zeros.iter().map(|z| format!("{z:.6}")).collect::<Vec<_>>(),
            zero_diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()))
        );
        Ok(CheckOutcome::new("zeta", pass, summary, vec![values, zeros]))
    }

    fn ladder(&self) -> Result<CheckOutcome> {
        let ladder = &self.session.ladder;
        let engine = ladder.table().engine().clone();
        let t_hi = self.session.config.t;
        let t_lo = 1000f64.min(0.5 * t_hi);
        let mut rng = self.rng("ladder");
        let (mut rel_worst, mut fd_worst, mut fd_count) = (0.0f64, 0.0f64, 0usize);
        for _ in 0..LADDER_SAMPLES {
            let t = rng.gen_range(t_lo..t_hi);
            let y = ladder.phi1_dd(Dd::from(t))?;
            let g = ladder.g(Dd::from(t))?;
            rel_worst = rel_worst.max(((ladder.constants().f(y) - g) / g).hi.abs());
            if engine.hardy_z(t)?.abs() > FD_MIN_ABS_Z {
                let fd = (ladder.phi1_dd(Dd::from(t) + FD_STEP)? - ladder.phi1_dd(Dd::from(t) - FD_STEP)?).hi
                    / (2.0 * FD_STEP);
                let exact = ladder.ztilde_sq(t)?;
                fd_worst = fd_worst.max((fd / exact - 1.0).abs());
                fd_count += 1;
            }
        }
        let pass = rel_worst < RELATION_REL_TOL && fd_worst < FD_REL_TOL && fd_count > 0;
        let mut r = Report::new("ladder").input("samples", LADDER_SAMPLES).input("fd_points", fd_count);
        r.residuals = nums(&[rel_worst, fd_worst]);
        r.pass = pass;
        let summary = format!(
            "defining relation within {rel_worst:.2e}; derivative vs differences within {fd_worst:.2e} at {fd_count} points"
        );
        Ok(CheckOutcome::new("ladder", pass, summary, vec![r]))
    }

    fn lemma1(&self) -> Result<CheckOutcome> {
        let t = self.session.config.t;
        let spec = self.session.spec();
        let mut reports = Vec::new();
        let mut worst: f64 = 0.0;
        let integrands: [(&str, fn(Dd) -> Dd); 3] = [("1", |_| Dd::ONE), ("t", |t| t), ("t^2", |t| t * t)];
        for (label, g) in integrands {
            for p in 1..=3 {
                let r = check_lemma1(&self.session.ladder, g, t, LEMMA_U, p, &spec)?;
                worst = worst.max(r.residual().abs());
                reports.push(r.to_report(LEMMA_TOL).input("g", label));
            }
        }
        let pass = reports.iter().all(|r| r.pass);
        let summary = format!("max |LHS - RHS| {worst:.2e} over 9 cases at T = {t}");
        Ok(CheckOutcome::new("lemma1", pass, summary, reports))
    }

    fn chain(&self) -> Result<CheckOutcome> {
        let c = &self.session.config;
        let generator = self.session.generator(c.k)?;
        let base = self.session.base()?;
        let spec = self.session.spec();
        let pairs: Vec<(usize, usize)> =
            [(0, 0), (0, 1), (2, 2), (1, 3)].into_iter().filter(|&(m, n)| m.max(n) <= c.n).collect();
        let mut reports = Vec::new();
        let mut worst: f64 = 0.0;
        for p in 1..=c.k {
            for &(m, n) in &pairs {
                let r = check_theorem_equality_chain(&generator, base.as_ref(), m, n, p, &spec)?;
                worst = worst.max(r.spread());
                reports.push(r.to_report(CHAIN_TOL));
            }
        }
        let pass = reports.iter().all(|r| r.pass);
        let summary = format!("largest spread {worst:.2e} over {} chains", reports.len());
        Ok(CheckOutcome::new("chain", pass, summary, reports))
    }

    fn grams(&self) -> Result<&[GramEntry]> {
        if self.grams.get().is_none() {
            let c = &self.session.config;
            let entries = gram_entries(self.session, &paths_up_to(c.k, c.s))?;
            let _ = self.grams.set(entries);
        }
        Ok(self.grams.get().expect("set above"))
    }

    fn gram(&self) -> Result<CheckOutcome> {
        let entries = self.grams()?;
        let reports: Vec<Report> = entries.iter().map(|e| e.reports(self.session).0).collect();
        let worst = entries.iter().fold(0.0f64, |m, e| m.max(e.raw.relative_offdiag()));
        let pass = !entries.is_empty() && entries.iter().all(GramEntry::orthogonal);
        let summary = format!("{} systems, largest relative off-diagonal {worst:.2e}", entries.len());
        Ok(CheckOutcome::new("gram", pass, summary, reports))
    }

    fn normalization(&self) -> Result<CheckOutcome> {
        let entries = self.grams()?;
        let reports: Vec<Report> = entries.iter().map(|e| e.reports(self.session).1).collect();
        let worst = entries.iter().fold(0.0f64, |m, e| m.max(e.diag_deviation()));
        let pass = !entries.is_empty() && entries.iter().all(GramEntry::normalized_ok);
        let summary = format!("{} systems, largest |diagonal - 1| {worst:.2e}", entries.len());
        Ok(CheckOutcome::new("normalization", pass, summary, reports))
    }

    fn automorphism(&self) -> Result<CheckOutcome> {
        let c = &self.session.config;
        let generator = self.session.generator(c.k)?;
        let base = self.session.base()?;
        let (lo, hi) = (c.a, c.a + 2.0 * c.l);
        let mut rng = self.rng("automorphism");
        let mut reports = Vec::new();
        let mut worst: f64 = 0.0;
        for path in paths_up_to(c.k, c.s) {
            let sys = GeneratedSystem::new(base.clone(), generator.clone(), path.clone())?;
            let ends = [(sys.automorphism(lo)? - lo).abs(), (sys.automorphism(hi)? - hi).abs()];
            worst = worst.max(ends[0]).max(ends[1]);
            let mut violations = 0usize;
            for _ in 0..MONOTONE_PAIRS {
                let (x, y) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
                if x != y && sys.automorphism(x.min(y))? >= sys.automorphism(x.max(y))? {
                    violations += 1;
                }
            }
            let mut r = Report::new("automorphism").input("path", path).input("pairs", MONOTONE_PAIRS);
            r.residuals = nums(&ends);
            r.values = nums(&[violations as f64]);
            r.pass = ends.iter().all(|e| *e < ENDPOINT_TOL) && violations == 0;
            reports.push(r);
        }
        let pass = !reports.is_empty() && reports.iter().all(|r| r.pass);
        let summary = format!("{} paths, endpoint drift at most {worst:.2e}", reports.len());
        Ok(CheckOutcome::new("automorphism", pass, summary, reports))
    }

    fn tower(&self) -> Result<CheckOutcome> {
        let c = &self.session.config;
        let tower = IterationTower::build(&self.session.ladder, c.t, c.k, c.l)?;
        let geo = tower.geometry();
        let in_window = geo.normalized_gaps.iter().all(|g| (GAP_WINDOW.0..=GAP_WINDOW.1).contains(g));
        let pass = in_window && geo.ordered && geo.lengths_small;
        let mut r = Report::new("tower").input("T", c.t).input("k", c.k).input("l", c.l);
        r.values = nums(&geo.normalized_gaps);
        r.residuals = nums(&geo.lengths);
        r.quad_error = num(0.0);
        r.pass = pass;
        let summary = format!(
            "normalized gaps {:?}, ordered {}, lengths below {:.3}: {}",
            geo.normalized_gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>(),
            geo.ordered,
            geo.length_bound,
            geo.lengths_small
        );
        Ok(CheckOutcome::new("tower", pass, summary, vec![r]))
    }

    fn ingham(&self) -> Result<CheckOutcome> {
        let table = self.session.ladder.table();
        let t_max = self.session.config.t;
        let count = (t_max / INGHAM_STEP).floor() as usize;
        let mut normalized = Vec::with_capacity(count);
        for i in 1..=count {
            normalized.push(table.check_ingham(INGHAM_STEP * i as f64)?.normalized);
        }
        let worst = normalized.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let at_top = table.check_ingham(t_max)?.relative_to_main();
        let pass = worst <= INGHAM_BASELINE && at_top < INGHAM_MAIN_TOL;
        let mut r = Report::new("ingham").input("step", INGHAM_STEP).input("T", t_max).input("baseline", INGHAM_BASELINE);
        r.values = nums(&normalized);
        r.residuals = nums(&[worst, at_top]);
        r.pass = pass;
        let summary = format!("max normalized |R| {worst:.4} (baseline {INGHAM_BASELINE}); |R|/main {at_top:.2e} at T = {t_max}");
        Ok(CheckOutcome::new("ingham", pass, summary, vec![r]))
    }

    fn counting(&self) -> Result<CheckOutcome> {
        let mut reports = Vec::new();
        let mut counts = Vec::new();
        let mut scaled = self.session.config.clone();
        scaled.samples = COUNTING_SAMPLES;
        let session = Session { config: scaled, ladder: self.session.ladder.clone(), c0_fit: None };
        for (k, s) in COUNTING_CASES {
            let dir = self.out.join("counting").join(format!("k{k}_s{s}"));
            if dir.exists() {
                std::fs::remove_dir_all(&dir)?;
            }
            let artifacts = generate(&session, k, &zeta_ladder::generator::enumerate_paths(k, s), false)?;
            write_artifacts(&dir, &artifacts)?;
            let files = std::fs::read_dir(&dir)?.count();
            let expected = k.pow(s as u32);
            let mut r = Report::new("counting").input("k", k).input("s", s);
            r.values = nums(&[files as f64, expected as f64]);
            r.pass = files == expected;
            counts.push(format!("(k={k}, s={s}) {files}/{expected}"));
            reports.push(r);
        }
        let pass = reports.iter().all(|r| r.pass);
        Ok(CheckOutcome::new("counting", pass, format!("files emitted {}", counts.join(", ")), reports))
    }
}

fn num_complex(t: f64) -> zeta_ladder::Complex64 {
    zeta_ladder::Complex64::new(0.5, t)
}

/// The first `count` zeros of the oracle Z in `[lo, hi]`, bracketed on a
/// fine sign scan and bisected to machine precision.
pub fn oracle_zeros(engine: &zeta_ladder::ZetaEngine, lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    let step = 0.01;
    let mut zeros = Vec::new();
    let mut a = lo;
    let mut za = engine.hardy_z_oracle(a)?;
    while a < hi && zeros.len() < count {
        let b = (a + step).min(hi);
        let zb = engine.hardy_z_oracle(b)?;
        if za * zb < 0.0 {
            let (mut x0, mut x1, mut z0) = (a, b, za);
            for _ in 0..100 {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let zm = engine.hardy_z_oracle(mid)?;
                if (zm < 0.0) == (z0 < 0.0) {
                    x0 = mid;
                    z0 = zm;
                } else {
                    x1 = mid;
                }
            }
            zeros.push(0.5 * (x0 + x1));
        }
        a = b;
        za = zb;
    }
    Ok(zeros)
}

/// Runs `names` in order, printing one line per check.
pub fn run_all(session: &Session, out: &Path, names: &[&str]) -> Result<Vec<CheckOutcome>> {
    let verifier = Verifier::new(session, out);
    let mut outcomes = Vec::new();
    for name in names {
        let outcome = verifier.run(name)?;
        println!("{}", outcome.line());
        outcomes.push(outcome);
    }
    Ok(outcomes)
}
