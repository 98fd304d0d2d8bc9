//! Cumulative Hardy–Littlewood integral `G(T) = ∫_0^T |ζ(1/2 + it)|² dt`.
//!
//! The table stores `G` at the nodes `t_i = i * step` in double-double. Each
//! cell is integrated with one 16-point Gauss–Legendre panel per smooth
//! piece (pieces end at the Riemann–Siegel block boundaries `2πN²`, where
//! the fast `Z` jumps by its truncation error). The same panels evaluated on
//! `[t_i, T]` give `G` inside a cell, so the function returned by
//! [`HlTable::integral_dd`] is continuous and its derivative is exactly the
//! `Z(t)²` the engine computes. That consistency is what lets the ladder's
//! change of variables hold to double-double accuracy.
//!
//! A monotone piecewise cubic through the nodes is kept as a cheap
//! approximation, used to seed inversions.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::consts::{hardy_littlewood_linear_coeff, EULER_GAMMA};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::zeta::{ZetaEngine, ZetaEngineConfig};

pub const DEFAULT_STEP: f64 = 0.25;

/// Per unit length; cells whose halving estimate exceeds it are rejected.
pub const CELL_TOL: f64 = 1e-9;

const HEADER: &str = "# hl_table v1";

#[derive(Clone, Debug)]
pub struct HlTable {
    engine: ZetaEngine,
    step: f64,
    values: Vec<Dd>,
    slopes: Vec<f64>,
    max_cell_error: f64,
}

impl HlTable {
    /// Table covering `[0, t_max]`.
    pub fn build(engine: ZetaEngine, step: f64, t_max: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Invalid(format!("table step must be positive, got {step}")));
        }
        let table =
            HlTable { engine, step, values: vec![Dd::ZERO], slopes: vec![0.0], max_cell_error: 0.0 };
        table.extend(t_max)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn engine(&self) -> &ZetaEngine {
        &self.engine
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest `T` the table covers.
    pub fn max_t(&self) -> f64 {
        self.node(self.values.len() - 1).hi
    }

    pub fn node(&self, i: usize) -> Dd {
        Dd::from_prod(i as f64, self.step)
    }

    pub fn value(&self, i: usize) -> Dd {
        self.values[i]
    }

    pub fn values(&self) -> &[Dd] {
        &self.values
    }

    /// Largest cell error estimate seen while building (absolute).
    pub fn max_cell_error(&self) -> f64 {
        self.max_cell_error
    }

    /// A table covering at least `[0, new_max]`; existing nodes are kept
    /// bit for bit.
    pub fn extend(&self, new_max: f64) -> Result<Self> {
        if !new_max.is_finite() {
            return Err(Error::Domain(format!("table bound must be finite, got {new_max}")));
        }
        let have = self.values.len() - 1;
        let want = (new_max / self.step).ceil().max(0.0) as usize;
        if want <= have {
            return Ok(self.clone());
        }
        let cells: Vec<(Dd, f64)> = (have..want).into_par_iter().map(|i| self.cell(i)).collect::<Result<_>>()?;
        let mut out = self.clone();
        out.values.reserve(cells.len());
        for (i, (v, err)) in cells.into_iter().enumerate() {
            if !(v.hi > 0.0) {
                return Err(Error::Invalid(format!(
                    "non-positive increment on cell [{}, {}]",
                    self.node(have + i).hi,
                    self.node(have + i + 1).hi
                )));
            }
            let last = *out.values.last().expect("table has a node at 0");
            out.values.push(last + v);
            out.max_cell_error = out.max_cell_error.max(err);
        }
        out.slopes = monotone_slopes(self.step, &out.values);
        Ok(out)
    }

    /// `G(T)`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        Ok(self.integral_dd(Dd::from(t))?.to_f64())
    }

    /// `G(T)` with a double-double argument and result.
    pub fn integral_dd(&self, t: Dd) -> Result<Dd> {
        let i = self.cell_index(t)?;
        if t == self.node(i) {
            return Ok(self.values[i]);
        }
        Ok(self.values[i] + self.partial(i, t))
    }

    /// `G′(T) = Z(T)²`.
    pub fn derivative_dd(&self, t: Dd) -> Result<f64> {
        let z = self.engine.hardy_z_dd(t)?;
        Ok(z * z)
    }

    /// Monotone cubic interpolant of the node values.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let i = self.cell_index(Dd::from(t))?;
        if i + 1 == self.values.len() {
            return Ok(self.values[i].hi);
        }
        let h = self.step;
        let s = (t - self.node(i).hi) / h;
        Ok(hermite(self.values[i].hi, self.values[i + 1].hi, self.slopes[i] * h, self.slopes[i + 1] * h, s))
    }

    /// Approximate `G⁻¹(target)` from the interpolant, clamped to the table.
    pub fn invert_seed(&self, target: f64) -> f64 {
        let n = self.values.len();
        if target <= 0.0 {
            return 0.0;
        }
        if target >= self.values[n - 1].hi {
            return self.max_t();
        }
        let i = self.values.partition_point(|v| v.hi <= target) - 1;
        let h = self.step;
        let (y0, y1) = (self.values[i].hi, self.values[i + 1].hi);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hermite(y0, y1, m0, m1, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.node(i).hi + 0.5 * (lo + hi) * h
    }

    /// Cell containing `t`; the last node maps to itself.
    pub fn cell_index(&self, t: Dd) -> Result<usize> {
        if !(t.hi >= 0.0) {
            return Err(Error::Domain(format!("G(T) needs T ≥ 0, got {}", t.hi)));
        }
        let last = self.values.len() - 1;
        let max = self.node(last);
        if t > max {
            return Err(Error::Range(format!("T = {} beyond table coverage {}", t.hi, max.hi)));
        }
        let mut i = ((t.hi / self.step).floor() as usize).min(last);
        while i > 0 && self.node(i) > t {
            i -= 1;
        }
        while i < last && self.node(i + 1) <= t {
            i += 1;
        }
        Ok(i)
    }

    fn pieces(&self, i: usize, t: Dd) -> Vec<Dd> {
        let lo = self.node(i);
        let mut cuts = vec![lo];
        cuts.extend(
            self.engine.breakpoints_in(lo.hi, self.node(i + 1).hi).into_iter().filter(|b| *b > lo && *b < t),
        );
        cuts.push(t);
        cuts
    }

    fn z_sq(&self, t: Dd) -> f64 {
        let z = self.engine.hardy_z_dd(t).expect("table nodes are positive");
        z * z
    }

    fn partial(&self, i: usize, t: Dd) -> Dd {
        let rule = GaussLegendre::cached(16);
        self.pieces(i, t).windows(2).fold(Dd::ZERO, |acc, w| acc + rule.apply(w[0], w[1], |x| Dd::from(self.z_sq(x))))
    }

    fn cell(&self, i: usize) -> Result<(Dd, f64)> {
        let rule = GaussLegendre::cached(16);
        let hi = self.node(i + 1);
        let mut total = Dd::ZERO;
        let mut err = 0.0;
        let f = |x: Dd| Dd::from(self.z_sq(x));
        for w in self.pieces(i, hi).windows(2) {
            let whole = rule.apply(w[0], w[1], f);
            let mid = (w[0] + w[1]).mul_f64(0.5);
            let halves = rule.apply(w[0], mid, f) + rule.apply(mid, w[1], f);
            let e = (whole - halves).hi.abs();
            let noise = 64.0 * f64::EPSILON * halves.hi.abs();
            if e > CELL_TOL * (w[1] - w[0]).hi && e > noise {
                return Err(Error::ToleranceNotMet { value: whole.hi, estimate: e });
            }
            err += e;
            total += whole;
        }
        Ok((total, err))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.values.len() * 64);
        let cfg = self.engine.config();
        writeln!(out, "{HEADER} step={} rs_order={} min_t={}", self.step, cfg.rs_correction_order, cfg.min_t)
            .expect("writing to a string");
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.node(i).hi, v.hi, v.lo).expect("writing to a string");
        }
        let tmp = path.with_extension("csv.partial");
        let write = || -> std::io::Result<()> {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            let mut file = fs::File::create(&tmp)?;
            file.write_all(out.as_bytes())?;
            file.sync_all()?;
            fs::rename(&tmp, path)
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::io(path, e)
        })
    }

    /// Reads a cache file. The engine must match the one the file was
    /// built with, or the stored values would not integrate its `Z`.
    pub fn load(path: &Path, engine: ZetaEngine) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bad = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
        let rest = header.strip_prefix(HEADER).ok_or_else(|| bad(1, format!("expected `{HEADER} step=...`")))?;
        let mut step = None;
        let mut cfg = ZetaEngineConfig::default();
        for field in rest.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| bad(1, format!("malformed header field `{field}`")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(1, format!("bad number in `{field}`")));
            match k {
                "step" => step = Some(num(v)?),
                "rs_order" => cfg.rs_correction_order = num(v)? as usize,
                "min_t" => cfg.min_t = num(v)?,
                _ => return Err(bad(1, format!("unknown header field `{k}`"))),
            }
        }
        let step = step.ok_or_else(|| bad(1, "missing step".into()))?;
        if !(step > 0.0) {
            return Err(bad(1, format!("step must be positive, got {step}")));
        }
        let ecfg = engine.config();
        if ecfg.rs_correction_order != cfg.rs_correction_order || ecfg.min_t != cfg.min_t {
            return Err(bad(
                1,
                format!(
                    "built with rs_order={} min_t={}, engine has rs_order={} min_t={}",
                    cfg.rs_correction_order, cfg.min_t, ecfg.rs_correction_order, ecfg.min_t
                ),
            ));
        }

        let mut values = Vec::new();
        for (n, line) in lines {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let mut next = |what: &str| -> Result<f64> {
                let c = cols.next().ok_or_else(|| bad(line_no, format!("missing {what}")))?;
                c.trim().parse::<f64>().map_err(|_| bad(line_no, format!("bad {what} `{c}`")))
            };
            let t = next("t")?;
            let hi = next("value")?;
            let lo = match cols.next() {
                Some(c) => c.trim().parse::<f64>().map_err(|_| bad(line_no, format!("bad tail `{c}`")))?,
                None => 0.0,
            };
            let i = values.len();
            let expect = Dd::from_prod(i as f64, step).hi;
            if (t - expect).abs() > 1e-9 * expect.max(1.0) {
                return Err(bad(line_no, format!("node {i} at t = {t}, expected {expect}")));
            }
            let v = Dd::from_sum(hi, lo);
            if !v.is_finite() {
                return Err(bad(line_no, "non-finite value".into()));
            }
            if i == 0 && v != Dd::ZERO {
                return Err(bad(line_no, "G(0) must be 0".into()));
            }
            if i > 0 && !(v > values[i - 1]) {
                return Err(bad(line_no, "values not strictly increasing".into()));
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(bad(2, "no nodes".into()));
        }
        let slopes = monotone_slopes(step, &values);
        Ok(HlTable { engine, step, values, slopes, max_cell_error: 0.0 })
    }

    /// Loads `path` if it exists, extends to `t_max` and writes back when
    /// anything was added. A failed write leaves the returned table valid
    /// and is reported in the second slot.
    pub fn load_or_build(
        path: &Path,
        engine: ZetaEngine,
        step: f64,
        t_max: f64,
    ) -> Result<(Self, Option<Error>)> {
        let base = if path.exists() {
            let t = HlTable::load(path, engine)?;
            if t.step != step {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    msg: format!("cache step {} differs from requested {step}", t.step),
                });
            }
            t
        } else {
            HlTable::build(engine, step, 0.0)?
        };
        let grown = base.extend(t_max)?;
        let warning = if grown.len() != base.len() || !path.exists() { grown.save(path).err() } else { None };
        Ok((grown, warning))
    }

    /// `R(T)` of the Ingham form and its normalized size.
    pub fn check_ingham(&self, t: f64) -> Result<InghamResidual> {
        if !(t > 1.0) {
            return Err(Error::Domain(format!("Ingham residual needs T > 1, got {t}")));
        }
        let g = self.integral_dd(Dd::from(t))?;
        let td = Dd::from(t);
        let main = td * td.ln() + td * hardy_littlewood_linear_coeff();
        let r = (g - main).to_f64();
        Ok(InghamResidual {
            t,
            g: g.to_f64(),
            main_term: main.to_f64(),
            residual: r,
            normalized: r / (t.sqrt() * t.ln()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InghamResidual {
    pub t: f64,
    pub g: f64,
    pub main_term: f64,
    pub residual: f64,
    /// `R(T) / (T^{1/2} ln T)`.
    pub normalized: f64,
}

impl InghamResidual {
    pub fn relative_to_main(&self) -> f64 {
        (self.residual / self.main_term).abs()
    }
}

/// Main term of the mean square: `T ln T + (2c − 1 − ln 2π) T`.
pub fn mean_square_main_term(t: f64) -> f64 {
    t * t.ln() + (2.0 * EULER_GAMMA - 1.0 - crate::consts::LN_TWO_PI) * t
}

fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
}

/// Fritsch–Carlson slopes for increasing data on a uniform grid.
fn monotone_slopes(h: f64, values: &[Dd]) -> Vec<f64> {
    let n = values.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let delta: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).hi / h).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / delta[i];
        let b = m[i + 1] / delta[i];
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * delta[i];
            m[i + 1] = tau * b * delta[i];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureSpec};
    use std::sync::OnceLock;

    fn table() -> &'static HlTable {
        static T: OnceLock<HlTable> = OnceLock::new();
        T.get_or_init(|| HlTable::build(ZetaEngine::default(), DEFAULT_STEP, 1100.0).unwrap())
    }

    #[test]
    fn zero_and_monotone() {
        let t = table();
        assert_eq!(t.integral(0.0).unwrap(), 0.0);
        assert!(t.values().windows(2).all(|w| w[1] > w[0]));
        let mut prev = 0.0;
        for k in 1..200 {
            let v = t.integral(k as f64 * 5.37).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(matches!(t.integral(-1.0), Err(Error::Domain(_))));
        assert!(matches!(t.integral(2000.0), Err(Error::Range(_))));
    }

    #[test]
    fn matches_independent_quadrature() {
        let engine = ZetaEngine::default();
        let spec = QuadratureSpec::default().with_abs_tol(1e-11).with_kinks(
            engine.breakpoints_in(300.0, 311.0).into_iter().map(|b| b.hi).collect(),
        );
        let q = integrate(|x| engine.hardy_z(x).unwrap().powi(2), 300.0, 310.9, &spec).unwrap();
        let t = table();
        let g = t.integral_dd(Dd::from(310.9)).unwrap() - t.integral_dd(Dd::from(300.0)).unwrap();
        assert!((g.hi - q.value).abs() < 1e-9, "{} vs {}", g.hi, q.value);
    }

    #[test]
    fn continuous_across_nodes() {
        let t = table();
        for i in [40usize, 41, 1000, 3000] {
            let node = t.node(i);
            let below = t.integral_dd(node - Dd::from(1e-20)).unwrap();
            let inside = t.integral_dd(node).unwrap();
            let via_prev = t.value(i - 1) + t.partial(i - 1, node);
            assert_eq!(via_prev, inside);
            assert!((below - inside).hi.abs() < 1e-18);
        }
    }

    #[test]
    fn derivative_is_z_squared() {
        let t = table();
        let h = Dd::from(1e-6);
        for &x in &[123.456, 500.5, 987.65] {
            let x = Dd::from(x);
            let fd = ((t.integral_dd(x + h).unwrap() - t.integral_dd(x - h).unwrap()) / (h * 2.0)).to_f64();
            let z2 = t.derivative_dd(x).unwrap();
            assert!((fd - z2).abs() < 1e-8 * z2.max(1.0), "{fd} vs {z2}");
        }
    }

    #[test]
    fn interpolant_is_close_and_monotone() {
        let t = table();
        let mut prev = 0.0;
        for k in 0..4000 {
            let x = k as f64 * 0.2731;
            let v = t.interpolate(x).unwrap();
            assert!(v >= prev);
            prev = v;
            let exact = t.integral(x).unwrap();
            assert!((v - exact).abs() < 0.05 * (1.0 + exact * 1e-3));
        }
        for &target in &[1.0, 500.0, 4321.5] {
            let x = t.invert_seed(target);
            let back = t.interpolate(x).unwrap();
            assert!((back - target).abs() < 1e-9 * target, "{target}: x = {x}, back = {back}");
        }
    }

    #[test]
    fn extension_keeps_nodes() {
        let engine = ZetaEngine::default();
        let a = HlTable::build(engine.clone(), DEFAULT_STEP, 50.0).unwrap();
        let same = a.extend(50.0).unwrap();
        assert_eq!(same.values(), a.values());
        let twice = a.extend(60.0).unwrap().extend(70.0).unwrap();
        let once = a.extend(70.0).unwrap();
        assert_eq!(twice.values(), once.values());
        assert_eq!(&once.values()[..a.len()], a.values());
        let direct = HlTable::build(engine, DEFAULT_STEP, 70.0).unwrap();
        assert_eq!(direct.values(), once.values());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hl_table.csv");
        let a = HlTable::build(ZetaEngine::default(), DEFAULT_STEP, 30.0).unwrap();
        a.save(&path).unwrap();
        let b = HlTable::load(&path, ZetaEngine::default()).unwrap();
        assert_eq!(a.values(), b.values());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# hl_table v1 step=0.25"));

        let (c, warn) = HlTable::load_or_build(&path, ZetaEngine::default(), DEFAULT_STEP, 40.0).unwrap();
        assert!(warn.is_none());
        assert_eq!(&c.values()[..a.len()], a.values());
        assert_eq!(HlTable::load(&path, ZetaEngine::default()).unwrap().len(), c.len());

        let other = ZetaEngine::new(ZetaEngineConfig { rs_correction_order: 2, ..Default::default() }).unwrap();
        assert!(matches!(HlTable::load(&path, other), Err(Error::Parse { .. })));
    }

    #[test]
    fn corrupted_cache_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hl_table.csv");
        std::fs::write(&path, "# hl_table v1 step=0.25\n0,0\n0.25,abc\n").unwrap();
        let err = HlTable::load(&path, ZetaEngine::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("hl_table.csv") && msg.contains("line 3"), "{msg}");

        std::fs::write(&path, "# hl_table v1 step=0.25\n0,0\n0.25,2\n0.5,1\n").unwrap();
        assert!(HlTable::load(&path, ZetaEngine::default()).is_err());
    }

    #[test]
    fn failed_write_is_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("sub").join("x.csv");
        std::fs::write(dir.path().join("missing"), "a file, not a dir").unwrap();
        let (t, warn) = HlTable::load_or_build(&path, ZetaEngine::default(), DEFAULT_STEP, 20.0).unwrap();
        assert!(t.max_t() >= 20.0);
        assert!(matches!(warn, Some(Error::Io { .. })));
    }

    #[test]
    fn ingham_residual_at_1000() {
        let r = table().check_ingham(1000.0).unwrap();
        assert!(r.normalized.abs() < 1.0, "{r:?}");
        assert!((r.main_term - mean_square_main_term(1000.0)).abs() < 1e-9);
    }
}
