//! Run configuration: a plain `key = value` file with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;
use zeta_ladder::ladder::TOWER_SMALLNESS;
use zeta_ladder::zeta::ZetaEngineConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Line { path: PathBuf, line: usize, msg: String },

    #[error("invalid `{field}`: {msg}")]
    Field { field: &'static str, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum C0Mode {
    Fixed(f64),
    Calibrate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BaseSpec {
    Legendre,
    Cosine,
    /// Samples in the export CSV format.
    File(PathBuf),
}

impl fmt::Display for BaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSpec::Legendre => write!(f, "legendre"),
            BaseSpec::Cosine => write!(f, "cosine"),
            BaseSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl std::str::FromStr for BaseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "legendre" => Ok(BaseSpec::Legendre),
            "cosine" => Ok(BaseSpec::Cosine),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(BaseSpec::File(PathBuf::from(p))),
                _ => Err(format!("unknown base `{s}`; expected legendre, cosine or file:<path>")),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub t: f64,
    pub k: usize,
    pub s: usize,
    pub a: f64,
    pub l: f64,
    pub base: BaseSpec,
    pub n: usize,
    pub c0: C0Mode,
    pub abs_tol: f64,
    pub rs_order: usize,
    pub cache: PathBuf,
    pub seed: u64,
    /// Points per exported system.
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            t: 1e4,
            k: 3,
            s: 2,
            a: -1.0,
            l: 1.0,
            base: BaseSpec::Legendre,
            n: 8,
            c0: C0Mode::Fixed(0.0),
            abs_tol: 1e-9,
            rs_order: 4,
            cache: PathBuf::from("hl_table.csv"),
            seed: 1,
            samples: 401,
        }
    }
}

pub const KEYS: [&str; 13] = ["T", "k", "s", "a", "l", "base", "N", "c0", "abs_tol", "rs_order", "cache", "seed", "samples"];

fn parse<T: std::str::FromStr>(value: &str, what: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("expected {what}, got `{value}`"))
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "T" => self.t = parse(value, "a number")?,
            "k" => self.k = parse(value, "a nonnegative integer")?,
            "s" => self.s = parse(value, "a nonnegative integer")?,
            "a" => self.a = parse(value, "a number")?,
            "l" => self.l = parse(value, "a number")?,
            "base" => self.base = value.parse()?,
            "N" => self.n = parse(value, "a nonnegative integer")?,
            "c0" => {
                self.c0 = if value == "calibrate" {
                    C0Mode::Calibrate
                } else {
                    C0Mode::Fixed(parse(value, "a number or `calibrate`")?)
                }
            }
            "abs_tol" => self.abs_tol = parse(value, "a number")?,
            "rs_order" => self.rs_order = parse(value, "an integer")?,
            "cache" => self.cache = PathBuf::from(value),
            "seed" => self.seed = parse(value, "a nonnegative integer")?,
            "samples" => self.samples = parse(value, "an integer")?,
            _ => return Err(format!("unknown key `{key}`; known keys: {}", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Applies a config file on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        let bad = |line: usize, msg: String| ConfigError::Line { path: path.to_path_buf(), line, msg };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad(i + 1, format!("expected key = value, got `{line}`")))?;
            self.set(key.trim(), value.trim()).map_err(|msg| bad(i + 1, format!("{}: {msg}", key.trim())))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.to_path_buf(), source: e })?;
        let mut config = RunConfig::default();
        config.apply_text(&text, path)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = |field: &'static str, msg: String| Err(ConfigError::Field { field, msg });
        if !(self.t.is_finite() && self.t >= 100.0) {
            return field("T", format!("must be a finite number ≥ 100, got {}", self.t));
        }
        if self.k < 1 {
            return field("k", "must be at least 1".into());
        }
        if !self.a.is_finite() {
            return field("a", format!("must be finite, got {}", self.a));
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return field("l", format!("must be positive, got {}", self.l));
        }
        let bound = TOWER_SMALLNESS * self.t / self.t.ln();
        if 2.0 * self.l >= bound {
            return field("l", format!("2l = {} must stay below 0.01·T/ln T = {bound:.6} at T = {}", 2.0 * self.l, self.t));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return field("abs_tol", format!("must be positive, got {}", self.abs_tol));
        }
        if let Err(e) = (ZetaEngineConfig { rs_correction_order: self.rs_order, ..Default::default() }).validate() {
            return field("rs_order", e.to_string());
        }
        if let C0Mode::Fixed(c0) = self.c0 {
            if !c0.is_finite() {
                return field("c0", format!("must be finite, got {c0}"));
            }
        }
        if self.samples < 2 {
            return field("samples", format!("need at least 2, got {}", self.samples));
        }
        Ok(())
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn to_text(&self) -> String {
        let c0 = match self.c0 {
            C0Mode::Fixed(x) => x.to_string(),
            C0Mode::Calibrate => "calibrate".into(),
        };
        format!(
            "T = {}\nk = {}\ns = {}\na = {}\nl = {}\nbase = {}\nN = {}\nc0 = {c0}\nabs_tol = {}\nrs_order = {}\ncache = {}\nseed = {}\nsamples = {}\n",
            self.t,
            self.k,
            self.s,
            self.a,
            self.l,
            self.base,
            self.n,
            self.abs_tol,
            self.rs_order,
            self.cache.display(),
            self.seed,
            self.samples
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_is_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!((c.t, c.k, c.s, c.a, c.l, c.n), (1e4, 3, 2, -1.0, 1.0, 8));
    }

    #[test]
    fn file_round_trip() {
        let mut c = RunConfig { c0: C0Mode::Calibrate, base: BaseSpec::Cosine, seed: 9, ..Default::default() };
        c.t = 5000.0;
        let mut back = RunConfig::default();
        back.apply_text(&c.to_text(), Path::new("x.cfg")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_blank_lines() {
        let mut c = RunConfig::default();
        c.apply_text("# profile\n\nT = 5000  # lower\nk=2\n", Path::new("p.cfg")).unwrap();
        assert_eq!((c.t, c.k), (5000.0, 2));
    }

    #[test]
    fn errors_name_line_and_field() {
        let mut c = RunConfig::default();
        let err = c.apply_text("T = 1e4\nk = three\n", Path::new("run.cfg")).unwrap_err().to_string();
        assert!(err.starts_with("run.cfg:2:") && err.contains("k"), "{err}");
        let err = c.apply_text("bogus = 1\n", Path::new("run.cfg")).unwrap_err().to_string();
        assert!(err.contains("unknown key `bogus`"), "{err}");
        let err = c.apply_text("T 100\n", Path::new("run.cfg")).unwrap_err().to_string();
        assert!(err.contains("run.cfg:1"), "{err}");
    }

    #[test]
    fn every_invariant_is_checked() {
        let cases: [(&str, &str, &str); 8] = [
            ("T", "50", "T"),
            ("k", "0", "k"),
            ("l", "0", "l"),
            ("l", "20", "l"),
            ("a", "inf", "a"),
            ("abs_tol", "0", "abs_tol"),
            ("rs_order", "5", "rs_order"),
            ("samples", "1", "samples"),
        ];
        for (key, value, field) in cases {
            let mut c = RunConfig::default();
            c.set(key, value).unwrap();
            match c.validate() {
                Err(ConfigError::Field { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{key}={value}: {other:?}"),
            }
        }
    }

    #[test]
    fn base_names() {
        assert_eq!("legendre".parse::<BaseSpec>().unwrap(), BaseSpec::Legendre);
        assert_eq!("file:x.csv".parse::<BaseSpec>().unwrap(), BaseSpec::File("x.csv".into()));
        assert!("file:".parse::<BaseSpec>().is_err());
        assert!("hermite".parse::<BaseSpec>().is_err());
    }
}
