use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::base::Tabulated;
use super::generated::GeneratedSystem;
use crate::dd::Dd;
use crate::error::{Error, Result};

const HEADER: &str = "# generated v1";

#[derive(Clone, Debug, PartialEq)]
pub struct SampleHeader {
    pub base: String,
    pub path: Vec<usize>,
    pub t: f64,
    pub k: usize,
    pub a: f64,
    pub l: f64,
}

impl SampleHeader {
    pub fn line(&self) -> String {
        let path = self.path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-");
        format!("{HEADER} base={} path={path} T={} k={} a={} l={}", self.base, self.t, self.k, self.a, self.l)
    }
}

/// Members `0..=n_max` of `sys` at `samples` equally spaced points of
/// `[a, a + 2l]`, endpoints included, as CSV text. With `normalize` each
/// column is scaled to unit `L²` norm.
pub fn write_samples(sys: &GeneratedSystem, n_max: usize, samples: usize, normalize: bool) -> Result<String> {
    if samples < 2 {
        return Err(Error::Invalid("need at least 2 sample points".into()));
    }
    let g = sys.generator();
    let header = SampleHeader {
        base: sys.base().name().to_string(),
        path: sys.path().to_vec(),
        t: g.t(),
        k: g.k(),
        a: g.a(),
        l: g.l(),
    };
    let factors: Vec<f64> = if normalize {
        (0..=n_max).map(|n| sys.normalization_factor(n)).collect::<Result<_>>()?
    } else {
        vec![1.0; n_max + 1]
    };
    let a = Dd::from(g.a());
    let width = Dd::from(2.0 * g.l());
    let rows: Vec<(f64, Vec<f64>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let t = if i + 1 == samples { a + width } else { a + width * (i as f64) / ((samples - 1) as f64) };
            let vals = sys.members_dd(n_max, t)?;
            Ok((t.hi, vals.iter().zip(&factors).map(|(v, f)| v * f).collect()))
        })
        .collect::<Result<_>>()?;

    let mut out = String::with_capacity(samples * (n_max + 2) * 24);
    out.push_str(&header.line());
    out.push('\n');
    for (t, vals) in rows {
        write!(out, "{t:.16e}").expect("writing to a string");
        for v in vals {
            write!(out, ",{v:.16e}").expect("writing to a string");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses sample CSV text; `source` names the origin in errors.
pub fn read_samples(text: &str, source: &Path) -> Result<(SampleHeader, Vec<f64>, Vec<Vec<f64>>)> {
    let bad = |line: usize, msg: String| Error::Parse { path: source.to_path_buf(), line, msg };
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| bad(1, "empty input".into()))?;
    let rest = first.strip_prefix(HEADER).ok_or_else(|| bad(1, format!("expected `{HEADER} ...` header")))?;
    let mut header = SampleHeader { base: String::new(), path: Vec::new(), t: f64::NAN, k: 0, a: f64::NAN, l: f64::NAN };
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| bad(1, format!("malformed field `{field}`")))?;
        let num = || value.parse::<f64>().map_err(|_| bad(1, format!("bad number in `{field}`")));
        match key {
            "base" => header.base = value.to_string(),
            "path" => {
                header.path = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split('-')
                        .map(|p| p.parse::<usize>().map_err(|_| bad(1, format!("bad path entry `{p}`"))))
                        .collect::<Result<_>>()?
                }
            }
            "T" => header.t = num()?,
            "k" => header.k = value.parse().map_err(|_| bad(1, format!("bad k `{value}`")))?,
            "a" => header.a = num()?,
            "l" => header.l = num()?,
            _ => return Err(bad(1, format!("unknown field `{key}`"))),
        }
    }
    let mut ts = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| bad(n + 1, format!("bad number `{c}`"))))
            .collect::<Result<_>>()?;
        if vals.len() < 2 {
            return Err(bad(n + 1, "need t and at least one member".into()));
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); vals.len() - 1];
        } else if columns.len() != vals.len() - 1 {
            return Err(bad(n + 1, format!("expected {} members, found {}", columns.len(), vals.len() - 1)));
        }
        ts.push(vals[0]);
        for (c, v) in columns.iter_mut().zip(&vals[1..]) {
            c.push(*v);
        }
    }
    if ts.is_empty() {
        return Err(bad(2, "no samples".into()));
    }
    Ok((header, ts, columns))
}

impl Tabulated {
    /// Ingests a sample file in the export format.
    pub fn from_file(path: &Path, tol: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (header, ts, columns) = read_samples(&text, path)?;
        let name = if header.path.is_empty() {
            header.base.clone()
        } else {
            format!("{}[{}]", header.base, header.path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-"))
        };
        Tabulated::new(&name, ts, columns, tol)
    }
}
