use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};

/// `P_n(x)` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("Legendre argument must lie in [-1, 1], got {x}")));
    }
    Ok(*legendre_all(n, x).last().expect("at least P_0"))
}

/// `[P_0(x), …, P_n(x)]`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
        out.push(next);
    }
    out
}

/// An orthogonal system on `[a, a + 2l]`.
pub trait OrthogonalSystem: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// `(a, l)`.
    fn interval(&self) -> (f64, f64);

    /// `f_0(t), …, f_{n_max}(t)`.
    fn eval_all(&self, n_max: usize, t: f64) -> Result<Vec<f64>>;

    fn eval(&self, n: usize, t: f64) -> Result<f64> {
        Ok(self.eval_all(n, t)?[n])
    }

    /// `∫ f_n²`.
    fn norm_sq(&self, n: usize) -> Result<f64>;

    /// Largest member index available, if finite.
    fn max_index(&self) -> Option<usize> {
        None
    }

    fn check_point(&self, t: f64) -> Result<()> {
        let (a, l) = self.interval();
        if t >= a && t <= a + 2.0 * l {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} outside [{a}, {}]", a + 2.0 * l)))
        }
    }
}

fn check_interval(a: f64, l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite() && a.is_finite()) {
        return Err(Error::Invalid(format!("need finite a and l > 0, got a = {a}, l = {l}")));
    }
    Ok(())
}

/// Legendre polynomials moved to `[a, a + 2l]`: `f_n(t) = P_n((t − a)/l − 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Legendre {
    pub a: f64,
    pub l: f64,
}

impl Legendre {
    pub fn new(a: f64, l: f64) -> Result<Self> {
        check_interval(a, l)?;
        Ok(Legendre { a, l })
    }
}

impl OrthogonalSystem for Legendre {
    fn name(&self) -> &str {
        "legendre"
    }

    fn interval(&self) -> (f64, f64) {
        (self.a, self.l)
    }

    fn eval_all(&self, n_max: usize, t: f64) -> Result<Vec<f64>> {
        self.check_point(t)?;
        let x = ((t - self.a) / self.l - 1.0).clamp(-1.0, 1.0);
        Ok(legendre_all(n_max, x))
    }

    fn norm_sq(&self, n: usize) -> Result<f64> {
        Ok(2.0 * self.l / (2 * n + 1) as f64)
    }
}

/// `f_n(t) = cos(nπ(t − a)/(2l))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cosine {
    pub a: f64,
    pub l: f64,
}

impl Cosine {
    pub fn new(a: f64, l: f64) -> Result<Self> {
        check_interval(a, l)?;
        Ok(Cosine { a, l })
    }
}

impl OrthogonalSystem for Cosine {
    fn name(&self) -> &str {
        "cosine"
    }

    fn interval(&self) -> (f64, f64) {
        (self.a, self.l)
    }

    fn eval_all(&self, n_max: usize, t: f64) -> Result<Vec<f64>> {
        self.check_point(t)?;
        let theta = std::f64::consts::PI * (t - self.a) / (2.0 * self.l);
        Ok((0..=n_max).map(|n| (n as f64 * theta).cos()).collect())
    }

    fn norm_sq(&self, n: usize) -> Result<f64> {
        Ok(if n == 0 { 2.0 * self.l } else { self.l })
    }
}

/// Sampled members on a grid, interpolated by cubic Hermite splines with
/// finite-difference slopes. Orthogonality of the interpolants is checked
/// when the system is registered.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    name: String,
    a: f64,
    l: f64,
    ts: Vec<f64>,
    columns: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl Tabulated {
    /// `columns[n][i]` is `f_n(ts[i])`; the grid must span `[a, a + 2l]`.
    /// Pairs `m ≠ n ≤ 8` must satisfy `|⟨f_m, f_n⟩| ≤ tol · ‖f_m‖‖f_n‖`.
    pub fn new(name: &str, ts: Vec<f64>, columns: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if ts.len() < 4 {
            return Err(Error::Invalid("a tabulated system needs at least 4 samples".into()));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("sample points must be strictly increasing".into()));
        }
        if columns.is_empty() || columns.iter().any(|c| c.len() != ts.len()) {
            return Err(Error::Invalid("every member needs one value per sample point".into()));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("sample values must be finite".into()));
        }
        let a = ts[0];
        let l = 0.5 * (ts[ts.len() - 1] - a);
        let slopes = columns.iter().map(|c| fd_slopes(&ts, c)).collect();
        let mut sys =
            Tabulated { name: name.to_string(), a, l, ts, columns, slopes, norms: Vec::new() };

        let kinks = sys.ts.clone();
        let spec = QuadratureSpec::default().with_abs_tol(1e-12).with_kinks(kinks);
        let n = sys.columns.len();
        sys.norms = (0..n)
            .map(|i| integrate(|t| sys.interp(i, t).powi(2), a, a + 2.0 * l, &spec).map(|q| q.value))
            .collect::<Result<_>>()?;
        let checked = n.min(9);
        for m in 0..checked {
            for k in m + 1..checked {
                let q = integrate(|t| sys.interp(m, t) * sys.interp(k, t), a, a + 2.0 * l, &spec)?;
                let scale = (sys.norms[m] * sys.norms[k]).sqrt();
                if q.value.abs() > tol * scale {
                    return Err(Error::Invalid(format!(
                        "tabulated members {m} and {k} are not orthogonal: <f_{m}, f_{k}> = {:e}",
                        q.value
                    )));
                }
            }
        }
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    fn interp(&self, n: usize, t: f64) -> f64 {
        let ts = &self.ts;
        let i = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1) - 1;
        let h = ts[i + 1] - ts[i];
        let s = ((t - ts[i]) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.columns[n][i], self.columns[n][i + 1]);
        let (m0, m1) = (self.slopes[n][i] * h, self.slopes[n][i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }
}

fn fd_slopes(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ts.len();
    (0..n)
        .map(|i| {
            let (j, k) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            (ys[k] - ys[j]) / (ts[k] - ts[j])
        })
        .collect()
}

impl OrthogonalSystem for Tabulated {
    fn name(&self) -> &str {
        &self.name
    }

    fn interval(&self) -> (f64, f64) {
        (self.a, self.l)
    }

    fn eval_all(&self, n_max: usize, t: f64) -> Result<Vec<f64>> {
        self.check_point(t)?;
        if n_max >= self.columns.len() {
            return Err(Error::Range(format!("tabulated system has members 0..{}", self.columns.len() - 1)));
        }
        Ok((0..=n_max).map(|n| self.interp(n, t)).collect())
    }

    fn norm_sq(&self, n: usize) -> Result<f64> {
        self.norms.get(n).copied().ok_or_else(|| Error::Range(format!("no member {n}")))
    }

    fn max_index(&self) -> Option<usize> {
        Some(self.columns.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_and_endpoint() {
        for &x in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(legendre(0, x).unwrap(), 1.0);
            assert_eq!(legendre(1, x).unwrap(), x);
        }
        for n in 0..=20 {
            assert!((legendre(n, 1.0).unwrap() - 1.0).abs() < 1e-14);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre(n, -1.0).unwrap() - sign).abs() < 1e-14);
        }
        assert!(legendre(3, 1.5).is_err());
    }

    #[test]
    fn generating_function() {
        let (x, u) = (0.3f64, 0.4f64);
        let ps = legendre_all(30, x);
        let series: f64 = ps.iter().enumerate().map(|(n, p)| p * u.powi(n as i32)).sum();
        let closed = (1.0 - 2.0 * x * u + u * u).powf(-0.5);
        assert!((series - closed).abs() < 1e-10);
    }

    #[test]
    fn closed_forms() {
        let x = 0.37;
        let p = legendre_all(4, x);
        assert!((p[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
        assert!((p[4] - (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0).abs() < 1e-15);
    }

    fn gram(sys: &dyn OrthogonalSystem, n: usize) -> Vec<Vec<f64>> {
        let (a, l) = sys.interval();
        let spec = QuadratureSpec::default().with_abs_tol(1e-13);
        (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        integrate(|t| sys.eval(i, t).unwrap() * sys.eval(j, t).unwrap(), a, a + 2.0 * l, &spec)
                            .unwrap()
                            .value
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn shipped_systems_are_orthogonal_with_known_norms() {
        let systems: Vec<Box<dyn OrthogonalSystem>> =
            vec![Box::new(Legendre::new(3.0, 0.75).unwrap()), Box::new(Cosine::new(-2.0, 1.5).unwrap())];
        for sys in &systems {
            let g = gram(sys.as_ref(), 8);
            for m in 0..=8 {
                for n in 0..=8 {
                    if m == n {
                        assert!((g[m][n] - sys.norm_sq(n).unwrap()).abs() < 1e-12, "{} {n}", sys.name());
                    } else {
                        assert!(g[m][n].abs() < 1e-12, "{} {m} {n}", sys.name());
                    }
                }
            }
        }
    }

    #[test]
    fn points_outside_the_interval() {
        let sys = Legendre::new(-1.0, 1.0).unwrap();
        assert!(sys.eval(2, 1.0).is_ok());
        assert!(matches!(sys.eval(2, 1.01), Err(Error::Domain(_))));
        assert!(Legendre::new(0.0, -1.0).is_err());
    }

    #[test]
    fn tabulated_legendre_registers_and_rejects_junk() {
        let ts: Vec<f64> = (0..=4000).map(|i| -1.0 + i as f64 / 2000.0).collect();
        let cols: Vec<Vec<f64>> = (0..=5).map(|n| ts.iter().map(|&x| legendre(n, x).unwrap()).collect()).collect();
        let tab = Tabulated::new("legendre-samples", ts.clone(), cols, 1e-6).unwrap();
        assert_eq!(tab.interval(), (-1.0, 1.0));
        assert!((tab.norm_sq(3).unwrap() - 2.0 / 7.0).abs() < 1e-9);
        assert!((tab.eval(4, 0.123).unwrap() - legendre(4, 0.123).unwrap()).abs() < 1e-9);
        assert!(tab.eval_all(6, 0.0).is_err());

        let junk: Vec<Vec<f64>> = vec![ts.iter().map(|_| 1.0).collect(), ts.iter().map(|&x| x * x).collect()];
        assert!(Tabulated::new("junk", ts, junk, 1e-6).is_err());
    }
}
