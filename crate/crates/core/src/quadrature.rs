//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Panels are refined level by level: every panel still above its share of
//! the tolerance is compared against the sum of its two halves, and the
//! halves become the next level. Refinement stops early once the accepted
//! and pending error estimates together fit the tolerance. Evaluation of a
//! level runs in parallel but results are reduced in panel order, so values
//! are reproducible.
//!
//! Abscissae are double-double so integrands over far-away intervals (the
//! ladder works near `t = 10^4`) keep full resolution in `t`. The integrand
//! value type is generic: `f64`, [`Dd`], or `Vec<f64>` for several
//! integrals sharing one set of nodes.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Dd>,
    pub weights: Vec<Dd>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n`, finished in double-double.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = guess;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let mut xd = Dd::from(x);
            for _ in 0..2 {
                let (p, dp) = legendre_with_derivative_dd(n, xd);
                xd = xd - p / dp;
            }
            let (_, dp) = legendre_with_derivative_dd(n, xd);
            let w = Dd::from(2.0) / ((Dd::ONE - xd.sqr()) * dp.sqr());
            nodes.push(xd);
            weights.push(w);
        }
        nodes.reverse();
        weights.reverse();
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Shared rule of the given order; orders 8, 16 and 32 are cached.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static G8: OnceLock<GaussLegendre> = OnceLock::new();
        static G16: OnceLock<GaussLegendre> = OnceLock::new();
        static G32: OnceLock<GaussLegendre> = OnceLock::new();
        static OTHER: OnceLock<std::sync::Mutex<Vec<&'static GaussLegendre>>> = OnceLock::new();
        match n {
            8 => G8.get_or_init(|| GaussLegendre::new(8)),
            16 => G16.get_or_init(|| GaussLegendre::new(16)),
            32 => G32.get_or_init(|| GaussLegendre::new(32)),
            _ => {
                let mut other = OTHER.get_or_init(Default::default).lock().unwrap();
                if let Some(rule) = other.iter().find(|r| r.order() == n) {
                    return rule;
                }
                let rule: &'static GaussLegendre = Box::leak(Box::new(GaussLegendre::new(n)));
                other.push(rule);
                rule
            }
        }
    }

    /// Single-panel rule on `[a, b]`.
    pub fn apply<V: QuadValue>(&self, a: Dd, b: Dd, f: impl Fn(Dd) -> V) -> V {
        self.panel(a, b, &f).0
    }

    fn panel<V: QuadValue>(&self, a: Dd, b: Dd, f: &impl Fn(Dd) -> V) -> (V, f64) {
        let mid = (a + b).mul_f64(0.5);
        let half = (b - a).mul_f64(0.5);
        let mut sum: Option<V> = None;
        let mut abs_sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * *x);
            abs_sum += w.hi * v.magnitude();
            match sum.as_mut() {
                Some(s) => s.add_weighted(*w, &v),
                None => sum = Some(v.weighted(*w)),
            }
        }
        let sum = sum.expect("rule has at least one node").weighted(half);
        (sum, abs_sum * half.hi.abs())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

fn legendre_with_derivative_dd(n: usize, x: Dd) -> (Dd, Dd) {
    let (mut p0, mut p1) = (Dd::ONE, x);
    for k in 1..n {
        let p2 = (x * p1 * ((2 * k + 1) as f64) - p0 * (k as f64)) / ((k + 1) as f64);
        p0 = p1;
        p1 = p2;
    }
    let dp = (x * p1 - p0) * (n as f64) / (x.sqr() - 1.0);
    (p1, dp)
}

/// Values a quadrature can accumulate.
pub trait QuadValue: Clone + Send + Sync {
    /// `w * self`.
    fn weighted(&self, w: Dd) -> Self;
    /// `self += w * x`.
    fn add_weighted(&mut self, w: Dd, x: &Self);
    /// Size used for tolerances (max-norm for vectors).
    fn magnitude(&self) -> f64;
    /// Max-norm distance.
    fn distance(&self, other: &Self) -> f64;
}

impl QuadValue for f64 {
    fn weighted(&self, w: Dd) -> Self {
        w.hi * self
    }
    fn add_weighted(&mut self, w: Dd, x: &Self) {
        *self += w.hi * x;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl QuadValue for Dd {
    fn weighted(&self, w: Dd) -> Self {
        w * *self
    }
    fn add_weighted(&mut self, w: Dd, x: &Self) {
        *self += w * *x;
    }
    fn magnitude(&self) -> f64 {
        self.hi.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (*self - *other).hi.abs()
    }
}

impl QuadValue for Vec<f64> {
    fn weighted(&self, w: Dd) -> Self {
        self.iter().map(|x| w.hi * x).collect()
    }
    fn add_weighted(&mut self, w: Dd, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += w.hi * v;
        }
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Points per Gauss–Legendre panel.
    pub order: usize,
    pub abs_tol: f64,
    /// Relative tolerance against the magnitude of the integral.
    pub rel_tol: f64,
    /// Relative accuracy of the integrand values. Panels whose estimated
    /// error is below this fraction of `sum |w f|` are accepted.
    pub noise_floor: f64,
    pub max_depth: usize,
    /// Points to pre-split panels at. A kink left inside a panel can fool
    /// the halving estimate, so every known one belongs here.
    pub kink_hints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 16,
            abs_tol: 1e-9,
            rel_tol: 0.0,
            noise_floor: 16.0 * f64::EPSILON,
            max_depth: 30,
            kink_hints: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kink_hints = kinks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 4 {
            return Err(Error::Invalid(format!("quadrature order must be at least 4, got {}", self.order)));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::Invalid(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol >= 0.0) || !(self.noise_floor >= 0.0) {
            return Err(Error::Invalid("rel_tol and noise_floor must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Quadrature<V> {
    pub value: V,
    pub error: f64,
    pub panels: usize,
    pub evaluations: usize,
    /// False when some panel hit `max_depth` above its tolerance.
    pub converged: bool,
}

struct Panel<V> {
    a: Dd,
    b: Dd,
    whole: V,
    depth: usize,
}

/// `∫_a^b f` for an `f64` integrand of an `f64` variable.
pub fn integrate(f: impl Fn(f64) -> f64 + Sync, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature<f64>> {
    integrate_dd(|t: Dd| f(t.hi), Dd::from(a), Dd::from(b), spec)
}

/// `∫_a^b f` with double-double limits and abscissae.
pub fn integrate_dd<V: QuadValue>(
    f: impl Fn(Dd) -> V + Sync,
    a: Dd,
    b: Dd,
    spec: &QuadratureSpec,
) -> Result<Quadrature<V>> {
    let q = integrate_dd_best_effort(f, a, b, spec)?;
    if !q.converged {
        return Err(Error::ToleranceNotMet { value: q.value.magnitude(), estimate: q.error });
    }
    Ok(q)
}

/// Like [`integrate_dd`], but a result that missed its tolerance is
/// returned with `converged == false` instead of as an error.
pub fn integrate_dd_best_effort<V: QuadValue>(
    f: impl Fn(Dd) -> V + Sync,
    a: Dd,
    b: Dd,
    spec: &QuadratureSpec,
) -> Result<Quadrature<V>> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    if b < a {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let rule = GaussLegendre::cached(spec.order);
    let width = (b - a).hi;

    let mut cuts = vec![a];
    let mut hints: Vec<f64> = spec.kink_hints.iter().copied().filter(|&k| k > a.hi && k < b.hi).collect();
    hints.sort_by(f64::total_cmp);
    hints.dedup();
    cuts.extend(hints.into_iter().map(Dd::from));
    cuts.push(b);

    let mut level: Vec<Panel<V>> = cuts
        .windows(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let (whole, _) = rule.panel(w[0], w[1], &f);
            Panel { a: w[0], b: w[1], whole, depth: 0 }
        })
        .collect();
    let mut evaluations = level.len() * rule.order();
    let mut total = level.iter().skip(1).fold(level[0].whole.clone(), |mut s, p| {
        s.add_weighted(Dd::ONE, &p.whole);
        s
    });

    let mut accepted: Vec<(Dd, V, f64)> = Vec::new();
    let mut error = 0.0;
    let mut failed = false;
    while !level.is_empty() {
        let tol = spec.abs_tol.max(spec.rel_tol * total.magnitude());
        let refined: Vec<(Panel<V>, V, V, V, f64, f64)> = level
            .into_par_iter()
            .map(|p| {
                let m = (p.a + p.b).mul_f64(0.5);
                let (left, la) = rule.panel(p.a, m, &f);
                let (right, ra) = rule.panel(m, p.b, &f);
                let mut both = left.clone();
                both.add_weighted(Dd::ONE, &right);
                let err = both.distance(&p.whole);
                (p, left, right, both, err, la + ra)
            })
            .collect();
        evaluations += refined.len() * 2 * rule.order();
        let settled = error + refined.iter().map(|r| r.4).sum::<f64>() <= tol;

        let mut next = Vec::new();
        for (p, left, right, both, err, abs_sum) in refined {
            let share = if width > 0.0 { (p.b - p.a).hi / width } else { 1.0 };
            let converged = settled || err <= tol * share || err <= spec.noise_floor * abs_sum;
            if converged || p.depth + 1 >= spec.max_depth {
                if !converged {
                    failed = true;
                }
                error += err;
                total.add_weighted(Dd::ONE, &both);
                total.add_weighted(Dd::from(-1.0), &p.whole);
                accepted.push((p.a, both, err));
            } else {
                let m = (p.a + p.b).mul_f64(0.5);
                total.add_weighted(Dd::ONE, &both);
                total.add_weighted(Dd::from(-1.0), &p.whole);
                next.push(Panel { a: p.a, b: m, whole: left, depth: p.depth + 1 });
                next.push(Panel { a: m, b: p.b, whole: right, depth: p.depth + 1 });
            }
        }
        level = next;
    }

    accepted.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite limits"));
    let panels = accepted.len();
    let mut iter = accepted.into_iter();
    let mut value = iter.next().expect("at least one panel").1;
    for (_, v, _) in iter {
        value.add_weighted(Dd::ONE, &v);
    }
    Ok(Quadrature { value, error, panels, evaluations, converged: !failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre(n: usize, x: f64) -> f64 {
        legendre_with_derivative(n, x).0
    }

    #[test]
    fn nodes_and_weights_are_symmetric_and_sum_to_two() {
        for n in [4, 8, 16, 32] {
            let rule = GaussLegendre::new(n);
            let total = rule.weights.iter().fold(Dd::ZERO, |s, w| s + *w);
            assert!((total - 2.0).hi.abs() < 1e-28, "n = {n}");
            for i in 0..n {
                assert!((rule.nodes[i] + rule.nodes[n - 1 - i]).hi.abs() < 1e-30);
                assert!(rule.nodes[i] < rule.nodes.get(i + 1).copied().unwrap_or(Dd::from(2.0)));
            }
        }
    }

    #[test]
    fn gl16_is_exact_for_degree_31() {
        let rule = GaussLegendre::cached(16);
        let v: Dd = rule.apply(Dd::ZERO, Dd::ONE, |x| {
            let mut p = Dd::ONE;
            for _ in 0..31 {
                p = p * x;
            }
            p
        });
        assert!((v - Dd::ONE / 32.0).hi.abs() < 1e-29, "{}", (v - Dd::ONE / 32.0).hi);
    }

    #[test]
    fn square_on_unit_interval() {
        let q = integrate(|x| x * x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn odd_legendre_product_vanishes() {
        let q = integrate(|x| legendre(2, x) * legendre(3, x), -1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!(q.value.abs() < 1e-12);
    }

    #[test]
    fn p3_norm() {
        let spec = QuadratureSpec::default();
        let q = integrate(|x| legendre(3, x).powi(2), -1.0, 1.0, &spec).unwrap();
        assert!((q.value - 2.0 / 7.0).abs() < 1e-10);
        let deep = QuadratureSpec { order: 8, abs_tol: 1e-15, ..spec };
        let oracle = integrate(|x| legendre(3, x).powi(2), -1.0, 1.0, &deep).unwrap();
        assert!((q.value - oracle.value).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_and_kinked_integrands() {
        let spec = QuadratureSpec::default();
        let q = integrate(|x| (40.0 * x).cos(), 0.0, 3.0, &spec).unwrap();
        assert!((q.value - (120.0f64).sin() / 40.0).abs() < 1e-11);

        let hinted = spec.clone().with_kinks(vec![0.3]);
        let q = integrate(|x| (x - 0.3).abs(), 0.0, 1.0, &hinted).unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(q.panels, 2);

        let q = integrate(|x| (x - 0.3).abs(), 0.0, 1.0, &spec).unwrap();
        assert!((q.value - 0.29).abs() < 1e-9);
        assert!(q.panels > 2);
    }

    #[test]
    fn tighter_tolerance_stays_within_previous_estimate() {
        let f = |x: f64| (1.0 + 25.0 * x * x).recip();
        let exact = 2.0 * (5.0f64).atan() / 5.0;
        let mut prev: Option<Quadrature<f64>> = None;
        for tol in [1e-4, 5e-5, 2.5e-5, 1e-6, 1e-9] {
            let q = integrate(f, -1.0, 1.0, &QuadratureSpec::default().with_abs_tol(tol)).unwrap();
            assert!((q.value - exact).abs() <= tol.max(q.error));
            if let Some(p) = prev {
                assert!((q.value - p.value).abs() <= p.error.max(1e-15));
            }
            prev = Some(q);
        }
    }

    #[test]
    fn dd_and_vector_values() {
        let q = integrate_dd(|t: Dd| t.sqr(), Dd::from(1e4), Dd::from(1e4 + 2.0), &QuadratureSpec::default()).unwrap();
        let exact = (Dd::from(1e4 + 2.0).sqr() * (1e4 + 2.0) - Dd::from(1e4).sqr() * 1e4) / 3.0;
        assert!((q.value - exact).hi.abs() < 1e-20 * exact.hi);

        let q = integrate_dd(|t: Dd| vec![1.0, t.hi, t.hi * t.hi], Dd::ZERO, Dd::ONE, &QuadratureSpec::default())
            .unwrap();
        assert!((q.value[0] - 1.0).abs() < 1e-15);
        assert!((q.value[1] - 0.5).abs() < 1e-15);
        assert!((q.value[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn max_depth_reports_best_value() {
        let spec = QuadratureSpec { max_depth: 3, abs_tol: 1e-14, noise_floor: 0.0, ..Default::default() };
        match integrate(|x| x.abs().sqrt(), -1.0, 1.0, &spec) {
            Err(Error::ToleranceNotMet { value, estimate }) => {
                assert!((value - 4.0 / 3.0).abs() < 1e-3);
                assert!(estimate > 0.0);
            }
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec { order: 3, ..Default::default() }.validate().is_err());
        assert!(QuadratureSpec::default().with_abs_tol(0.0).validate().is_err());
        assert!(integrate(|x| x, 1.0, 0.0, &QuadratureSpec::default()).is_err());
    }
}
