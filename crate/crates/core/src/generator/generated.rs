use std::sync::{Arc, OnceLock};

use super::base::OrthogonalSystem;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ladder::{IterationTower, JacobsLadder};

/// Shared context of one generation step: the ladder and the tower built
/// from `(T, k, l)` with `l` the half-length of the base interval.
#[derive(Debug)]
pub struct Generator {
    ladder: Arc<JacobsLadder>,
    tower: IterationTower,
    a: f64,
    l: f64,
    zeros: OnceLock<Vec<Vec<f64>>>,
}

impl Generator {
    pub fn new(ladder: Arc<JacobsLadder>, t: f64, k: usize, a: f64, l: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("k must be at least 1".into()));
        }
        if !a.is_finite() {
            return Err(Error::Invalid(format!("a must be finite, got {a}")));
        }
        let tower = IterationTower::build(&ladder, t, k, l)?;
        Ok(Generator { ladder, tower, a, l, zeros: OnceLock::new() })
    }

    pub fn ladder(&self) -> &JacobsLadder {
        &self.ladder
    }

    pub fn tower(&self) -> &IterationTower {
        &self.tower
    }

    pub fn k(&self) -> usize {
        self.tower.k
    }

    pub fn t(&self) -> f64 {
        self.tower.t
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    fn check_p(&self, p: usize) -> Result<()> {
        if p == 0 || p > self.k() {
            return Err(Error::Invalid(format!("index {p} outside 1..={}", self.k())));
        }
        Ok(())
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t >= self.a && t <= self.a + 2.0 * self.l {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} outside [{}, {}]", self.a, self.a + 2.0 * self.l)))
        }
    }

    /// `(len_p / 2l)`, the slope of the affine map onto segment `p`.
    pub fn scale(&self, p: usize) -> Dd {
        self.tower.length_dd(p) / (2.0 * self.l)
    }

    /// `T⁽ᵖ⁾ + (len_p/2l)(t − a)`.
    fn affine(&self, p: usize, t: Dd) -> Dd {
        self.tower.lo(p) + self.scale(p) * (t - self.a)
    }

    fn clamp(&self, x: Dd) -> Dd {
        let lo = Dd::from(self.a);
        let hi = Dd::from(self.a) + 2.0 * self.l;
        if x < lo {
            lo
        } else if x > hi {
            hi
        } else {
            x
        }
    }

    /// `u_p(t)` together with the weight `∏_{r<p} |Z̃(v_pʳ(t))|`.
    pub fn step_dd(&self, p: usize, t: Dd) -> Result<(Dd, f64)> {
        let (xs, jac) = self.ladder.orbit(self.affine(p, t), p)?;
        let u = xs[p] - self.tower.t + self.a;
        Ok((self.clamp(u), jac.sqrt()))
    }

    pub fn u_map(&self, t: f64, p: usize) -> Result<f64> {
        self.check_p(p)?;
        self.check_t(t)?;
        Ok(self.step_dd(p, Dd::from(t))?.0.to_f64())
    }

    pub fn u_map_dd(&self, t: Dd, p: usize) -> Result<Dd> {
        self.check_p(p)?;
        Ok(self.step_dd(p, t)?.0)
    }

    /// `u_p⁻¹(x) = a + (φ₁⁻ᵖ(x + T − a) − T⁽ᵖ⁾) · 2l/len_p`.
    pub fn u_inverse_dd(&self, x: Dd, p: usize) -> Result<Dd> {
        self.check_p(p)?;
        let y = self.ladder.phi1_inverse_iter_dd(x + self.tower.t - self.a, p)?;
        Ok(self.clamp((y - self.tower.lo(p)) / self.scale(p) + self.a))
    }

    /// `v_pʳ(t) = φ₁ʳ(T⁽ᵖ⁾ + (len_p/2l)(t − a))`.
    pub fn v_map(&self, t: f64, p: usize, r: usize) -> Result<f64> {
        self.check_p(p)?;
        self.check_t(t)?;
        if r >= p {
            return Err(Error::Invalid(format!("r = {r} must be below p = {p}")));
        }
        Ok(self.ladder.phi1_iter_dd(self.affine(p, Dd::from(t)), r)?.to_f64())
    }

    /// `∏_{r<p} |Z̃(v_pʳ(t))|`.
    pub fn weight(&self, t: f64, p: usize) -> Result<f64> {
        self.check_p(p)?;
        self.check_t(t)?;
        Ok(self.step_dd(p, Dd::from(t))?.1)
    }

    /// One application of the operator: `t ↦ f(u_p(t)) ∏_{r<p} |Z̃(v_pʳ(t))|`.
    pub fn g_step<'a>(
        &'a self,
        f: impl Fn(Dd) -> Result<f64> + 'a,
        p: usize,
    ) -> Result<impl Fn(Dd) -> Result<f64> + 'a> {
        self.check_p(p)?;
        Ok(move |t: Dd| {
            let (u, w) = self.step_dd(p, t)?;
            Ok(f(u)? * w)
        })
    }

    /// Zeros of `Z` and Riemann–Siegel block boundaries on each segment
    /// `[T⁽ʳ⁾, (T+2l)⁽ʳ⁾]`, `r = 1..=k`.
    fn segment_singularities(&self) -> &Vec<Vec<f64>> {
        self.zeros.get_or_init(|| {
            let engine = self.ladder.table().engine().clone();
            (0..=self.k())
                .map(|r| {
                    if r == 0 {
                        return Vec::new();
                    }
                    let (lo, hi) = (self.tower.lo(r).hi, self.tower.hi(r).hi);
                    let mut pts = engine.zeros_in(lo, hi).unwrap_or_default();
                    pts.extend(engine.breakpoints_in(lo, hi).into_iter().map(|b| b.hi));
                    pts.sort_by(f64::total_cmp);
                    pts
                })
                .collect()
        })
    }

    /// Points of `[a, a + 2l]` where a member along `path` may fail to be
    /// smooth: preimages of zeros of `Z` (kinks of `|Z̃|`) and of the
    /// Riemann–Siegel block boundaries under the nested maps.
    pub fn kink_points(&self, path: &[usize]) -> Result<Vec<f64>> {
        self.validate_path(path)?;
        let sing = self.segment_singularities();
        let mut out = Vec::new();
        for (i, &p) in path.iter().enumerate() {
            for r in 0..p {
                for &z in &sing[p - r] {
                    let rho = self.ladder.phi1_inverse_iter_dd(Dd::from(z), r)?;
                    let mut x = (rho - self.tower.lo(p)) / self.scale(p) + self.a;
                    if x.hi <= self.a || x.hi >= self.a + 2.0 * self.l {
                        continue;
                    }
                    for &q in path[i + 1..].iter() {
                        x = self.u_inverse_dd(x, q)?;
                    }
                    out.push(x.hi);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Ok(out)
    }

    pub fn validate_path(&self, path: &[usize]) -> Result<()> {
        for (i, &p) in path.iter().enumerate() {
            if p == 0 || p > self.k() {
                return Err(Error::Invalid(format!(
                    "path entry {} is {p}; entries must lie in 1..={}",
                    i + 1,
                    self.k()
                )));
            }
        }
        Ok(())
    }
}

/// All `k^s` index paths of length `s`, in lexicographic order.
pub fn enumerate_paths(k: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=k).map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    out
}

/// `{f_n^{p₁,…,p_s}}`: a base system pushed through the path.
#[derive(Clone, Debug)]
pub struct GeneratedSystem {
    base: Arc<dyn OrthogonalSystem>,
    generator: Arc<Generator>,
    path: Vec<usize>,
}

impl GeneratedSystem {
    pub fn new(base: Arc<dyn OrthogonalSystem>, generator: Arc<Generator>, path: Vec<usize>) -> Result<Self> {
        let (a, l) = base.interval();
        if a != generator.a || l != generator.l {
            return Err(Error::Invalid(format!(
                "base interval [{a}, {}] differs from the generator's [{}, {}]",
                a + 2.0 * l,
                generator.a,
                generator.a + 2.0 * generator.l
            )));
        }
        generator.validate_path(&path)?;
        Ok(GeneratedSystem { base, generator, path })
    }

    pub fn base(&self) -> &dyn OrthogonalSystem {
        self.base.as_ref()
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    /// `"1-2-3"`.
    pub fn path_label(&self) -> String {
        self.path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.generator.a, self.generator.a + 2.0 * self.generator.l)
    }

    /// The composed map `u_{p₁} ∘ … ∘ u_{p_s}` and the accumulated weight.
    pub fn fold_dd(&self, t: Dd) -> Result<(Dd, f64)> {
        let mut x = t;
        let mut w = 1.0;
        for &p in self.path.iter().rev() {
            let (u, wp) = self.generator.step_dd(p, x)?;
            x = u;
            w *= wp;
        }
        Ok((x, w))
    }

    pub fn automorphism(&self, t: f64) -> Result<f64> {
        self.generator.check_t(t)?;
        Ok(self.fold_dd(Dd::from(t))?.0.to_f64())
    }

    /// `f_0^{path}(t), …, f_{n_max}^{path}(t)`.
    pub fn members_dd(&self, n_max: usize, t: Dd) -> Result<Vec<f64>> {
        let (x, w) = self.fold_dd(t)?;
        let mut vals = self.base.eval_all(n_max, x.to_f64())?;
        for v in &mut vals {
            *v *= w;
        }
        Ok(vals)
    }

    pub fn members(&self, n_max: usize, t: f64) -> Result<Vec<f64>> {
        self.generator.check_t(t)?;
        self.members_dd(n_max, Dd::from(t))
    }

    pub fn member(&self, n: usize, t: f64) -> Result<f64> {
        Ok(self.members(n, t)?[n])
    }

    /// `∏_j √(len_{p_j}/2l)`; times `1/√‖f_n‖²` it makes member `n` unit-norm.
    pub fn scaling_factor(&self) -> f64 {
        self.path.iter().map(|&p| self.generator.scale(p).hi.sqrt()).product()
    }

    pub fn normalization_factor(&self, n: usize) -> Result<f64> {
        Ok(self.scaling_factor() / self.base.norm_sq(n)?.sqrt())
    }

    pub fn kink_points(&self) -> Result<Vec<f64>> {
        self.generator.kink_points(&self.path)
    }
}
