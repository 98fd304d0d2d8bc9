use crate::dd::Dd;
use crate::error::Result;
use crate::generator::{Generator, OrthogonalSystem};
use crate::quadrature::{integrate_dd, QuadratureSpec};
use crate::report::{num, nums, Report};

use super::gram::MEMBER_NOISE_FLOOR;

/// The four integrals of one generation step for members `m`, `n`:
///
/// 0. `∫_a^{a+2l} f_m f_n`
/// 1. the same over `[T, T + 2l]` after the shift `τ − T + a`
/// 2. over the reverse segment `[T⁽ᵖ⁾, (T+2l)⁽ᵖ⁾]` with the ladder substitution
/// 3. `(len_p/2l) ∫_a^{a+2l} f_mᵖ f_nᵖ`
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub values: [f64; 4],
    pub errors: [f64; 4],
    /// `len_p / 2l`.
    pub scale: f64,
}

impl ChainReport {
    /// Largest pairwise difference between the four values.
    pub fn spread(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                d = d.max((self.values[i] - self.values[j]).abs());
            }
        }
        d
    }

    pub fn quad_error(&self) -> f64 {
        self.errors.iter().sum()
    }

    pub fn to_report(&self, tol: f64) -> Report {
        let mut r = Report::new("chain").input("m", self.m).input("n", self.n).input("p", self.p);
        r.values = nums(&self.values);
        r.residuals = nums(&[
            self.values[1] - self.values[0],
            self.values[2] - self.values[1],
            self.values[3] - self.values[2],
        ]);
        r.quad_error = num(self.quad_error());
        r.pass = self.spread() <= tol.max(5.0 * self.quad_error());
        r
    }
}

pub fn check_theorem_equality_chain(
    generator: &Generator,
    base: &dyn OrthogonalSystem,
    m: usize,
    n: usize,
    p: usize,
    spec: &QuadratureSpec,
) -> Result<ChainReport> {
    let a = generator.a();
    let l = generator.l();
    let t = generator.t();
    let spec = &QuadratureSpec { noise_floor: spec.noise_floor.max(MEMBER_NOISE_FLOOR), ..spec.clone() };
    let hi_n = m.max(n);
    let top = a + 2.0 * l;
    let product = |x: f64| -> f64 {
        let f = base.eval_all(hi_n, x.clamp(a, top)).expect("point clamped into the interval");
        f[m] * f[n]
    };

    let v0 = integrate_dd(|x: Dd| product(x.hi), Dd::from(a), Dd::from(top), spec)?;
    let v1 = integrate_dd(|tau: Dd| product((tau - t + a).hi), Dd::from(t), Dd::from(t) + 2.0 * l, spec)?;

    let tower = generator.tower();
    let ladder = generator.ladder();
    let kinks = generator.kink_points(&[p])?;
    let seg_kinks: Vec<f64> = kinks.iter().map(|&x| (tower.lo(p) + generator.scale(p) * (x - a)).hi).collect();
    let seg_spec = QuadratureSpec { kink_hints: seg_kinks, ..spec.clone() };
    let v2 = integrate_dd(
        |rho: Dd| {
            let (xs, jac) = ladder.orbit(rho, p).expect("orbit inside the tower");
            product((xs[p] - t + a).hi) * jac
        },
        tower.lo(p),
        tower.hi(p),
        &seg_spec,
    )?;

    let step_spec = QuadratureSpec { kink_hints: kinks, ..spec.clone() };
    let step = |x: Dd| -> f64 {
        let (u, w) = generator.step_dd(p, x).expect("step inside the interval");
        product(u.hi) * w * w
    };
    let v3 = integrate_dd(step, Dd::from(a), Dd::from(top), &step_spec)?;
    let scale = generator.scale(p).hi;

    Ok(ChainReport {
        m,
        n,
        p,
        values: [v0.value, v1.value, v2.value, scale * v3.value],
        errors: [v0.error, v1.error, v2.error, scale * v3.error],
        scale,
    })
}
