use crate::dd::Dd;
use crate::error::Result;
use crate::ladder::{IterationTower, JacobsLadder};
use crate::quadrature::{integrate_dd, QuadratureSpec};
use crate::report::{num, nums, Report};

#[derive(Clone, Debug)]
pub struct Lemma1Report {
    pub t: f64,
    pub u: f64,
    pub p: usize,
    pub lhs: Dd,
    pub rhs: Dd,
    pub lhs_error: f64,
    pub rhs_error: f64,
    /// `φ₁⁻ᵖ(T)` and `φ₁⁻ᵖ(T + U)`.
    pub limits: (Dd, Dd),
}

impl Lemma1Report {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).hi
    }

    pub fn quad_error(&self) -> f64 {
        self.lhs_error + self.rhs_error
    }

    pub fn to_report(&self, tol: f64) -> Report {
        let mut r = Report::new("lemma1").input("T", self.t).input("U", self.u).input("p", self.p);
        r.values = nums(&[self.lhs.hi, self.rhs.hi]);
        r.residuals = nums(&[self.residual()]);
        r.quad_error = num(self.quad_error());
        r.pass = self.residual().abs() < tol;
        r
    }
}

/// Both sides of the change of variables
/// `∫_T^{T+U} g(t) dt = ∫_{φ₁⁻ᵖ(T)}^{φ₁⁻ᵖ(T+U)} g(φ₁ᵖ(τ)) ∏_{r<p} Z̃²(φ₁ʳ(τ)) dτ`.
///
/// The right side is pre-split where `Z` switches Riemann–Siegel blocks
/// along any of the `p` iterates.
pub fn check_lemma1(
    ladder: &JacobsLadder,
    g: impl Fn(Dd) -> Dd + Sync,
    t: f64,
    u: f64,
    p: usize,
    spec: &QuadratureSpec,
) -> Result<Lemma1Report> {
    IterationTower::check_precondition(t, 0.5 * u)?;
    let a = Dd::from(t);
    let b = a + u;
    let lhs = integrate_dd(&g, a, b, spec)?;

    let lo = ladder.phi1_inverse_iter_dd(a, p)?;
    let hi = ladder.phi1_inverse_iter_dd(b, p)?;
    let engine = ladder.table().engine().clone();
    let mut kinks = Vec::new();
    for r in 0..p {
        let seg_lo = ladder.phi1_iter_dd(lo, r)?;
        let seg_hi = ladder.phi1_iter_dd(hi, r)?;
        for bp in engine.breakpoints_in(seg_lo.hi, seg_hi.hi) {
            kinks.push(ladder.phi1_inverse_iter_dd(bp, r)?.hi);
        }
    }
    let rhs_spec = QuadratureSpec { kink_hints: kinks, ..spec.clone() };
    let rhs = integrate_dd(
        |tau: Dd| {
            let (xs, jac) = ladder.orbit(tau, p).expect("orbit stays inside the tower");
            g(xs[p]) * jac
        },
        lo,
        hi,
        &rhs_spec,
    )?;
    Ok(Lemma1Report {
        t,
        u,
        p,
        lhs: lhs.value,
        rhs: rhs.value,
        lhs_error: lhs.error,
        rhs_error: rhs.error,
        limits: (lo, hi),
    })
}
