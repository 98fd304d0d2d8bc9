//! The Riemann zeta function on the critical line.
//!
//! [`ZetaEngine`] evaluates the Riemann–Siegel theta function, Hardy's
//! `Z(t) = e^{iϑ(t)} ζ(1/2 + it)` and `|ζ(1/2 + it)|`. The fast path is the
//! Riemann–Siegel formula with up to four correction terms, with its phases
//! reduced in double-double arithmetic so that `Z` is accurate to a few
//! units in the last place of its own value. Below `min_t` the engine defers
//! to the Euler–Maclaurin oracle, which is also exposed for cross-checks.

mod bernoulli;
mod euler_maclaurin;
mod gamma;
mod riemann_siegel;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::consts::{LN_PI_DD, LN_TWO_PI_DD};
use crate::dd::Dd;
use crate::error::{Error, Result};

pub use gamma::ln_gamma;
pub use riemann_siegel::correction as riemann_siegel_coefficient;

/// Step of the sign scan used to bracket zeros of `Z`.
pub const ZERO_SCAN_STEP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaEngineConfig {
    /// Number of Riemann–Siegel correction terms, 0 to 4.
    pub rs_correction_order: usize,
    /// Minimum direct-sum length of the Euler–Maclaurin oracle.
    pub oracle_terms: usize,
    /// Below this height `hardy_z` evaluates through the oracle.
    pub min_t: f64,
}

impl Default for ZetaEngineConfig {
    fn default() -> Self {
        ZetaEngineConfig { rs_correction_order: 4, oracle_terms: 16, min_t: 10.0 }
    }
}

impl ZetaEngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rs_correction_order > riemann_siegel::MAX_ORDER {
            return Err(Error::Invalid(format!(
                "rs_correction_order must be in 0..=4, got {}",
                self.rs_correction_order
            )));
        }
        if !(self.min_t >= 10.0) {
            return Err(Error::Invalid(format!("min_t must be at least 10, got {}", self.min_t)));
        }
        if self.oracle_terms < 2 {
            return Err(Error::Invalid("oracle_terms must be at least 2".into()));
        }
        Ok(())
    }
}

/// `ln n` in double-double, cached for small `n`.
pub(crate) fn ln_n(n: usize) -> Dd {
    const CACHED: usize = 8192;
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    if n < CACHED {
        let table =
            TABLE.get_or_init(|| (0..CACHED).map(|k| if k == 0 { Dd::ZERO } else { Dd::from(k as f64).ln() }).collect());
        table[n]
    } else {
        Dd::from(n as f64).ln()
    }
}

fn inv_sqrt_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..8192).map(|k| if k == 0 { 0.0 } else { 1.0 / (k as f64).sqrt() }).collect())
}

#[derive(Clone, Debug)]
pub struct ZetaEngine {
    config: ZetaEngineConfig,
}

impl Default for ZetaEngine {
    fn default() -> Self {
        ZetaEngine { config: ZetaEngineConfig::default() }
    }
}

impl ZetaEngine {
    pub fn new(config: ZetaEngineConfig) -> Result<Self> {
        config.validate()?;
        Ok(ZetaEngine { config })
    }

    pub fn config(&self) -> &ZetaEngineConfig {
        &self.config
    }

    /// ϑ(t): asymptotic expansion for `t ≥ min_t`, the Γ-based oracle below.
    pub fn theta(&self, t: f64) -> Result<f64> {
        check_positive(t)?;
        if t >= self.config.min_t {
            Ok(theta_asymptotic(Dd::from(t)).to_f64())
        } else {
            Ok(theta_oracle(t))
        }
    }

    /// Hardy's Z(t).
    pub fn hardy_z(&self, t: f64) -> Result<f64> {
        self.hardy_z_dd(Dd::from(t))
    }

    /// Hardy's Z at a double-double abscissa.
    pub fn hardy_z_dd(&self, t: Dd) -> Result<f64> {
        check_positive(t.hi)?;
        if t.hi >= self.config.min_t {
            Ok(self.riemann_siegel(t))
        } else {
            Ok(hardy_z_oracle(t.hi, self.config.oracle_terms))
        }
    }

    /// `|ζ(1/2 + it)|`.
    pub fn zeta_abs(&self, t: f64) -> Result<f64> {
        Ok(self.hardy_z(t)?.abs())
    }

    /// ζ(s) by Euler–Maclaurin summation.
    pub fn zeta_oracle(&self, s: Complex64) -> Result<Complex64> {
        euler_maclaurin::zeta(s, self.config.oracle_terms)
    }

    /// Z(t) through the oracle: `Re(e^{iϑ(t)} ζ(1/2 + it))` with Γ-based ϑ.
    pub fn hardy_z_oracle(&self, t: f64) -> Result<f64> {
        check_positive(t)?;
        Ok(hardy_z_oracle(t, self.config.oracle_terms))
    }

    fn riemann_siegel(&self, t: Dd) -> f64 {
        let a = t / Dd::TWO_PI;
        let root = a.sqrt();
        let n = root.floor();
        let n_terms = n.hi as usize;
        let p = (root - n).to_f64();
        let theta = theta_asymptotic(t);

        let inv_sqrt = inv_sqrt_table();
        let mut main = Dd::ZERO;
        for k in 1..=n_terms {
            let phase = (theta - t * ln_n(k)).rem_two_pi();
            let w = if k < inv_sqrt.len() { inv_sqrt[k] } else { 1.0 / (k as f64).sqrt() };
            main = main.add_f64(w * phase.cos());
        }
        let inv_sqrt_a = 1.0 / root.hi;
        let sign = if n_terms % 2 == 1 { 1.0 } else { -1.0 };
        let rem = riemann_siegel::remainder_series(self.config.rs_correction_order, p, inv_sqrt_a);
        (main.mul_f64(2.0) + Dd::from(sign * inv_sqrt_a.sqrt() * rem)).to_f64()
    }

    /// Points where the evaluation scheme switches: `min_t` and the
    /// Riemann–Siegel block boundaries `2πN²`. `Z` is analytic between them
    /// and may jump by the truncation error across them.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<Dd> {
        let mut out = Vec::new();
        let min_t = self.config.min_t;
        if lo < min_t && min_t < hi {
            out.push(Dd::from(min_t));
        }
        let start = (lo.max(min_t) / (2.0 * PI)).sqrt().floor() as u64;
        let mut n = start.max(1);
        loop {
            let b = Dd::TWO_PI.mul_f64((n * n) as f64);
            if b.hi >= hi {
                break;
            }
            if b.hi > lo && b.hi > min_t {
                out.push(b);
            }
            n += 1;
        }
        out
    }

    /// Zeros of `Z` in `[lo, hi]`, bracketed by a sign scan and refined by
    /// bisection. Pairs closer than the scan step can be missed.
    pub fn zeros_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        check_positive(lo)?;
        let mut zeros = Vec::new();
        let steps = ((hi - lo) / ZERO_SCAN_STEP).ceil().max(1.0) as usize;
        let mut t0 = lo;
        let mut z0 = self.hardy_z(t0)?;
        for i in 1..=steps {
            let t1 = if i == steps { hi } else { lo + i as f64 * ZERO_SCAN_STEP };
            let z1 = self.hardy_z(t1)?;
            if z0 == 0.0 {
                zeros.push(t0);
            } else if z0 * z1 < 0.0 {
                zeros.push(self.bisect_zero(t0, t1, z0)?);
            }
            t0 = t1;
            z0 = z1;
        }
        if z0 == 0.0 {
            zeros.push(t0);
        }
        Ok(zeros)
    }

    fn bisect_zero(&self, mut a: f64, mut b: f64, mut za: f64) -> Result<f64> {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let zm = self.hardy_z(m)?;
            if zm == 0.0 {
                return Ok(m);
            }
            if za * zm < 0.0 {
                b = m;
            } else {
                a = m;
                za = zm;
            }
        }
        Ok(0.5 * (a + b))
    }
}

fn check_positive(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("t must be positive and finite, got {t}")))
    }
}

/// ϑ(t) ≈ (t/2) ln(t/2π) − t/2 − π/8 + 1/(48t) + 7/(5760t³) + ...
pub(crate) fn theta_asymptotic(t: Dd) -> Dd {
    let half = t.mul_f64(0.5);
    let lead = half * (t.ln() - LN_TWO_PI_DD) - half - Dd::PI.mul_f64(0.125);
    let x = 1.0 / t.hi;
    let x2 = x * x;
    let tail = x * (1.0 / 48.0 + x2 * (7.0 / 5760.0 + x2 * (31.0 / 80640.0 + x2 * (127.0 / 430080.0))));
    lead.add_f64(tail)
}

/// ϑ(t) = Im ln Γ(1/4 + it/2) − (t/2) ln π.
pub(crate) fn theta_oracle(t: f64) -> f64 {
    let lg = ln_gamma(Complex64::new(0.25, 0.5 * t));
    lg.im - 0.5 * t * LN_PI_DD.hi
}

fn hardy_z_oracle(t: f64, terms: usize) -> f64 {
    let z = euler_maclaurin::zeta(Complex64::new(0.5, t), terms).expect("critical line avoids the pole");
    (Complex64::from_polar(1.0, theta_oracle(t)) * z).re
}
