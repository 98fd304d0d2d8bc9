//! Jacob's ladder φ₁.
//!
//! φ₁(T) is defined as the solution `y` of
//!
//! ```text
//! y ln y + (c − ln 2π) y + c₀ = G(T),   G(T) = ∫_0^T |ζ(1/2 + it)|² dt,
//! ```
//!
//! so its derivative is exactly `Z̃²(t) = Z(t)² / (ln φ₁(t) + 1 + c − ln 2π)`.
//! All values are carried in double-double so that iterates, inverses and
//! the change of variables they induce agree to far below `f64` resolution.

mod calibrate;
mod tower;

use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use crate::consts::{ladder_linear_coeff, EULER_GAMMA, LN_TWO_PI_DD};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::hl_table::HlTable;

pub use calibrate::{calibrate_c0, C0Fit};
pub use tower::{IterationTower, TowerGeometry};

/// Smallest admissible `tower` parameter ratio: `2l < TOWER_SMALLNESS · T / ln T`.
pub const TOWER_SMALLNESS: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderConstants {
    /// Euler's constant.
    pub c: f64,
    /// Additive constant of the defining relation.
    pub c0: f64,
    /// Lower end of the range of φ₁.
    pub y_min: f64,
}

impl Default for LadderConstants {
    fn default() -> Self {
        LadderConstants { c: EULER_GAMMA, c0: 0.0, y_min: 10.0 }
    }
}

impl LadderConstants {
    pub fn with_c0(self, c0: f64) -> Self {
        LadderConstants { c0, ..self }
    }

    /// `y ln y + (c − ln 2π) y` is increasing only past `2π e^{−c−1}`.
    pub fn validate(&self) -> Result<()> {
        let turn = 2.0 * std::f64::consts::PI * (-self.c - 1.0).exp();
        if !(self.y_min > turn) || !self.y_min.is_finite() {
            return Err(Error::Invalid(format!("y_min must exceed {turn:.6}, got {}", self.y_min)));
        }
        if !self.c.is_finite() || !self.c0.is_finite() {
            return Err(Error::Invalid("c and c0 must be finite".into()));
        }
        Ok(())
    }

    fn linear(&self) -> Dd {
        if self.c == EULER_GAMMA {
            ladder_linear_coeff()
        } else {
            Dd::from(self.c) - LN_TWO_PI_DD
        }
    }

    /// `F(y) = y ln y + (c − ln 2π) y + c₀`.
    pub fn f(&self, y: Dd) -> Dd {
        y * y.ln() + y * self.linear() + self.c0
    }

    /// `F′(y) = ln y + 1 + c − ln 2π`.
    pub fn f_prime(&self, y: Dd) -> Dd {
        y.ln() + self.linear() + 1.0
    }

    /// The `y ≥ y_min` with `F(y) = target`.
    pub fn f_inverse(&self, target: Dd) -> Result<Dd> {
        let floor = self.f(Dd::from(self.y_min));
        if target < floor {
            return Err(Error::Domain(format!(
                "G(T) = {} is below F(y_min) = {}; T lies under the ladder's domain",
                target.hi, floor.hi
            )));
        }
        let lin = self.linear().hi;
        let goal = target.hi - self.c0;
        let mut y = (goal / goal.max(std::f64::consts::E).ln()).max(self.y_min);
        for _ in 0..100 {
            let fy = y * y.ln() + lin * y - goal;
            let dy = fy / (y.ln() + lin + 1.0);
            let next = (y - dy).max(self.y_min);
            if (next - y).abs() <= 1e-15 * y {
                y = next;
                break;
            }
            y = next;
        }
        let mut yd = Dd::from(y);
        for _ in 0..3 {
            yd = yd - (self.f(yd) - target) / self.f_prime(yd);
        }
        Ok(if yd.hi < self.y_min { Dd::from(self.y_min) } else { yd })
    }
}

/// φ₁ over a Hardy–Littlewood table. The table grows on demand (serialized
/// behind a lock; readers keep the snapshot they started with).
#[derive(Debug)]
pub struct JacobsLadder {
    constants: LadderConstants,
    table: RwLock<Arc<HlTable>>,
    extend: bool,
    cache: Option<PathBuf>,
    cache_error: Mutex<Option<String>>,
    t_lo: Dd,
}

impl JacobsLadder {
    pub fn new(table: HlTable, constants: LadderConstants) -> Result<Self> {
        constants.validate()?;
        let mut ladder = JacobsLadder {
            constants,
            table: RwLock::new(Arc::new(table)),
            extend: true,
            cache: None,
            cache_error: Mutex::new(None),
            t_lo: Dd::ZERO,
        };
        ladder.t_lo = ladder.g_inverse(constants.f(Dd::from(constants.y_min)))?;
        Ok(ladder)
    }

    /// Persist every extension of the table to `path`.
    pub fn with_cache(mut self, path: impl Into<PathBuf>) -> Self {
        self.cache = Some(path.into());
        self
    }

    /// Refuse to grow the table; out-of-range requests become range errors.
    pub fn without_extension(mut self) -> Self {
        self.extend = false;
        self
    }

    pub fn constants(&self) -> &LadderConstants {
        &self.constants
    }

    /// The current table snapshot.
    pub fn table(&self) -> Arc<HlTable> {
        self.table.read().expect("table lock").clone()
    }

    /// Message of the last failed cache write, if any.
    pub fn cache_error(&self) -> Option<String> {
        self.cache_error.lock().expect("cache lock").clone()
    }

    /// `[T_lo, T_hi]`: from the point where φ₁ = y_min to the table's reach.
    pub fn domain(&self) -> (f64, f64) {
        (self.t_lo.hi, self.table().max_t())
    }

    fn covering(&self, t: f64) -> Result<Arc<HlTable>> {
        let table = self.table();
        if t <= table.max_t() {
            return Ok(table);
        }
        if !self.extend {
            return Err(Error::Range(format!("T = {t} beyond certified range {}", table.max_t())));
        }
        let mut guard = self.table.write().expect("table lock");
        if t > guard.max_t() {
            let target = t.max(guard.max_t() * 1.02) + 4.0 * guard.step();
            let grown = Arc::new(guard.extend(target)?);
            if let Some(path) = &self.cache {
                let err = grown.save(path).err().map(|e| e.to_string());
                *self.cache_error.lock().expect("cache lock") = err;
            }
            *guard = grown;
        }
        Ok(guard.clone())
    }

    /// `G(T)` through the table, extending it if needed.
    pub fn g(&self, t: Dd) -> Result<Dd> {
        self.covering(t.hi)?.integral_dd(t)
    }

    pub fn phi1(&self, t: f64) -> Result<f64> {
        Ok(self.phi1_dd(Dd::from(t))?.to_f64())
    }

    pub fn phi1_dd(&self, t: Dd) -> Result<Dd> {
        self.constants.f_inverse(self.g(t)?)
    }

    /// `ω(t) = ln φ₁(t) + 1 + c − ln 2π`.
    pub fn omega(&self, t: Dd) -> Result<Dd> {
        Ok(self.constants.f_prime(self.phi1_dd(t)?))
    }

    /// `Z̃²(t) = dφ₁/dt`.
    pub fn ztilde_sq(&self, t: f64) -> Result<f64> {
        self.ztilde_sq_dd(Dd::from(t))
    }

    pub fn ztilde_sq_dd(&self, t: Dd) -> Result<f64> {
        let phi = self.phi1_dd(t)?;
        Ok(self.ztilde_sq_at(t, phi)?)
    }

    /// `Z̃²(t)` when φ₁(t) is already known.
    pub fn ztilde_sq_at(&self, t: Dd, phi: Dd) -> Result<f64> {
        let z = self.table().engine().hardy_z_dd(t)?;
        Ok(z * z / self.constants.f_prime(phi).hi)
    }

    /// φ₁ᵖ(t).
    pub fn phi1_iter(&self, t: f64, p: usize) -> Result<f64> {
        Ok(self.phi1_iter_dd(Dd::from(t), p)?.to_f64())
    }

    pub fn phi1_iter_dd(&self, t: Dd, p: usize) -> Result<Dd> {
        let mut x = t;
        for r in 0..p {
            if x < self.t_lo {
                return Err(Error::Domain(format!(
                    "iterate {r} = {} fell below the ladder's domain start {}",
                    x.hi, self.t_lo.hi
                )));
            }
            x = self.phi1_dd(x)?;
        }
        Ok(x)
    }

    /// The iterates `[t, φ₁(t), …, φ₁ᵖ(t)]` and the Jacobian
    /// `∏_{r<p} Z̃²(φ₁ʳ(t))` of φ₁ᵖ at `t`.
    pub fn orbit(&self, t: Dd, p: usize) -> Result<(Vec<Dd>, f64)> {
        let mut xs = Vec::with_capacity(p + 1);
        xs.push(t);
        let mut jac = 1.0;
        for r in 0..p {
            let x = xs[r];
            if x < self.t_lo {
                return Err(Error::Domain(format!("iterate {r} = {} fell below the ladder's domain", x.hi)));
            }
            let phi = self.phi1_dd(x)?;
            jac *= self.ztilde_sq_at(x, phi)?;
            xs.push(phi);
        }
        Ok((xs, jac))
    }

    pub fn phi1_inverse(&self, y: f64) -> Result<f64> {
        Ok(self.phi1_inverse_dd(Dd::from(y))?.to_f64())
    }

    /// The `T` with φ₁(T) = y.
    pub fn phi1_inverse_dd(&self, y: Dd) -> Result<Dd> {
        if y.hi < self.constants.y_min {
            return Err(Error::Domain(format!("{} is below y_min = {}", y.hi, self.constants.y_min)));
        }
        self.g_inverse(self.constants.f(y))
    }

    /// φ₁⁻ᵖ(y).
    pub fn phi1_inverse_iter_dd(&self, y: Dd, p: usize) -> Result<Dd> {
        let mut x = y;
        for _ in 0..p {
            x = self.phi1_inverse_dd(x)?;
        }
        Ok(x)
    }

    /// Bracketed Newton on `G(T) = target` with `G′ = Z²`, bisecting when a
    /// step leaves the bracket.
    fn g_inverse(&self, target: Dd) -> Result<Dd> {
        let mut table = self.table();
        while table.values().last().copied().unwrap_or(Dd::ZERO) < target {
            let need = main_term_inverse(target.hi).max(table.max_t() * 1.05);
            table = self.covering(need + 16.0)?;
        }
        let values = table.values();
        let i = values.partition_point(|v| *v <= target);
        if i == 0 {
            return Err(Error::Domain(format!("G target {} is negative", target.hi)));
        }
        let i = i - 1;
        let (mut lo, mut hi) = (table.node(i), table.node((i + 1).min(values.len() - 1)));
        if values[i] == target || lo == hi {
            return Ok(lo);
        }
        let mut t = Dd::from(table.invert_seed(target.hi).clamp(lo.hi, hi.hi));
        let tol = 1e-20 * hi.hi.max(1.0);
        for _ in 0..200 {
            let resid = table.integral_dd(t)? - target;
            if resid.hi == 0.0 {
                return Ok(t);
            }
            if resid.hi > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let slope = table.derivative_dd(t)?;
            let newton = t - resid / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi { newton } else { (lo + hi).mul_f64(0.5) };
            let step = (next - t).hi.abs();
            t = next;
            if step <= tol || (hi - lo).hi <= tol {
                return Ok(t);
            }
        }
        Err(Error::RootFinder(format!("G(T) = {} not solved within 200 iterations", target.hi)))
    }
}

/// Rough inverse of `T ln T + (2c − 1 − ln 2π) T`, for sizing the table.
fn main_term_inverse(g: f64) -> f64 {
    let lin = crate::consts::hardy_littlewood_linear_coeff();
    let mut t = (g / g.max(std::f64::consts::E).ln()).max(10.0);
    for _ in 0..50 {
        let f = t * t.ln() + lin * t - g;
        t = (t - f / (t.ln() + 1.0 + lin)).max(1.0);
    }
    t
}
