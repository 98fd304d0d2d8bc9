use serde::Serialize;
use serde_json::value::RawValue;

use super::{JacobsLadder, TOWER_SMALLNESS};
use crate::consts::EULER_GAMMA;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::report::nums;

/// Reverse iterations of `[T, T + 2l]`: segment `r` is
/// `[φ₁⁻ʳ(T), φ₁⁻ʳ(T + 2l)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTower {
    pub t: f64,
    pub k: usize,
    pub l: f64,
    lo: Vec<Dd>,
    hi: Vec<Dd>,
}

impl IterationTower {
    /// The smallness bound on `2l`.
    pub fn check_precondition(t: f64, l: f64) -> Result<()> {
        if !(t >= 100.0) || !t.is_finite() {
            return Err(Error::Precondition(format!("T must be at least 100, got {t}")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Precondition(format!("l must be positive, got {l}")));
        }
        let bound = TOWER_SMALLNESS * t / t.ln();
        if !(2.0 * l < bound) {
            return Err(Error::Precondition(format!(
                "2l = {} must be below {TOWER_SMALLNESS}·T/ln T = {bound:.6}",
                2.0 * l
            )));
        }
        Ok(())
    }

    pub fn build(ladder: &JacobsLadder, t: f64, k: usize, l: f64) -> Result<Self> {
        Self::check_precondition(t, l)?;
        let mut lo = vec![Dd::from(t)];
        let mut hi = vec![Dd::from(t) + 2.0 * l];
        for r in 1..=k {
            let a = ladder.phi1_inverse_dd(lo[r - 1])?;
            let b = ladder.phi1_inverse_dd(hi[r - 1])?;
            for (x, y) in [(a, lo[r - 1]), (b, hi[r - 1])] {
                let back = ladder.phi1_dd(x)?;
                if (back - y).hi.abs() > 1e-12 * y.hi {
                    return Err(Error::RootFinder(format!(
                        "φ₁({}) = {} misses {} at level {r}",
                        x.hi, back.hi, y.hi
                    )));
                }
            }
            lo.push(a);
            hi.push(b);
        }
        let tower = IterationTower { t, k, l, lo, hi };
        if !tower.is_ordered() {
            return Err(Error::RootFinder("reverse iterations are not ordered; the table is inconsistent".into()));
        }
        Ok(tower)
    }

    /// `T⁽ʳ⁾`.
    pub fn lo(&self, r: usize) -> Dd {
        self.lo[r]
    }

    /// `(T + 2l)⁽ʳ⁾`.
    pub fn hi(&self, r: usize) -> Dd {
        self.hi[r]
    }

    pub fn endpoints_lo(&self) -> Vec<f64> {
        self.lo.iter().map(|x| x.hi).collect()
    }

    pub fn endpoints_hi(&self) -> Vec<f64> {
        self.hi.iter().map(|x| x.hi).collect()
    }

    /// `(T + 2l)⁽ʳ⁾ − T⁽ʳ⁾`.
    pub fn length_dd(&self, r: usize) -> Dd {
        self.hi[r] - self.lo[r]
    }

    pub fn length(&self, r: usize) -> f64 {
        self.length_dd(r).hi
    }

    /// `T⁽ʳ⁾ − (T + 2l)⁽ʳ⁻¹⁾` for `r = 1..=k`.
    pub fn gaps(&self) -> Vec<f64> {
        (1..=self.k).map(|r| (self.lo[r] - self.hi[r - 1]).hi).collect()
    }

    pub fn is_ordered(&self) -> bool {
        (0..=self.k).all(|r| self.lo[r] < self.hi[r]) && (1..=self.k).all(|r| self.hi[r - 1] < self.lo[r])
    }

    pub fn geometry(&self) -> TowerGeometry {
        let scale = self.t.ln() / ((1.0 - EULER_GAMMA) * self.t);
        let gaps = self.gaps();
        let lengths: Vec<f64> = (0..=self.k).map(|r| self.length(r)).collect();
        let bound = TOWER_SMALLNESS * self.t / self.t.ln();
        TowerGeometry {
            normalized_gaps: gaps.iter().map(|g| g * scale).collect(),
            lengths_small: lengths.iter().all(|&x| x < bound),
            length_bound: bound,
            ordered: self.is_ordered(),
            gaps,
            lengths,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out {
            #[serde(rename = "T")]
            t: Box<RawValue>,
            k: usize,
            l: Box<RawValue>,
            endpoints_lo: Vec<Box<RawValue>>,
            endpoints_hi: Vec<Box<RawValue>>,
            gaps: Vec<Box<RawValue>>,
            normalized_gaps: Vec<Box<RawValue>>,
        }
        let g = self.geometry();
        let out = Out {
            t: crate::report::num(self.t),
            k: self.k,
            l: crate::report::num(self.l),
            endpoints_lo: nums(&self.endpoints_lo()),
            endpoints_hi: nums(&self.endpoints_hi()),
            gaps: nums(&g.gaps),
            normalized_gaps: nums(&g.normalized_gaps),
        };
        serde_json::to_string_pretty(&out).expect("tower serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerGeometry {
    pub lengths: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `gap · ln T / ((1 − c) T)`.
    pub normalized_gaps: Vec<f64>,
    pub ordered: bool,
    pub length_bound: f64,
    pub lengths_small: bool,
}
