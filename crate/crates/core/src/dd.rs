//! Double-double arithmetic.
//!
//! A [`Dd`] is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant decimal digits. Only the operations the ladder
//! pipeline needs are provided: the four field operations, `sqrt`, `exp`,
//! `ln`, and reduction modulo 2π.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// 1/n! for n = 2..=11.
const INV_FACTORIALS: [Dd; 10] = [
    Dd::new(0.5, 0.0),
    Dd::new(0.166_666_666_666_666_66, 9.251_858_538_542_97e-18),
    Dd::new(0.041_666_666_666_666_664, 2.312_964_634_635_742_7e-18),
    Dd::new(0.008_333_333_333_333_333, 1.156_482_317_317_871_4e-19),
    Dd::new(0.001_388_888_888_888_889, -5.300_543_954_373_577e-20),
    Dd::new(0.000_198_412_698_412_698_4, 1.720_955_829_342_070_5e-22),
    Dd::new(2.480_158_730_158_73e-5, 2.151_194_786_677_588_2e-23),
    Dd::new(2.755_731_922_398_589_3e-6, -1.858_393_274_046_472e-22),
    Dd::new(2.755_731_922_398_589e-7, 2.376_771_462_225_029_7e-23),
    Dd::new(2.505_210_838_544_172e-8, -1.448_814_070_935_912e-24),
];

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 2.0 * std::f64::consts::PI,
        lo: 2.449_293_598_294_706_4e-16,
    };
    pub const LN_2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    /// Builds a normalized value from two arbitrary doubles.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::new(f64::NAN, f64::NAN) };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let r = self - Dd::from_prod(ax, ax);
        Dd::from_sum(ax, r.hi * (x * 0.5))
    }

    /// `floor` of the represented value.
    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (hi, lo) = quick_two_sum(hi, self.lo.floor());
            Dd { hi, lo }
        } else {
            Dd::new(hi, 0.0)
        }
    }

    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (hi, lo) = quick_two_sum(hi, lo);
            Dd { hi, lo }
        } else if (hi - self.hi).abs() == 0.5 {
            // tie in hi: lo decides the direction
            if self.lo < 0.0 && hi > self.hi {
                Dd::new(hi - 1.0, 0.0)
            } else if self.lo > 0.0 && hi < self.hi {
                Dd::new(hi + 1.0, 0.0)
            } else {
                Dd::new(hi, 0.0)
            }
        } else {
            Dd::new(hi, 0.0)
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Dd::LN_2.mul_f64(k);
        // r in [-ln2/2, ln2/2]; shrink further by 2^-9 and square back up
        const SQUARINGS: i32 = 9;
        let r = r.mul_f64(1.0 / (1 << SQUARINGS) as f64);
        // Taylor series for expm1(r), |r| < 7e-4, in Horner form
        let mut sum = INV_FACTORIALS[INV_FACTORIALS.len() - 1];
        for c in INV_FACTORIALS.iter().rev().skip(1) {
            sum = *c + sum * r;
        }
        let mut sum = r + sum * r.sqr();
        // (1 + s)^2 - 1 = 2s + s^2, kept in expm1 form to avoid cancellation
        for _ in 0..SQUARINGS {
            sum = sum.mul_f64(2.0) + sum.sqr();
        }
        let e = sum.add_f64(1.0);
        let scale = 2f64.powi(k as i32);
        Dd::new(e.hi * scale, e.lo * scale)
    }

    /// Natural logarithm by one Newton correction of the double result.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN, f64::NAN);
        }
        let y = Dd::new(self.hi.ln(), 0.0);
        // y + x e^{-y} - 1
        y + (self * (-y).exp()).add_f64(-1.0)
    }

    /// Reduces an angle to `[-π, π]`, returning the remainder as a double.
    #[inline]
    pub fn rem_two_pi(self) -> f64 {
        let k = (self.hi / Dd::TWO_PI.hi).round();
        (self - Dd::TWO_PI.mul_f64(k)).to_f64()
    }
}

impl From<f64> for Dd {
    #[inline]
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl From<Dd> for f64 {
    #[inline]
    fn from(x: Dd) -> Self {
        x.to_f64()
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        self.add_f64(b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self.add_f64(-b)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        self.mul_f64(b)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        self / Dd::from(b)
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    #[inline]
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_are_exact() {
        let a = 1.0 + f64::EPSILON;
        let p = Dd::from_prod(a, a);
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn third_times_three() {
        let third = Dd::ONE / Dd::from(3.0);
        let back = third * Dd::from(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let r = Dd::from(2.0).sqrt();
        assert!((r.sqr() - 2.0).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[1e-3, 0.5, 1.0, 2.718281828, 10.0, 1234.5, 9.87e6] {
            let d = Dd::from(x);
            let back = d.ln().exp();
            let rel = ((back - d) / d).to_f64().abs();
            assert!(rel < 1e-29, "x = {x}: rel {rel:e}");
        }
    }

    #[test]
    fn ln_two_constant_matches() {
        let l = Dd::from(2.0).ln();
        assert!((l - Dd::LN_2).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_one_is_e() {
        // e = 2.718281828459045 + 1.4456468917292502e-16
        let e = Dd::ONE.exp();
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-31);
    }

    #[test]
    fn rem_two_pi_of_large_multiple() {
        let x = Dd::TWO_PI * Dd::from(12345.0) + Dd::from(0.25);
        assert!((x.rem_two_pi() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ordering_uses_low_word() {
        let a = Dd::new(1.0, 1e-20);
        let b = Dd::new(1.0, -1e-20);
        assert!(a > b);
        assert!(b < Dd::ONE);
    }
}
