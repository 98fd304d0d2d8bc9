//! Euler–Maclaurin summation for ζ(s), used as the independent oracle.

use num_complex::Complex64;

use super::bernoulli::BERNOULLI_2K;
use super::ln_n;
use crate::error::{Error, Result};

/// Number of Bernoulli correction terms.
const CORRECTIONS: usize = BERNOULLI_2K.len();

/// ζ(s) by Euler–Maclaurin with at least `min_terms` direct terms.
///
/// The direct-sum length is raised to `1.5 (|s| + 2M) / π` so that the
/// Bernoulli tail decays by at least a factor of 9 per term.
pub fn zeta(s: Complex64, min_terms: usize) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    let spread = s.norm() + 2.0 * CORRECTIONS as f64;
    let n = min_terms.max((1.5 * spread / std::f64::consts::PI).ceil() as usize).max(2);

    // n^{-s} = n^{-σ} e^{-i t ln n}; the phase is reduced in double-double
    let power = |k: usize| -> Complex64 {
        let ln = ln_n(k);
        let modulus = (-s.re * ln.hi).exp();
        let phase = (ln * s.im).rem_two_pi();
        Complex64::from_polar(modulus, -phase)
    };

    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += power(k);
    }
    let n_pow = power(n);
    let nf = n as f64;
    sum += n_pow * nf / (s - 1.0);
    sum += n_pow * 0.5;

    // Bernoulli tail: B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut factorial = 1.0f64;
    let mut poch = s;
    let mut npow = n_pow / nf;
    for (i, &b) in BERNOULLI_2K.iter().enumerate() {
        let k = i + 1;
        factorial *= ((2 * k - 1) * (2 * k)) as f64;
        let term = poch * npow * (b / factorial);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        poch = poch * (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        npow /= nf * nf;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel() {
        let z = zeta(Complex64::new(2.0, 0.0), 10).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(z.im.abs() < 1e-15);
    }

    #[test]
    fn zeta_zero_is_minus_half() {
        let z = zeta(Complex64::new(0.0, 0.0), 10).unwrap();
        assert!((z.re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn pole_is_rejected() {
        assert!(matches!(zeta(Complex64::new(1.0, 0.0), 10), Err(Error::Pole)));
    }

    #[test]
    fn zeta_four_and_minus_one() {
        let z4 = zeta(Complex64::new(4.0, 0.0), 10).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-13);
        let zm1 = zeta(Complex64::new(-1.0, 0.0), 10).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_length_does_not_matter() {
        let s = Complex64::new(0.5, 1234.5);
        let a = zeta(s, 10).unwrap();
        let b = zeta(s, 2000).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
    }
}
