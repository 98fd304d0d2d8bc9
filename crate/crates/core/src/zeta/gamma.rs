//! Complex log-gamma on the continuous branch, via Stirling's series after an
//! upward shift.

use num_complex::Complex64;

use super::bernoulli::BERNOULLI_2K;

const SHIFT_TO: f64 = 12.0;

/// `ln Γ(z)` for `Re z > 0`, continuous in `z` (not the principal log of Γ).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut z = z;
    let mut correction = Complex64::new(0.0, 0.0);
    while z.norm() < SHIFT_TO {
        correction -= z.ln();
        z += 1.0;
    }
    let half_ln_two_pi = 0.5 * crate::consts::LN_TWO_PI;
    let mut sum = (z - 0.5) * z.ln() - z + half_ln_two_pi;
    let z2 = z * z;
    let mut zpow = z;
    for (k, b) in BERNOULLI_2K.iter().enumerate().take(10) {
        let two_k = 2.0 * (k + 1) as f64;
        sum += b / (two_k * (two_k - 1.0) * zpow);
        zpow *= z2;
    }
    sum + correction
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_factorials() {
        // ln Γ(n) = ln (n-1)!
        let mut fact = 1.0f64;
        for n in 1..20 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let lg = ln_gamma(Complex64::new(n as f64, 0.0));
            assert!((lg.re - fact.ln()).abs() < 1e-13, "n = {n}");
            assert!(lg.im.abs() < 1e-15);
        }
    }

    #[test]
    fn half_is_root_pi() {
        let lg = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((lg.re - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn recurrence_holds_off_axis() {
        let z = Complex64::new(0.25, 7.3);
        let lhs = ln_gamma(z + 1.0);
        let rhs = ln_gamma(z) + z.ln();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn modulus_on_quarter_line_matches_reflection() {
        // |Γ(1/2 + iy)|^2 = π / cosh(πy)
        let y = 3.7;
        let lg = ln_gamma(Complex64::new(0.5, y));
        let expect = 0.5 * (std::f64::consts::PI / (std::f64::consts::PI * y).cosh()).ln();
        assert!((lg.re - expect).abs() < 1e-13);
    }
}
