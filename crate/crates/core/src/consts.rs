//! Numerical constants shared by the zeta engine and the ladder.

use crate::dd::Dd;

/// Euler's constant γ to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// ln(2π) to 20 significant digits.
pub const LN_TWO_PI: f64 = 1.837_877_066_409_345_483_6;

/// Euler's constant as a double-double.
pub const EULER_GAMMA_DD: Dd = Dd::new(0.577_215_664_901_532_9, -4.942_915_152_430_645e-18);

/// ln(2π) as a double-double.
pub const LN_TWO_PI_DD: Dd = Dd::new(1.837_877_066_409_345_6, -7.756_588_316_134_483e-17);

/// ln π as a double-double.
pub const LN_PI_DD: Dd = Dd::new(1.144_729_885_849_400_2, 1.026_595_116_270_782_6e-17);

/// `c - ln 2π`, the linear coefficient of the ladder's defining relation.
pub fn ladder_linear_coeff() -> Dd {
    EULER_GAMMA_DD - LN_TWO_PI_DD
}

/// `2c - 1 - ln 2π`, the linear coefficient of the Hardy–Littlewood main term.
pub fn hardy_littlewood_linear_coeff() -> f64 {
    2.0 * EULER_GAMMA - 1.0 - LN_TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_logs_agree_with_dd_ln() {
        let ln2pi = Dd::TWO_PI.ln();
        assert!((ln2pi - LN_TWO_PI_DD).to_f64().abs() < 1e-31);
        let lnpi = Dd::PI.ln();
        assert!((lnpi - LN_PI_DD).to_f64().abs() < 1e-31);
    }

    #[test]
    fn single_and_double_forms_agree() {
        assert_eq!(EULER_GAMMA, EULER_GAMMA_DD.hi);
        assert_eq!(LN_TWO_PI, LN_TWO_PI_DD.hi);
    }
}
