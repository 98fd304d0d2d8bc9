//! Riemann–Siegel remainder coefficients C_0..C_4.
//!
//! With `x = p - 1/2`, `Ψ(x) = -cos(2πx² - 5π/8) / cos(2πx)` is entire (the
//! zeros of the denominator are zeros of the numerator), so its Taylor
//! series about 0 converges on all of `[-1/2, 1/2]`. The coefficients are
//! taken from a trapezoid-rule Cauchy integral on the unit circle, which is
//! spectrally accurate for entire functions and avoids the cancellation a
//! power-series division would suffer near `x = ±1/4`. Each `C_k` is then a
//! fixed linear combination of derivatives of `Ψ`, stored as its own even or
//! odd Taylor series and evaluated by Horner's rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// Taylor degree kept for Ψ.
const PSI_DEGREE: usize = 72;
/// Trapezoid nodes on the contour.
const CONTOUR_NODES: usize = 256;

pub const MAX_ORDER: usize = 4;

struct Coefficients {
    /// `series[k][n]` is the coefficient of `x^n` in `C_k(x)`.
    series: [Vec<f64>; MAX_ORDER + 1],
}

fn psi(x: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    -(x * x * two_pi - 5.0 * PI / 8.0).cos() / (x * two_pi).cos()
}

fn psi_taylor() -> Vec<f64> {
    let mut c = vec![0.0; PSI_DEGREE + 1];
    let samples: Vec<(Complex64, Complex64)> = (0..CONTOUR_NODES)
        .map(|j| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / CONTOUR_NODES as f64);
            (w, psi(w))
        })
        .collect();
    for (n, cn) in c.iter_mut().enumerate() {
        if n % 2 == 1 {
            continue;
        }
        let acc: Complex64 = samples.iter().map(|&(w, f)| f * w.powi(-(n as i32))).sum();
        *cn = acc.re / CONTOUR_NODES as f64;
    }
    c
}

/// Taylor coefficients of the m-th derivative from those of the function.
fn derivative(c: &[f64], m: usize) -> Vec<f64> {
    (0..c.len().saturating_sub(m))
        .map(|n| {
            let falling: f64 = ((n + 1)..=(n + m)).map(|j| j as f64).product();
            c[n + m] * falling
        })
        .collect()
}

fn combine(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let len = terms.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for (w, s) in terms {
        for (o, v) in out.iter_mut().zip(s.iter()) {
            *o += w * v;
        }
    }
    out
}

fn build() -> Coefficients {
    let c = psi_taylor();
    let d: Vec<Vec<f64>> = (0..=12).map(|m| derivative(&c, m)).collect();
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let c0 = d[0].clone();
    let c1 = combine(&[(-1.0 / (96.0 * pi2), &d[3])]);
    let c2 = combine(&[(1.0 / (64.0 * pi2), &d[2]), (1.0 / (18432.0 * pi4), &d[6])]);
    let c3 = combine(&[
        (-1.0 / (64.0 * pi2), &d[1]),
        (-1.0 / (3840.0 * pi4), &d[5]),
        (-1.0 / (5_308_416.0 * pi6), &d[9]),
    ]);
    let c4 = combine(&[
        (1.0 / (128.0 * pi2), &d[0]),
        (19.0 / (24576.0 * pi4), &d[4]),
        (11.0 / (5_898_240.0 * pi6), &d[8]),
        (1.0 / (2_038_431_744.0 * pi8), &d[12]),
    ]);
    Coefficients { series: [c0, c1, c2, c3, c4] }
}

fn coefficients() -> &'static Coefficients {
    static CELL: OnceLock<Coefficients> = OnceLock::new();
    CELL.get_or_init(build)
}

fn horner(series: &[f64], x: f64) -> f64 {
    series.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `C_k(p)` for `p ∈ [0, 1)`.
pub fn correction(k: usize, p: f64) -> f64 {
    horner(&coefficients().series[k], p - 0.5)
}

/// `Σ_{k≤order} C_k(p) a^{-k/2}` where `a = t/2π`.
pub fn remainder_series(order: usize, p: f64, inv_sqrt_a: f64) -> f64 {
    let x = p - 0.5;
    let co = coefficients();
    let mut sum = 0.0;
    let mut scale = 1.0;
    for series in co.series.iter().take(order + 1) {
        sum += scale * horner(series, x);
        scale *= inv_sqrt_a;
    }
    sum
}
