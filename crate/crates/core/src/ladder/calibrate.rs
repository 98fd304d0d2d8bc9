use super::{JacobsLadder, LadderConstants};
use crate::consts::hardy_littlewood_linear_coeff;
use crate::dd::Dd;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct C0Fit {
    pub c0: f64,
    pub samples: usize,
    /// RMS of `G(T) − F_{c₀}(y*)` about the fit.
    pub rms: f64,
    /// RMS of the relative misfit in four consecutive bins of `T`.
    pub bin_rms: Vec<f64>,
    /// Whether the relative misfit shrinks from the first bin to the last.
    pub trend_decreasing: bool,
}

/// Least-squares intercept of `G(T) − [y* ln y* + (c − ln 2π) y*]`, where
/// `y*` maps the main term `T ln T + (2c − 1 − ln 2π) T` through the
/// `c₀ = 0` relation. `g` supplies `G(T)` at the sample points.
pub fn calibrate_c0(
    g: impl Fn(f64) -> Result<f64>,
    constants: &LadderConstants,
    samples: &[f64],
) -> Result<C0Fit> {
    if samples.len() < 8 {
        return Err(Error::Invalid(format!("c0 calibration needs at least 8 samples, got {}", samples.len())));
    }
    let base = constants.with_c0(0.0);
    let lin = hardy_littlewood_linear_coeff();
    let mut rows = Vec::with_capacity(samples.len());
    for &t in samples {
        let main = Dd::from(t) * Dd::from(t).ln() + t * lin;
        let y = base.f_inverse(main)?;
        let gt = g(t)?;
        rows.push((t, gt, (Dd::from(gt) - base.f(y)).to_f64()));
    }
    let c0 = rows.iter().map(|r| r.2).sum::<f64>() / rows.len() as f64;
    let rms = (rows.iter().map(|r| (r.2 - c0).powi(2)).sum::<f64>() / rows.len() as f64).sqrt();

    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bins = 4;
    let per = sorted.len() / bins;
    let bin_rms: Vec<f64> = (0..bins)
        .map(|b| {
            let chunk = if b + 1 == bins { &sorted[b * per..] } else { &sorted[b * per..(b + 1) * per] };
            (chunk.iter().map(|r| ((r.2 - c0) / r.1).powi(2)).sum::<f64>() / chunk.len() as f64).sqrt()
        })
        .collect();
    let trend_decreasing = bin_rms[bins - 1] <= bin_rms[0];
    Ok(C0Fit { c0, samples: rows.len(), rms, bin_rms, trend_decreasing })
}

impl JacobsLadder {
    /// Calibrates on every table node in `[lo, hi]`.
    pub fn calibrate_c0(&self, lo: f64, hi: f64) -> Result<C0Fit> {
        if !(lo > 1.0 && hi > lo) {
            return Err(Error::Invalid(format!("calibration range [{lo}, {hi}] is empty or below 1")));
        }
        self.g(Dd::from(hi))?;
        let table = self.table();
        let first = (lo / table.step()).ceil() as usize;
        let last = (hi / table.step()).floor() as usize;
        let samples: Vec<f64> = (first..=last).map(|i| table.node(i).hi).collect();
        let values = table.values();
        calibrate_c0(
            |t| Ok(values[(t / table.step()).round() as usize].to_f64()),
            &self.constants,
            &samples,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_known_constant() {
        let k = LadderConstants::default();
        let lin = hardy_littlewood_linear_coeff();
        let synthetic = |t: f64| {
            let main = Dd::from(t) * Dd::from(t).ln() + t * lin;
            let y = k.with_c0(0.0).f_inverse(main)?;
            Ok(k.with_c0(5.0).f(y).to_f64())
        };
        let samples: Vec<f64> = (0..200).map(|i| 1000.0 + 45.0 * i as f64).collect();
        let fit = calibrate_c0(synthetic, &k, &samples).unwrap();
        assert!((fit.c0 - 5.0).abs() < 1e-6, "{}", fit.c0);
        assert!(fit.rms < 1e-6);
    }

    #[test]
    fn too_few_samples() {
        assert!(calibrate_c0(|t| Ok(t), &LadderConstants::default(), &[100.0, 200.0]).is_err());
    }
}
