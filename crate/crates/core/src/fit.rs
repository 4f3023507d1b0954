//! Least-squares power laws `err = c * dx^nu` fitted in log-log space.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub rms_log_residual: f64,
}

impl PowerLawFit {
    pub fn predict(&self, dx: f64) -> f64 {
        self.prefactor * dx.powf(self.exponent)
    }

    pub fn exponent_within(&self, lo: f64, hi: f64) -> bool {
        (lo..=hi).contains(&self.exponent)
    }
}

/// Ordinary least squares of `ln err` against `ln dx`.
///
/// Non-positive errors are rejected; deciding whether to clamp or drop them
/// is left to the caller.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 2 {
        return Err(Error::contract(format!(
            "power-law fit needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    for &(dx, err) in samples {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::contract(format!("dx must be positive and finite, got {dx}")));
        }
        if !(err > 0.0) || !err.is_finite() {
            return Err(Error::NonPositiveSample { dx, err });
        }
    }
    let n = samples.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().map(|&(dx, e)| (dx.ln(), e.ln())).unzip();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::contract("power-law fit needs at least two distinct dx values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let exponent = sxy / sxx;
    let intercept = y_mean - exponent * x_mean;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (exponent * x + intercept)).powi(2))
        .sum();
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        rms_log_residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_point_slope() {
        let f = fit_power_law(&[(0.1, 0.01), (0.01, 0.0001)]).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!((f.prefactor - 1.0).abs() < 1e-12);
        assert!(f.rms_log_residual < 1e-12);
    }

    #[test]
    fn exact_linear_law() {
        let s: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&h| (h, 3.0 * h)).collect();
        let f = fit_power_law(&s).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_error() {
        let e = fit_power_law(&[(0.1, 0.01), (0.05, 0.0)]).unwrap_err();
        assert!(matches!(e, Error::NonPositiveSample { .. }));
        assert!(e.to_string().contains("clamp"));
        assert!(fit_power_law(&[(0.1, 0.01)]).is_err());
        assert!(fit_power_law(&[(0.1, 0.01), (0.1, 0.02)]).is_err());
        assert!(fit_power_law(&[(-0.1, 0.01), (0.1, 0.02)]).is_err());
    }

    proptest! {
        #[test]
        fn exact_on_noise_free_power_laws(
            nu in -3.0f64..4.0,
            c in 1e-3f64..1e3,
            h0 in 1e-3f64..0.5,
            n in 2usize..8,
        ) {
            let s: Vec<_> = (0..n).map(|k| {
                let h = h0 / 2f64.powi(k as i32);
                (h, c * h.powf(nu))
            }).collect();
            let f = fit_power_law(&s).unwrap();
            prop_assert!((f.exponent - nu).abs() <= 1e-12 * nu.abs().max(1.0));
            prop_assert!((f.prefactor - c).abs() <= 1e-10 * c);
            prop_assert!(f.rms_log_residual <= 1e-12);
        }
    }
}
