use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, PowerLawFit};

/// `(dx, error)` samples from a grid-refinement study and their power-law
/// fit. Samples are kept in order of decreasing `dx`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSeries {
    pub label: String,
    pub samples: Vec<(f64, f64)>,
    pub fit: Option<PowerLawFit>,
}

impl ConvergenceSeries {
    /// Sorts the samples and fits the strictly positive ones when at least
    /// two exist. Non-positive samples are kept in `samples` but excluded
    /// from the fit.
    pub fn new(label: impl Into<String>, mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::contract("convergence series needs at least one sample"));
        }
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        let positive: Vec<_> = samples.iter().copied().filter(|s| s.1 > 0.0).collect();
        let fit = if positive.len() >= 2 {
            Some(fit_power_law(&positive)?)
        } else {
            None
        };
        Ok(Self {
            label: label.into(),
            samples,
            fit,
        })
    }

    /// Series recorded without a fit (odd moments, for instance).
    pub fn unfitted(label: impl Into<String>, mut samples: Vec<(f64, f64)>) -> Self {
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        Self {
            label: label.into(),
            samples,
            fit: None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        self.fit.map(|f| f.exponent)
    }

    /// Errors strictly decrease as `dx` decreases.
    pub fn strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn max_error(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.1))
    }
}
