use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

const VARIANCE_FLOOR: f64 = 1e-12;

/// Skewness `m3 / m2^(3/2)` from biased central moments; zero when the
/// variance falls below `1e-12`.
pub fn skewness(values: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(ForecastError::Arity {
            needed: 3,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 < VARIANCE_FLOOR {
        return Ok(0.0);
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    Ok(m3 / m2.powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub avg: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub skew: f64,
}

impl SummaryStats {
    pub fn of(values: &[f64]) -> Result<Self> {
        let skew = skewness(values)?;
        let first = values[0];
        if values.iter().all(|&v| v == first) {
            return Ok(SummaryStats {
                avg: first,
                std: 0.0,
                min: first,
                max: first,
                skew: 0.0,
            });
        }
        let n = values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let avg = (values.iter().sum::<f64>() / n).clamp(min, max);
        let std = (values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / n).sqrt();
        Ok(SummaryStats {
            avg,
            std,
            min,
            max,
            skew,
        })
    }

    /// `[avg, std, min, max, skew]`
    pub fn to_array(&self) -> [f64; 5] {
        [self.avg, self.std, self.min, self.max, self.skew]
    }
}
