use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

pub const STD_FLOOR: f64 = 1e-8;

/// Per-dimension z-score statistics, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Normalizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Normalizer {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| ForecastError::Shape("cannot fit a normalizer on zero rows".into()))?
            .as_ref();
        let dim = first.len();
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != dim) {
            return Err(ForecastError::Shape(format!(
                "row {bad} has {} entries, expected {dim}",
                rows[bad].as_ref().len()
            )));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r.as_ref()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r.as_ref()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut std: Vec<f64> = var.iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
        // exactly constant columns normalise to exact zeros
        for j in 0..dim {
            if rows.iter().all(|r| r.as_ref()[j] == first[j]) {
                mean[j] = first[j];
                std[j] = STD_FLOOR;
            }
        }
        Ok(Normalizer { mean, std })
    }

    pub fn identity(dim: usize) -> Self {
        Normalizer {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(ForecastError::Shape(format!(
                "normalizer has {} dims, vector {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }

    pub fn invert(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check(z)?;
        Ok(z.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| v * s + m)
            .collect())
    }
}
