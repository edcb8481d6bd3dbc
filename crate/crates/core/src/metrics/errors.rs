use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};
use crate::nn::ZERO_GUARD;

fn same_len(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(ForecastError::Shape(format!(
            "{} actual values against {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(ForecastError::Shape("no values to score".into()));
    }
    Ok(())
}

/// Mean absolute percentage error in percent, pooled over all entries.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    same_len(actual, predicted)?;
    let mut total = 0.0;
    for (index, (&a, &p)) in actual.iter().zip(predicted).enumerate() {
        if !(a.abs() >= ZERO_GUARD) {
            return Err(ForecastError::DegenerateActual { index, value: a });
        }
        total += ((a - p) / a).abs();
    }
    Ok(100.0 * total / actual.len() as f64)
}

/// Absolute-error metrics in physical units and divided by a
/// normalisation constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsoluteErrors {
    pub mae_norm: f64,
    pub mae_phys: f64,
    pub rmse_norm: f64,
    pub rmse_phys: f64,
}

pub fn mae_rmse(actual: &[f64], predicted: &[f64], normalization_constant: f64) -> Result<AbsoluteErrors> {
    if !(normalization_constant > 0.0 && normalization_constant.is_finite()) {
        return Err(ForecastError::Parameter(format!(
            "normalisation constant must be positive, got {normalization_constant}"
        )));
    }
    same_len(actual, predicted)?;
    let n = actual.len() as f64;
    let (mut abs, mut sq) = (0.0, 0.0);
    for (a, p) in actual.iter().zip(predicted) {
        let e = a - p;
        abs += e.abs();
        sq += e * e;
    }
    let mae = abs / n;
    let rmse = (sq / n).sqrt();
    Ok(AbsoluteErrors {
        mae_norm: mae / normalization_constant,
        mae_phys: mae,
        rmse_norm: rmse / normalization_constant,
        rmse_phys: rmse,
    })
}

/// Per-window quantities that aggregate linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct WindowErrors {
    pub mape_pct: f64,
    pub mae: f64,
    pub mse: f64,
}

impl WindowErrors {
    pub fn of(actual: &[f64], predicted: &[f64]) -> Result<Self> {
        let m = mae_rmse(actual, predicted, 1.0)?;
        Ok(WindowErrors {
            mape_pct: mape(actual, predicted)?,
            mae: m.mae_phys,
            mse: m.rmse_phys * m.rmse_phys,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mape_spot_values() {
        assert_eq!(mape(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert!((mape(&[100.0], &[90.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!((mape(&[100.0, 200.0], &[110.0, 180.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(
            mape(&[1.0, 0.0], &[1.0, 1.0]),
            Err(ForecastError::DegenerateActual { index: 1, .. })
        ));
    }

    #[test]
    fn mae_rmse_spot_values() {
        let z = mae_rmse(&[5.0, 6.0], &[5.0, 6.0], 10.0).unwrap();
        assert_eq!((z.mae_phys, z.rmse_phys, z.mae_norm, z.rmse_norm), (0.0, 0.0, 0.0, 0.0));
        let a = mae_rmse(&[10.0, 10.0], &[9.0, 11.0], 1.0).unwrap();
        assert_eq!((a.mae_phys, a.rmse_phys), (1.0, 1.0));
        let b = mae_rmse(&[10.0, 10.0], &[10.0, 8.0], 4.0).unwrap();
        assert_eq!(b.mae_phys, 1.0);
        assert!((b.rmse_phys - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.mae_norm, 0.25);
        assert!(mae_rmse(&[1.0], &[1.0], 0.0).is_err());
        assert!(mae_rmse(&[1.0], &[1.0], -2.0).is_err());
    }

    proptest! {
        #[test]
        fn rmse_dominates_mae(pairs in prop::collection::vec((1.0f64..1e3, 1.0f64..1e3), 1..50)) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let m = mae_rmse(&a, &p, 7.0).unwrap();
            prop_assert!(m.rmse_phys >= m.mae_phys * (1.0 - 1e-12));
        }

        #[test]
        fn mape_scale_invariant(
            pairs in prop::collection::vec((1.0f64..1e3, 1.0f64..1e3), 1..50),
            c in 1e-3f64..1e3,
        ) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let ca: Vec<f64> = a.iter().map(|v| v * c).collect();
            let cp: Vec<f64> = p.iter().map(|v| v * c).collect();
            let (x, y) = (mape(&a, &p).unwrap(), mape(&ca, &cp).unwrap());
            prop_assert!((x - y).abs() <= 1e-10 * x.max(1.0));
        }
    }
}
