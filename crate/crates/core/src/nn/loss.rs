//! Per-sample regression losses and their derivatives w.r.t. the prediction.
//!
//! Every loss is computed elementwise and averaged over the output entries.
//! The percentage losses (`Mape`, `Osdf`) return fractions, not percents.

use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

/// Denominators of the percentage losses below this magnitude are rejected.
pub const ZERO_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossKind {
    L1,
    L2,
    SmoothL1,
    Mape,
    /// Online self-distillation: the soft target `g + lambda * phi` is built
    /// from the model's own current prediction `phi`.
    Osdf {
        lambda: f64,
        /// Treat the soft target as a constant inside each step.
        #[serde(default)]
        stop_gradient: bool,
    },
}

impl LossKind {
    /// Self-distillation loss with `lambda` strictly inside `(0, 1)`.
    pub fn osdf(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(ForecastError::Parameter(format!(
                "osdf lambda must lie in (0, 1), got {lambda}"
            )));
        }
        Ok(LossKind::Osdf {
            lambda,
            stop_gradient: false,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossKind::L1 => "l1",
            LossKind::L2 => "l2",
            LossKind::SmoothL1 => "smooth_l1",
            LossKind::Mape => "mape",
            LossKind::Osdf { .. } => "osdf",
        }
    }

    pub fn is_percentage(&self) -> bool {
        matches!(self, LossKind::Mape | LossKind::Osdf { .. })
    }

    /// Domain check used by the loss routines. `lambda = 0` is admitted here
    /// because it is the point where `Osdf` reduces to `Mape`; public
    /// constructors and strategies require the open interval.
    pub(crate) fn check(&self) -> Result<()> {
        if let LossKind::Osdf { lambda, .. } = *self {
            if !(0.0..1.0).contains(&lambda) {
                return Err(ForecastError::Parameter(format!(
                    "osdf lambda must lie in [0, 1), got {lambda}"
                )));
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for LossKind {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(LossKind::L1),
            "l2" => Ok(LossKind::L2),
            "smooth_l1" => Ok(LossKind::SmoothL1),
            "mape" => Ok(LossKind::Mape),
            other => Err(ForecastError::Parameter(format!("unknown loss '{other}'"))),
        }
    }
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub fn smooth_l1(d: f64) -> f64 {
    let a = d.abs();
    if a < 1.0 {
        0.5 * d * d
    } else {
        a - 0.5
    }
}

fn check_lengths(prediction: &[f64], target: &[f64]) -> Result<()> {
    if prediction.len() != target.len() {
        return Err(ForecastError::Shape(format!(
            "prediction has {} entries, target {}",
            prediction.len(),
            target.len()
        )));
    }
    if prediction.is_empty() {
        return Err(ForecastError::Shape("empty prediction".into()));
    }
    Ok(())
}

fn guard(index: usize, value: f64) -> Result<()> {
    if value.abs() < ZERO_GUARD || !value.is_finite() {
        return Err(ForecastError::DegenerateTarget { index, value });
    }
    Ok(())
}

/// Mean loss over the entries of one sample.
pub fn loss_value(kind: LossKind, prediction: &[f64], target: &[f64]) -> Result<f64> {
    loss_impl(kind, prediction, target, None)
}

/// Mean loss over the entries of one sample; writes `dL/dprediction` into `grad`.
pub fn loss_and_grad(
    kind: LossKind,
    prediction: &[f64],
    target: &[f64],
    grad: &mut [f64],
) -> Result<f64> {
    if grad.len() != prediction.len() {
        return Err(ForecastError::Shape(format!(
            "gradient buffer has {} entries, prediction {}",
            grad.len(),
            prediction.len()
        )));
    }
    loss_impl(kind, prediction, target, Some(grad))
}

fn loss_impl(
    kind: LossKind,
    prediction: &[f64],
    target: &[f64],
    mut grad: Option<&mut [f64]>,
) -> Result<f64> {
    kind.check()?;
    check_lengths(prediction, target)?;
    let n = prediction.len() as f64;
    let mut total = 0.0;
    for (i, (&p, &t)) in prediction.iter().zip(target).enumerate() {
        let (value, slope) = match kind {
            LossKind::L1 => {
                let d = p - t;
                (d.abs(), sign(d))
            }
            LossKind::L2 => {
                let d = p - t;
                (d * d, 2.0 * d)
            }
            LossKind::SmoothL1 => {
                let d = p - t;
                let slope = if d.abs() < 1.0 { d } else { sign(d) };
                (smooth_l1(d), slope)
            }
            LossKind::Mape => {
                guard(i, t)?;
                let num = t - p;
                (num.abs() / t.abs(), -sign(num) / t.abs())
            }
            LossKind::Osdf {
                lambda,
                stop_gradient,
            } => {
                guard(i, t)?;
                let num = t - (1.0 - lambda) * p;
                let den = t + lambda * p;
                guard(i, den)?;
                let value = num.abs() / den.abs();
                let slope = if stop_gradient {
                    -sign(num) / den.abs()
                } else {
                    -(1.0 - lambda) * sign(num) / den.abs()
                        - lambda * num.abs() * sign(den) / (den * den)
                };
                (value, slope)
            }
        };
        total += value;
        if let Some(g) = grad.as_deref_mut() {
            g[i] = slope / n;
        }
    }
    Ok(total / n)
}
