use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::anchor::afore_decode;
use crate::dataset::Normalizer;
use crate::error::{ForecastError, Result};
use crate::features::{FeatureSample, SchemaId};
use crate::nn::{LossKind, MlpModel};

pub const ARTIFACT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Baseline,
    Afore,
    Reself,
    Osdf,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Baseline,
        StrategyKind::Afore,
        StrategyKind::Reself,
        StrategyKind::Osdf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Baseline => "baseline",
            StrategyKind::Afore => "afore",
            StrategyKind::Reself => "reself",
            StrategyKind::Osdf => "osdf",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ForecastError::Parameter(format!("unknown strategy '{s}'")))
    }
}

/// One trained network with the input and output transforms around it:
/// `output = model(normalize(input[subset])) * target_scale + target_offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub model: MlpModel,
    pub normalizer: Normalizer,
    /// Input positions the model sees, in order; `None` means all of them.
    #[serde(default)]
    pub feature_subset: Option<Vec<usize>>,
    pub target_scale: f64,
    #[serde(default)]
    pub target_offset: f64,
}

impl Stage {
    /// Model input for a full schema vector.
    pub fn features(&self, input: &[f64]) -> Result<Vec<f64>> {
        match &self.feature_subset {
            Some(idx) => {
                let picked = idx
                    .iter()
                    .map(|&i| {
                        input.get(i).copied().ok_or_else(|| {
                            ForecastError::Shape(format!("feature {i} outside input of length {}", input.len()))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                self.normalizer.apply(&picked)
            }
            None => self.normalizer.apply(input),
        }
    }

    pub fn output(&self, input: &[f64]) -> Result<Vec<f64>> {
        let raw = self.model.forward(&self.features(input)?)?;
        Ok(raw
            .into_iter()
            .map(|v| v * self.target_scale + self.target_offset)
            .collect())
    }

    fn validate(&self, input_dim: usize, target_dim: usize, what: &str) -> Result<()> {
        let seen = match &self.feature_subset {
            Some(idx) => {
                if let Some(&bad) = idx.iter().find(|&&i| i >= input_dim) {
                    return Err(ForecastError::Shape(format!(
                        "{what} stage selects feature {bad} of a {input_dim}-dim input"
                    )));
                }
                idx.len()
            }
            None => input_dim,
        };
        if self.model.input_dim() != seen || self.normalizer.dim() != seen {
            return Err(ForecastError::Shape(format!(
                "{what} stage: model takes {}, normalizer {} and schema provides {seen} inputs",
                self.model.input_dim(),
                self.normalizer.dim()
            )));
        }
        if self.model.output_dim() != target_dim {
            return Err(ForecastError::Shape(format!(
                "{what} stage emits {} values, schema target has {target_dim}",
                self.model.output_dim()
            )));
        }
        if !(self.target_scale > 0.0 && self.target_scale.is_finite()) || !self.target_offset.is_finite() {
            return Err(ForecastError::Parameter(format!(
                "{what} stage has invalid target scale {} / offset {}",
                self.target_scale, self.target_offset
            )));
        }
        Ok(())
    }
}

/// A trained strategy. Predictions are always in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyArtifact {
    pub format_version: u32,
    pub kind: StrategyKind,
    pub schema: SchemaId,
    /// Loss the primary model was trained with.
    pub loss: LossKind,
    pub primary: Stage,
    /// Residual model; present exactly for `reself`.
    pub secondary: Option<Stage>,
    /// Present exactly for `osdf`.
    pub lambda: Option<f64>,
    /// Divisor for normalised error metrics (the training series maximum).
    pub norm_constant: f64,
}

impl StrategyArtifact {
    pub fn new(
        kind: StrategyKind,
        schema: SchemaId,
        loss: LossKind,
        primary: Stage,
        secondary: Option<Stage>,
        lambda: Option<f64>,
        norm_constant: f64,
    ) -> Result<Self> {
        let artifact = StrategyArtifact {
            format_version: ARTIFACT_FORMAT_VERSION,
            kind,
            schema,
            loss,
            primary,
            secondary,
            lambda,
            norm_constant,
        };
        artifact.validate()?;
        Ok(artifact)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != ARTIFACT_FORMAT_VERSION {
            return Err(ForecastError::Format {
                line: 0,
                message: format!(
                    "unsupported artifact format_version {} (expected {ARTIFACT_FORMAT_VERSION})",
                    self.format_version
                ),
            });
        }
        if (self.kind == StrategyKind::Reself) != self.secondary.is_some() {
            return Err(ForecastError::Parameter(
                "a secondary model is present exactly for reself artifacts".into(),
            ));
        }
        match (self.kind, self.lambda) {
            (StrategyKind::Osdf, Some(l)) if l > 0.0 && l < 1.0 => {}
            (StrategyKind::Osdf, _) => {
                return Err(ForecastError::Parameter(
                    "osdf artifacts need a lambda in (0, 1)".into(),
                ))
            }
            (_, Some(_)) => {
                return Err(ForecastError::Parameter(format!(
                    "{} artifacts carry no lambda",
                    self.kind
                )))
            }
            _ => {}
        }
        self.loss.check()?;
        if let (StrategyKind::Osdf, LossKind::Osdf { lambda, .. }) = (self.kind, self.loss) {
            if Some(lambda) != self.lambda {
                return Err(ForecastError::Parameter(
                    "osdf artifact lambda disagrees with its loss".into(),
                ));
            }
        }
        if !(self.norm_constant > 0.0 && self.norm_constant.is_finite()) {
            return Err(ForecastError::Parameter(format!(
                "normalisation constant must be positive, got {}",
                self.norm_constant
            )));
        }
        let (i, t) = (self.schema.input_dim(), self.schema.target_dim());
        self.primary.validate(i, t, "primary")?;
        if let Some(s) = &self.secondary {
            s.validate(i, t, "secondary")?;
        }
        Ok(())
    }

    fn check_schema(&self, sample: &FeatureSample) -> Result<()> {
        if sample.schema != self.schema {
            return Err(ForecastError::Schema {
                expected: self.schema.name(),
                actual: sample.schema.name(),
            });
        }
        Ok(())
    }

    /// Primary prediction in physical units and the raw residual output.
    pub fn components(&self, input: &[f64], anchor: Option<&[f64]>) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        if input.len() != self.schema.input_dim() {
            return Err(ForecastError::Shape(format!(
                "{} expects {} inputs, got {}",
                self.schema.name(),
                self.schema.input_dim(),
                input.len()
            )));
        }
        let out = self.primary.output(input)?;
        let primary = if self.kind == StrategyKind::Afore {
            afore_decode(&out, anchor.ok_or(ForecastError::MissingAnchor)?)?
        } else {
            out
        };
        let secondary = match &self.secondary {
            Some(s) => Some(s.output(input)?),
            None => None,
        };
        Ok((primary, secondary))
    }

    pub fn predict_input(&self, input: &[f64], anchor: Option<&[f64]>) -> Result<Vec<f64>> {
        let (mut p, s) = self.components(input, anchor)?;
        if let Some(s) = s {
            p.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: StrategyArtifact = serde_json::from_str(text)?;
        a.validate()?;
        Ok(a)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| ForecastError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ForecastError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Prediction for `sample` in physical units.
pub fn predict(artifact: &StrategyArtifact, sample: &FeatureSample) -> Result<Vec<f64>> {
    artifact.check_schema(sample)?;
    artifact.predict_input(&sample.input, sample.anchor.as_deref())
}

/// `(primary, residual)` parts of a prediction; the residual is `None`
/// unless the artifact is a reself artifact.
pub fn predict_components(artifact: &StrategyArtifact, sample: &FeatureSample) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    artifact.check_schema(sample)?;
    artifact.components(&sample.input, sample.anchor.as_deref())
}

/// Artifact whose prediction is `value` everywhere, regardless of input.
pub fn constant_artifact(schema: SchemaId, value: f64) -> Result<StrategyArtifact> {
    let mut model = MlpModel::zeros(&[schema.input_dim(), 1, schema.target_dim()])?;
    let params = model.n_params();
    let mut flat = model.params();
    flat[params - schema.target_dim()..].fill(value);
    model.set_params(&flat)?;
    let primary = Stage {
        model,
        normalizer: Normalizer::identity(schema.input_dim()),
        feature_subset: None,
        target_scale: 1.0,
        target_offset: 0.0,
    };
    StrategyArtifact::new(
        StrategyKind::Baseline,
        schema,
        LossKind::L2,
        primary,
        None,
        None,
        value.abs().max(1.0),
    )
}
