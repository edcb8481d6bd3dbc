use serde::{Deserialize, Serialize};

use super::anchor::{afore_decode, afore_encode};
use super::artifact::{Stage, StrategyArtifact, StrategyKind};
use crate::dataset::Normalizer;
use crate::error::{ForecastError, Result};
use crate::features::{FeatureSample, SchemaId};
use crate::metrics::mape;
use crate::nn::{train_with_monitor, Example, LossKind, MlpModel, TrainConfig, ZERO_GUARD};

/// Architecture and optimisation settings of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageConfig {
    /// Hidden layer widths.
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
    /// Input positions the network sees; `None` means the full schema.
    pub feature_subset: Option<Vec<usize>>,
}

impl Default for StageConfig {
    fn default() -> Self {
        StageConfig {
            hidden: vec![64],
            train: TrainConfig::default(),
            feature_subset: None,
        }
    }
}

fn common_schema(train: &[FeatureSample], val: &[FeatureSample]) -> Result<SchemaId> {
    let schema = train
        .first()
        .ok_or_else(|| ForecastError::Shape("training set is empty".into()))?
        .schema;
    for s in train.iter().chain(val) {
        if s.schema != schema {
            return Err(ForecastError::Schema {
                expected: schema.name(),
                actual: s.schema.name(),
            });
        }
    }
    Ok(schema)
}

fn targets_clear_guard(samples: &[FeatureSample]) -> bool {
    !samples.is_empty() && samples.iter().all(|s| s.target.iter().all(|t| t.abs() >= ZERO_GUARD))
}

/// Largest training target, the divisor for normalised metrics.
fn norm_constant(train: &[FeatureSample]) -> f64 {
    let m = train
        .iter()
        .flat_map(|s| s.target.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    if m > 0.0 && m.is_finite() {
        m
    } else {
        1.0
    }
}

fn pooled_mape(samples: &[FeatureSample], mut predict: impl FnMut(&FeatureSample) -> Result<Vec<f64>>) -> Result<f64> {
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    for s in samples {
        actual.extend_from_slice(&s.target);
        predicted.extend(predict(s)?);
    }
    mape(&actual, &predicted)
}

struct StageTargets<'a> {
    inputs: Vec<&'a [f64]>,
    targets: Vec<Vec<f64>>,
}

impl<'a> StageTargets<'a> {
    fn new(samples: &'a [FeatureSample], f: impl Fn(&FeatureSample) -> Result<Vec<f64>>) -> Result<Self> {
        Ok(StageTargets {
            inputs: samples.iter().map(|s| s.input.as_slice()).collect(),
            targets: samples.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

fn select(subset: &Option<Vec<usize>>, input: &[f64]) -> Vec<f64> {
    match subset {
        Some(idx) => idx.iter().map(|&i| input[i]).collect(),
        None => input.to_vec(),
    }
}

/// Output transform of a stage being fitted.
#[derive(Debug, Clone, Copy)]
struct Encoding {
    /// Divisor of the shifted targets; `None` uses their mean magnitude.
    scale: Option<f64>,
    offset: f64,
    /// Multiplies the fitted scale in the emitted stage only.
    output_factor: f64,
    /// Start from a network whose stage output is exactly zero.
    zero_start: bool,
}

impl Encoding {
    const RAW: Encoding = Encoding {
        scale: None,
        offset: 0.0,
        output_factor: 1.0,
        zero_start: false,
    };
}

/// Fits one stage. Targets are given in stage-output units; the network
/// learns `(target - offset) / scale`.
type StageMonitor<'a> = &'a mut dyn FnMut(&Stage) -> Result<f64>;

fn fit_stage(
    cfg: &StageConfig,
    schema: SchemaId,
    train: &StageTargets,
    val: &StageTargets,
    enc: Encoding,
    loss: LossKind,
    monitor: Option<StageMonitor<'_>>,
) -> Result<Stage> {
    let input_dim = schema.input_dim();
    if let Some(idx) = &cfg.feature_subset {
        if idx.is_empty() || idx.iter().any(|&i| i >= input_dim) {
            return Err(ForecastError::Config(format!(
                "feature_subset must be non-empty with indices below {input_dim}"
            )));
        }
    }
    if cfg.hidden.contains(&0) {
        return Err(ForecastError::Config("hidden layer widths must be positive".into()));
    }
    let picked: Vec<Vec<f64>> = train.inputs.iter().map(|x| select(&cfg.feature_subset, x)).collect();
    let normalizer = Normalizer::fit(&picked)?;
    let offset = enc.offset;
    let scale = enc.scale.unwrap_or_else(|| {
        let n = train.targets.iter().map(Vec::len).sum::<usize>().max(1) as f64;
        let m = train.targets.iter().flatten().map(|t| (t - offset).abs()).sum::<f64>() / n;
        if m > ZERO_GUARD && m.is_finite() {
            m
        } else {
            1.0
        }
    });
    let encode = |inputs: &[&[f64]], targets: &[Vec<f64>]| -> Result<Vec<Example>> {
        inputs
            .iter()
            .zip(targets)
            .map(|(x, y)| {
                Ok(Example::new(
                    normalizer.apply(&select(&cfg.feature_subset, x))?,
                    y.iter().map(|t| (t - offset) / scale).collect(),
                ))
            })
            .collect()
    };
    let train_ex = encode(&train.inputs, &train.targets)?;
    let val_ex = encode(&val.inputs, &val.targets)?;

    let mut dims = vec![normalizer.dim()];
    dims.extend(&cfg.hidden);
    dims.push(schema.target_dim());
    let mut model = MlpModel::new(&dims, cfg.train.seed)?;
    if enc.zero_start {
        model.zero_output_layer();
        let mut flat = model.params();
        let n = flat.len();
        flat[n - schema.target_dim()..].fill(-offset / scale);
        model.set_params(&flat)?;
    }
    let mut stage = Stage {
        model: model.clone(),
        normalizer: normalizer.clone(),
        feature_subset: cfg.feature_subset.clone(),
        target_scale: scale * enc.output_factor,
        target_offset: offset,
    };
    let outcome = match monitor {
        Some(f) if !val_ex.is_empty() => {
            let mut score = |m: &MlpModel| -> Result<f64> {
                let mut probe = stage.clone();
                probe.model = m.clone();
                f(&probe)
            };
            train_with_monitor(&model, &train_ex, &val_ex, loss, &cfg.train, Some(&mut score))?
        }
        _ => train_with_monitor(&model, &train_ex, &val_ex, loss, &cfg.train, None)?,
    };
    stage.model = outcome.model;
    Ok(stage)
}

/// Raw-target stage monitored by validation MAPE of its own output.
fn direct_stage(
    train: &[FeatureSample],
    val: &[FeatureSample],
    cfg: &StageConfig,
    schema: SchemaId,
    loss: LossKind,
    output_factor: f64,
) -> Result<Stage> {
    let t = StageTargets::new(train, |s| Ok(s.target.clone()))?;
    let v = StageTargets::new(val, |s| Ok(s.target.clone()))?;
    let mut score = |stage: &Stage| pooled_mape(val, |s| stage.output(&s.input));
    let monitor: Option<StageMonitor<'_>> =
        if targets_clear_guard(val) { Some(&mut score) } else { None };
    let enc = Encoding {
        output_factor,
        ..Encoding::RAW
    };
    fit_stage(cfg, schema, &t, &v, enc, loss, monitor)
}

fn reject_osdf(loss: LossKind, what: &str) -> Result<()> {
    if matches!(loss, LossKind::Osdf { .. }) {
        return Err(ForecastError::Parameter(format!(
            "{what} does not take the osdf loss; use the osdf strategy"
        )));
    }
    Ok(())
}

/// Network trained directly on the targets.
pub fn train_baseline(
    train: &[FeatureSample],
    val: &[FeatureSample],
    cfg: &StageConfig,
    loss: LossKind,
) -> Result<StrategyArtifact> {
    reject_osdf(loss, "baseline")?;
    let schema = common_schema(train, val)?;
    let stage = direct_stage(train, val, cfg, schema, loss, 1.0)?;
    StrategyArtifact::new(StrategyKind::Baseline, schema, loss, stage, None, None, norm_constant(train))
}

/// Network trained on relative changes against each sample's anchor,
/// starting from the anchor itself (zero change). Percentage losses are applied to the ratio `load / anchor`, which makes
/// them equal to the same loss on decoded loads.
pub fn train_afore(
    train: &[FeatureSample],
    val: &[FeatureSample],
    cfg: &StageConfig,
    loss: LossKind,
) -> Result<StrategyArtifact> {
    reject_osdf(loss, "afore")?;
    let schema = common_schema(train, val)?;
    let mut bad = Vec::new();
    for (i, s) in train.iter().chain(val).enumerate() {
        match &s.anchor {
            None => return Err(ForecastError::MissingAnchor),
            Some(a) if a.len() != s.target.len() || a.iter().any(|&v| !(v > 0.0 && v.is_finite())) => bad.push(i),
            _ => {}
        }
    }
    if !bad.is_empty() {
        return Err(ForecastError::DegenerateAnchorSamples { samples: bad });
    }
    let encode = |s: &FeatureSample| afore_encode(&s.target, s.anchor.as_deref().unwrap());
    let t = StageTargets::new(train, encode)?;
    let v = StageTargets::new(val, encode)?;
    let offset = if loss.is_percentage() { -1.0 } else { 0.0 };
    let mut score = |stage: &Stage| {
        pooled_mape(val, |s| afore_decode(&stage.output(&s.input)?, s.anchor.as_deref().unwrap()))
    };
    let monitor: Option<StageMonitor<'_>> =
        if targets_clear_guard(val) { Some(&mut score) } else { None };
    let enc = Encoding {
        scale: Some(1.0),
        offset,
        output_factor: 1.0,
        zero_start: true,
    };
    let stage = fit_stage(cfg, schema, &t, &v, enc, loss, monitor)?;
    StrategyArtifact::new(StrategyKind::Afore, schema, loss, stage, None, None, norm_constant(train))
}

/// Two-stage residual learning. The primary network is trained on the
/// targets; the secondary learns the primary's training-set residuals and
/// starts from a zero output layer. Percentage losses cannot be applied to
/// residuals, which cross zero, so the secondary then uses `l2`.
pub fn train_reself(
    train: &[FeatureSample],
    val: &[FeatureSample],
    primary_cfg: &StageConfig,
    secondary_cfg: &StageConfig,
    loss: LossKind,
) -> Result<StrategyArtifact> {
    reject_osdf(loss, "reself")?;
    let schema = common_schema(train, val)?;
    let primary = direct_stage(train, val, primary_cfg, schema, loss, 1.0)?;

    let residual = |s: &FeatureSample| -> Result<Vec<f64>> {
        let p = primary.output(&s.input)?;
        Ok(s.target.iter().zip(&p).map(|(t, p)| t - p).collect())
    };
    let t = StageTargets::new(train, residual)?;
    let v = StageTargets::new(val, residual)?;
    let val_primary: Vec<Vec<f64>> = val.iter().map(|s| primary.output(&s.input)).collect::<Result<_>>()?;
    let mut score = |stage: &Stage| {
        let mut k = 0;
        pooled_mape(val, |s| {
            let mut p = val_primary[k].clone();
            k += 1;
            p.iter_mut().zip(stage.output(&s.input)?).for_each(|(a, b)| *a += b);
            Ok(p)
        })
    };
    let monitor: Option<StageMonitor<'_>> =
        if targets_clear_guard(val) { Some(&mut score) } else { None };
    let loss2 = if loss.is_percentage() { LossKind::L2 } else { loss };
    let enc = Encoding {
        zero_start: true,
        ..Encoding::RAW
    };
    let secondary = fit_stage(secondary_cfg, schema, &t, &v, enc, loss2, monitor)?;
    StrategyArtifact::new(
        StrategyKind::Reself,
        schema,
        loss,
        primary,
        Some(secondary),
        None,
        norm_constant(train),
    )
}

/// Network trained against the online soft target `g + lambda * phi`.
/// The loss vanishes where `(1 - lambda) * phi = g`, so the artifact emits
/// `(1 - lambda) * phi`.
pub fn train_osdf(
    train: &[FeatureSample],
    val: &[FeatureSample],
    cfg: &StageConfig,
    lambda: f64,
    stop_gradient: bool,
) -> Result<StrategyArtifact> {
    let loss = match LossKind::osdf(lambda)? {
        LossKind::Osdf { lambda, .. } => LossKind::Osdf { lambda, stop_gradient },
        other => other,
    };
    let schema = common_schema(train, val)?;
    let stage = direct_stage(train, val, cfg, schema, loss, 1.0 - lambda)?;
    StrategyArtifact::new(StrategyKind::Osdf, schema, loss, stage, None, Some(lambda), norm_constant(train))
}
