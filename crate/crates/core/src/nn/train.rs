use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{loss_and_grad, loss_value, LossKind, ZERO_GUARD};
use super::model::{Gradients, MlpModel};
use crate::error::{ForecastError, Result};

/// Anything that pairs a model input with a regression target.
pub trait Supervised {
    fn input(&self) -> &[f64];
    fn target(&self) -> &[f64];
}

/// Plain input/target pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl Example {
    pub fn new(input: Vec<f64>, target: Vec<f64>) -> Self {
        Example { input, target }
    }
}

impl Supervised for Example {
    fn input(&self) -> &[f64] {
        &self.input
    }
    fn target(&self) -> &[f64] {
        &self.target
    }
}

impl<T: Supervised + ?Sized> Supervised for &T {
    fn input(&self) -> &[f64] {
        (**self).input()
    }
    fn target(&self) -> &[f64] {
        (**self).target()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
    /// Stop after this many epochs without a new best validation MAPE and
    /// restore the best weights.
    pub early_stop_patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: Optimizer::adam(),
            seed: 0,
            early_stop_patience: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(ForecastError::Config("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ForecastError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.early_stop_patience == Some(0) {
            return Err(ForecastError::Config(
                "early_stop_patience must be positive".into(),
            ));
        }
        if let Optimizer::Adam { beta1, beta2, eps } = self.optimizer {
            let ok = (0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2) && eps > 0.0;
            if !ok {
                return Err(ForecastError::Config(format!(
                    "invalid adam parameters beta1={beta1} beta2={beta2} eps={eps}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    /// Monitored validation score (MAPE in percent unless a custom monitor is used).
    pub val_score: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: MlpModel,
    pub history: Vec<EpochRecord>,
    /// Epoch whose weights were returned when early stopping restored them;
    /// 0 means the initial weights.
    pub best_epoch: Option<usize>,
}

/// Mean batch loss and its exact gradient w.r.t. every parameter.
pub fn gradients<S: Supervised>(
    model: &MlpModel,
    batch: &[S],
    kind: LossKind,
) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(ForecastError::Shape("empty batch".into()));
    }
    let mut grads = Gradients::zeros_like(model);
    let mut d_out = vec![0.0; model.output_dim()];
    let mut total = 0.0;
    for sample in batch {
        if sample.target().len() != model.output_dim() {
            return Err(ForecastError::Shape(format!(
                "model emits {} outputs, target has {}",
                model.output_dim(),
                sample.target().len()
            )));
        }
        let trace = model.forward_trace(sample.input())?;
        let output = trace.activations.last().unwrap();
        total += loss_and_grad(kind, output, sample.target(), &mut d_out)?;
        model.backward(&trace, &d_out, &mut grads);
    }
    let scale = 1.0 / batch.len() as f64;
    grads.scale(scale);
    Ok((total * scale, grads))
}

/// Mean loss of `model` over `samples`.
pub fn dataset_loss<S: Supervised>(model: &MlpModel, samples: &[S], kind: LossKind) -> Result<f64> {
    if samples.is_empty() {
        return Err(ForecastError::Shape("empty sample set".into()));
    }
    let mut total = 0.0;
    for s in samples {
        total += loss_value(kind, &model.forward(s.input())?, s.target())?;
    }
    Ok(total / samples.len() as f64)
}

/// Optimizer moments carried between steps.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    optimizer: Optimizer,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn new(model: &MlpModel, optimizer: Optimizer) -> Self {
        let zeros = Gradients::zeros_like(model);
        let (first, second) = match optimizer {
            Optimizer::Sgd => (Vec::new(), Vec::new()),
            Optimizer::Adam { .. } => {
                let all: Vec<Vec<f64>> = zeros.weights.into_iter().chain(zeros.biases).collect();
                (all.clone(), all)
            }
        };
        OptimizerState {
            optimizer,
            step: 0,
            first,
            second,
        }
    }

    /// Applies one update to `model` in place.
    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients, learning_rate: f64) {
        self.step += 1;
        match self.optimizer {
            Optimizer::Sgd => {
                for (w, g) in model.weights_mut().iter_mut().zip(&grads.weights) {
                    w.iter_mut().zip(g).for_each(|(p, g)| *p -= learning_rate * g);
                }
                for (b, g) in model.biases_mut().iter_mut().zip(&grads.biases) {
                    b.iter_mut().zip(g).for_each(|(p, g)| *p -= learning_rate * g);
                }
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                let adam = Adam {
                    beta1,
                    beta2,
                    eps,
                    c1: 1.0 - beta1.powi(self.step as i32),
                    c2: 1.0 - beta2.powi(self.step as i32),
                    lr: learning_rate,
                };
                let offset = grads.weights.len();
                for (k, w) in model.weights_mut().iter_mut().enumerate() {
                    adam.update(w, &grads.weights[k], &mut self.first[k], &mut self.second[k]);
                }
                for (k, b) in model.biases_mut().iter_mut().enumerate() {
                    let j = offset + k;
                    adam.update(b, &grads.biases[k], &mut self.first[j], &mut self.second[j]);
                }
            }
        }
    }
}

struct Adam {
    beta1: f64,
    beta2: f64,
    eps: f64,
    c1: f64,
    c2: f64,
    lr: f64,
}

impl Adam {
    #[inline]
    fn update(&self, params: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64]) {
        for i in 0..params.len() {
            let g = grads[i];
            m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g;
            v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = m[i] / self.c1;
            let v_hat = v[i] / self.c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

fn mape_fraction<S: Supervised>(model: &MlpModel, samples: &[S]) -> Result<Option<f64>> {
    let mut total = 0.0;
    let mut count = 0usize;
    for s in samples {
        if s.target().iter().any(|t| t.abs() < ZERO_GUARD) {
            return Ok(None);
        }
        let out = model.forward(s.input())?;
        for (p, t) in out.iter().zip(s.target()) {
            total += ((t - p) / t).abs();
            count += 1;
        }
    }
    Ok((count > 0).then(|| 100.0 * total / count as f64))
}

/// Validation score of a candidate model; lower is better.
pub type Monitor<'a> = &'a mut dyn FnMut(&MlpModel) -> Result<f64>;

/// Trains `model` on `train_set`. Validation is scored by MAPE when every
/// validation target clears the zero guard and by the training loss otherwise.
pub fn train<S: Supervised>(
    model: &MlpModel,
    train_set: &[S],
    val_set: &[S],
    kind: LossKind,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let use_mape = !val_set.is_empty()
        && val_set
            .iter()
            .all(|s| s.target().iter().all(|t| t.abs() >= ZERO_GUARD));
    let mut monitor = |m: &MlpModel| -> Result<f64> {
        if use_mape {
            Ok(mape_fraction(m, val_set)?.unwrap_or(f64::INFINITY))
        } else {
            dataset_loss(m, val_set, kind)
        }
    };
    let monitor: Option<Monitor<'_>> = if val_set.is_empty() {
        None
    } else {
        Some(&mut monitor)
    };
    train_with_monitor(model, train_set, val_set, kind, cfg, monitor)
}

/// Training loop with a caller-supplied validation score (lower is better).
pub fn train_with_monitor<S: Supervised>(
    model: &MlpModel,
    train_set: &[S],
    val_set: &[S],
    kind: LossKind,
    cfg: &TrainConfig,
    mut monitor: Option<Monitor<'_>>,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    kind.check()?;
    if train_set.is_empty() {
        return Err(ForecastError::Shape("training set is empty".into()));
    }
    let mut model = model.clone();
    let mut state = OptimizerState::new(&model, cfg.optimizer);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    // the untrained weights compete as epoch 0
    let mut best: Option<(f64, usize, MlpModel)> = None;
    if let (Some(_), Some(f)) = (cfg.early_stop_patience, monitor.as_deref_mut()) {
        if cfg.epochs > 0 {
            best = Some((f(&model)?, 0, model.clone()));
        }
    }
    let mut since_best = 0usize;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut running = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&S> = chunk.iter().map(|&i| &train_set[i]).collect();
            let (loss, grads) = gradients(&model, &batch, kind)?;
            if !loss.is_finite() || !grads.max_abs().is_finite() {
                return Err(ForecastError::Diverged { epoch });
            }
            running += loss * chunk.len() as f64;
            state.step(&mut model, &grads, cfg.learning_rate);
        }
        let train_loss = running / train_set.len() as f64;
        if !train_loss.is_finite() || model.params().iter().any(|p| !p.is_finite()) {
            return Err(ForecastError::Diverged { epoch });
        }

        let val_loss = if val_set.is_empty() {
            None
        } else {
            Some(dataset_loss(&model, val_set, kind)?)
        };
        let val_score = match monitor.as_deref_mut() {
            Some(f) => Some(f(&model)?),
            None => None,
        };
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_score,
        });

        if let (Some(patience), Some(score)) = (cfg.early_stop_patience, val_score) {
            let improved = best.as_ref().is_none_or(|(b, _, _)| score < *b);
            if improved {
                best = Some((score, epoch, model.clone()));
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= patience {
                    break;
                }
            }
        }
    }

    let (model, best_epoch) = match best {
        Some((_, epoch, m)) => (m, Some(epoch)),
        None => (model, None),
    };
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
    })
}
