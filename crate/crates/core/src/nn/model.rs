use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Identity => z,
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Dense feedforward network. Layer `k` maps `layer_dims[k]` inputs to
/// `layer_dims[k + 1]` outputs with a row-major `(out, in)` weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDocument", into = "ModelDocument")]
pub struct MlpModel {
    layer_dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    hidden_activation: Activation,
    output_activation: Activation,
}

/// On-disk JSON layout of a model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub layer_dims: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl TryFrom<ModelDocument> for MlpModel {
    type Error = ForecastError;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(ForecastError::Config(format!(
                "unsupported model format_version {}",
                doc.format_version
            )));
        }
        MlpModel::from_parts(
            doc.layer_dims,
            doc.weights,
            doc.biases,
            doc.hidden_activation,
            doc.output_activation,
        )
    }
}

impl From<MlpModel> for ModelDocument {
    fn from(m: MlpModel) -> Self {
        ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            layer_dims: m.layer_dims,
            hidden_activation: m.hidden_activation,
            output_activation: m.output_activation,
            weights: m.weights,
            biases: m.biases,
        }
    }
}

/// Per-layer pre-activations and activations recorded during a forward pass.
#[derive(Debug, Clone)]
pub(crate) struct Trace {
    /// `activations[0]` is the input, `activations[k + 1]` the output of layer `k`.
    pub activations: Vec<Vec<f64>>,
    pub pre_activations: Vec<Vec<f64>>,
}

fn check_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 {
        return Err(ForecastError::Shape(format!(
            "need at least input and output dims, got {layer_dims:?}"
        )));
    }
    if layer_dims.contains(&0) {
        return Err(ForecastError::Shape(format!(
            "layer dims must be positive, got {layer_dims:?}"
        )));
    }
    Ok(())
}

impl MlpModel {
    /// Relu hidden layers, linear output, weights uniform in
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, zero biases.
    pub fn new(layer_dims: &[usize], seed: u64) -> Result<Self> {
        check_dims(layer_dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::with_capacity(layer_dims.len() - 1);
        let mut biases = Vec::with_capacity(layer_dims.len() - 1);
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let w = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-bound..bound))
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(MlpModel {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            hidden_activation: Activation::Relu,
            output_activation: Activation::Identity,
        })
    }

    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        check_dims(layer_dims)?;
        let weights = layer_dims.windows(2).map(|p| vec![0.0; p[0] * p[1]]).collect();
        let biases = layer_dims[1..].iter().map(|&d| vec![0.0; d]).collect();
        Ok(MlpModel {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            hidden_activation: Activation::Relu,
            output_activation: Activation::Identity,
        })
    }

    /// Sets the last layer's weights and biases to zero, so the model emits
    /// zeros until trained.
    pub fn zero_output_layer(&mut self) {
        let last = self.weights.len() - 1;
        self.weights[last].fill(0.0);
        self.biases[last].fill(0.0);
    }

    pub fn from_parts(
        layer_dims: Vec<usize>,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        check_dims(&layer_dims)?;
        let n_layers = layer_dims.len() - 1;
        if weights.len() != n_layers || biases.len() != n_layers {
            return Err(ForecastError::Shape(format!(
                "{n_layers} layers need {n_layers} weight and bias arrays, got {} and {}",
                weights.len(),
                biases.len()
            )));
        }
        for (k, pair) in layer_dims.windows(2).enumerate() {
            if weights[k].len() != pair[0] * pair[1] {
                return Err(ForecastError::Shape(format!(
                    "layer {k}: weight array has {} entries, expected {}x{}",
                    weights[k].len(),
                    pair[1],
                    pair[0]
                )));
            }
            if biases[k].len() != pair[1] {
                return Err(ForecastError::Shape(format!(
                    "layer {k}: bias array has {} entries, expected {}",
                    biases[k].len(),
                    pair[1]
                )));
            }
            if weights[k].iter().chain(&biases[k]).any(|v| !v.is_finite()) {
                return Err(ForecastError::Parameter(format!(
                    "layer {k} has non-finite parameters"
                )));
            }
        }
        Ok(MlpModel {
            layer_dims,
            weights,
            biases,
            hidden_activation,
            output_activation,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden_activation
    }

    pub fn output_activation(&self) -> Activation {
        self.output_activation
    }

    /// Row-major `(out, in)` weights of layer `k`.
    pub fn weights(&self, k: usize) -> &[f64] {
        &self.weights[k]
    }

    pub fn biases(&self, k: usize) -> &[f64] {
        &self.biases[k]
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Flattened parameters, layer by layer: weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    /// Inverse of [`MlpModel::params`].
    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(ForecastError::Shape(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                flat.len()
            )));
        }
        let mut at = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let (nw, nb) = (w.len(), b.len());
            w.copy_from_slice(&flat[at..at + nw]);
            at += nw;
            b.copy_from_slice(&flat[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.weights
    }

    pub(crate) fn biases_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.biases
    }

    fn activation_of(&self, layer: usize) -> Activation {
        if layer + 1 == self.n_layers() {
            self.output_activation
        } else {
            self.hidden_activation
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(ForecastError::Shape(format!(
                "model expects {} inputs, got {}",
                self.input_dim(),
                input.len()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut current = input.to_vec();
        for k in 0..self.n_layers() {
            let act = self.activation_of(k);
            current = self
                .affine(k, &current)
                .into_iter()
                .map(|z| act.apply(z))
                .collect();
        }
        Ok(current)
    }

    pub(crate) fn forward_trace(&self, input: &[f64]) -> Result<Trace> {
        self.check_input(input)?;
        let mut activations = Vec::with_capacity(self.n_layers() + 1);
        let mut pre_activations = Vec::with_capacity(self.n_layers());
        activations.push(input.to_vec());
        for k in 0..self.n_layers() {
            let act = self.activation_of(k);
            let z = self.affine(k, &activations[k]);
            activations.push(z.iter().map(|&v| act.apply(v)).collect());
            pre_activations.push(z);
        }
        Ok(Trace {
            activations,
            pre_activations,
        })
    }

    fn affine(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let fan_in = self.layer_dims[k];
        self.weights[k]
            .chunks_exact(fan_in)
            .zip(&self.biases[k])
            .map(|(row, b)| b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    /// Backpropagates `d_output` (gradient of the loss w.r.t. the network
    /// output) through `trace`, accumulating into `grads`.
    pub(crate) fn backward(&self, trace: &Trace, d_output: &[f64], grads: &mut Gradients) {
        let mut delta: Vec<f64> = d_output.to_vec();
        for k in (0..self.n_layers()).rev() {
            let act = self.activation_of(k);
            for (d, &z) in delta.iter_mut().zip(&trace.pre_activations[k]) {
                *d *= act.derivative(z);
            }
            let fan_in = self.layer_dims[k];
            let input = &trace.activations[k];
            for (row, &d) in grads.weights[k].chunks_exact_mut(fan_in).zip(&delta) {
                if d != 0.0 {
                    for (g, &x) in row.iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
            }
            for (g, &d) in grads.biases[k].iter_mut().zip(&delta) {
                *g += d;
            }
            if k > 0 {
                let mut prev = vec![0.0; fan_in];
                for (row, &d) in self.weights[k].chunks_exact(fan_in).zip(&delta) {
                    if d != 0.0 {
                        for (p, &w) in prev.iter_mut().zip(row) {
                            *p += w * d;
                        }
                    }
                }
                delta = prev;
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
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

/// Gradients with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Same ordering as [`MlpModel::params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for v in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            v.iter_mut().for_each(|g| *g *= factor);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(&self.biases)
            .flatten()
            .fold(0.0_f64, |m, g| m.max(g.abs()))
    }
}
