//! Dense feedforward network math: initialization, forward pass, losses,
//! backpropagation and plain gradient-descent updates.
//!
//! Everything here is a pure function over value types. Weight matrices are
//! stored row-major with shape `(fan_out, fan_in)`, so row `j` holds the
//! incoming weights of destination neuron `j`.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Floor applied to probabilities before taking the log in cross-entropy.
pub const CE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("metric `{metric}` is not defined for {task} tasks")]
    UnsupportedMetric { metric: &'static str, task: TaskKind },
}

pub type Result<T> = std::result::Result<T, NnError>;

/// Row-major dense matrix. Serialized as nested arrays, one inner array per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<Option<f64>>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(NnError::Shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(NnError::Shape(format!(
                    "row {i} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a 0-column matrix still has rows
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        self.iter_rows()
            .map(|row| row.iter().zip(v).map(|(w, x)| w * x).sum())
            .collect()
    }

    /// `selfᵀ · v` for a column vector `v` of length `rows`.
    pub fn mul_vec_transposed(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &scale) in self.iter_rows().zip(v) {
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * scale;
            }
        }
        out
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = NnError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl TryFrom<Vec<Vec<Option<f64>>>> for Matrix {
    type Error = NnError;

    fn try_from(rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        Matrix::from_rows(rows.into_iter().map(nullable::fill).collect())
    }
}

/// JSON has no NaN or infinity, so serde_json writes non-finite floats as
/// `null`. These helpers read `null` back as NaN, which lets the trace of a
/// diverged run parse and leaves the verdict to the validator.
pub mod nullable {
    use serde::{Deserialize, Deserializer};

    pub(crate) fn fill(values: Vec<Option<f64>>) -> Vec<f64> {
        values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }

    pub fn f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub fn vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(fill(Vec::<Option<f64>>::deserialize(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Sigmoid,
    Relu,
}

impl ActivationKind {
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Relu => "relu",
        }
    }

    pub fn derivative(self, z: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => {
                let s = activate(self, z);
                s * (1.0 - s)
            }
            // derivative at the kink is taken as 0
            ActivationKind::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl std::str::FromStr for ActivationKind {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "relu" => Ok(ActivationKind::Relu),
            other => Err(NnError::Config(format!(
                "unknown activation `{other}` (expected sigmoid or relu)"
            ))),
        }
    }
}

impl std::fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Classification,
    Regression,
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskKind::Classification => "classification",
            TaskKind::Regression => "regression",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Input size, hidden sizes, output size.
    pub layer_sizes: Vec<usize>,
    pub activation: ActivationKind,
    pub learning_rate: f64,
    pub epochs: u32,
    pub task: TaskKind,
    pub seed: u64,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(NnError::Config(
                "layer_sizes needs at least an input and an output size".into(),
            ));
        }
        if let Some(i) = self.layer_sizes.iter().position(|&n| n == 0) {
            return Err(NnError::Config(format!("layer_sizes[{i}] is zero")));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(NnError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(NnError::Config("epochs must be at least 1".into()));
        }
        let out = self.output_size();
        match self.task {
            TaskKind::Classification if out < 2 => Err(NnError::Config(format!(
                "classification needs at least 2 output units, got {out}"
            ))),
            TaskKind::Regression if out != 1 => Err(NnError::Config(format!(
                "regression requires output size 1, got {out}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("validated non-empty")
    }

    /// Number of weight layers.
    pub fn depth(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            weights: Matrix::zeros(fan_out, fan_in),
            biases: vec![0.0; fan_out],
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weights.cols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.rows()
    }

    fn check_same_shape(&self, other: &Layer, what: &str) -> Result<()> {
        if self.weights.shape() != other.weights.shape() || self.biases.len() != other.biases.len()
        {
            return Err(NnError::Shape(format!(
                "{what}: {:?}/{} vs {:?}/{}",
                self.weights.shape(),
                self.biases.len(),
                other.weights.shape(),
                other.biases.len()
            )));
        }
        Ok(())
    }
}

/// Learned state. `layers[l - 1]` maps activations of layer `l - 1` into layer `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

impl NetworkParams {
    pub fn zeros(layer_sizes: &[usize]) -> Self {
        Self {
            layers: layer_sizes
                .windows(2)
                .map(|w| Layer::zeros(w[0], w[1]))
                .collect(),
        }
    }

    pub fn check_against(&self, config: &NetworkConfig) -> Result<()> {
        if self.layers.len() != config.depth() {
            return Err(NnError::Shape(format!(
                "params have {} layers, config expects {}",
                self.layers.len(),
                config.depth()
            )));
        }
        for (l, (layer, w)) in self
            .layers
            .iter()
            .zip(config.layer_sizes.windows(2))
            .enumerate()
        {
            if layer.weights.shape() != (w[1], w[0]) || layer.biases.len() != w[1] {
                return Err(NnError::Shape(format!(
                    "layer {} is {:?} with {} biases, config expects ({}, {})",
                    l + 1,
                    layer.weights.shape(),
                    layer.biases.len(),
                    w[1],
                    w[0]
                )));
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.weights.as_slice().iter().all(|v| v.is_finite())
                && l.biases.iter().all(|v| v.is_finite())
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.biases.len())
            .sum()
    }
}

/// Per-sample record of a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// `pre_activations[l - 1]` is z for weight layer `l`.
    pub pre_activations: Vec<Vec<f64>>,
    /// `activations[0]` is the input, `activations[L]` the network output.
    pub activations: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("at least the input layer")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
    /// Error signal per weight layer, `deltas[l - 1]` for layer `l`.
    /// Empty when produced by the finite-difference oracle.
    pub deltas: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(params: &NetworkParams) -> Self {
        Self {
            layers: params
                .layers
                .iter()
                .map(|l| Layer::zeros(l.fan_in(), l.fan_out()))
                .collect(),
            deltas: params
                .layers
                .iter()
                .map(|l| vec![0.0; l.fan_out()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(deserialize_with = "nullable::f64")]
    pub loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub val_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub val_accuracy: Option<f64>,
}

/// Glorot-uniform weights, zero biases. Fully determined by `seed`.
pub fn init_params(config: &NetworkConfig, seed: u64) -> Result<NetworkParams> {
    config.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut params = NetworkParams::zeros(&config.layer_sizes);
    for layer in &mut params.layers {
        let bound = glorot_bound(layer.fan_in(), layer.fan_out());
        let dist = Uniform::new_inclusive(-bound, bound)
            .map_err(|e| NnError::Config(format!("weight range: {e}")))?;
        for w in layer.weights.as_mut_slice() {
            *w = dist.sample(&mut rng);
        }
    }
    Ok(params)
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

pub fn activate(kind: ActivationKind, z: f64) -> f64 {
    match kind {
        ActivationKind::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        ActivationKind::Relu => z.max(0.0),
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn forward(params: &NetworkParams, x: &[f64], config: &NetworkConfig) -> Result<ForwardTrace> {
    params.check_against(config)?;
    if x.len() != config.input_size() {
        return Err(NnError::Shape(format!(
            "input has {} features, network expects {}",
            x.len(),
            config.input_size()
        )));
    }
    let depth = params.layers.len();
    let mut pre_activations = Vec::with_capacity(depth);
    let mut activations = Vec::with_capacity(depth + 1);
    activations.push(x.to_vec());
    for (l, layer) in params.layers.iter().enumerate() {
        let input = activations.last().expect("seeded with x");
        let z: Vec<f64> = layer
            .weights
            .mul_vec(input)
            .into_iter()
            .zip(&layer.biases)
            .map(|(wx, b)| wx + b)
            .collect();
        let a = if l + 1 < depth {
            z.iter().map(|&v| activate(config.activation, v)).collect()
        } else {
            match config.task {
                TaskKind::Classification => softmax(&z),
                TaskKind::Regression => z.clone(),
            }
        };
        pre_activations.push(z);
        activations.push(a);
    }
    Ok(ForwardTrace {
        pre_activations,
        activations,
    })
}

/// Softmax cross-entropy against a one-hot target, or mean squared error.
pub fn loss(task: TaskKind, output: &[f64], target: &[f64]) -> Result<f64> {
    if output.len() != target.len() {
        return Err(NnError::Shape(format!(
            "output has {} values, target has {}",
            output.len(),
            target.len()
        )));
    }
    Ok(match task {
        TaskKind::Classification => -output
            .iter()
            .zip(target)
            .map(|(o, t)| t * o.max(CE_EPSILON).ln())
            .sum::<f64>(),
        TaskKind::Regression => {
            output
                .iter()
                .zip(target)
                .map(|(o, t)| (o - t) * (o - t))
                .sum::<f64>()
                / output.len() as f64
        }
    })
}

/// Backpropagation for one sample.
///
/// The output error signal is `output - target` for softmax cross-entropy and
/// `(output - target) * 2 / n_out` for mean squared error.
pub fn backward(
    params: &NetworkParams,
    trace: &ForwardTrace,
    target: &[f64],
    config: &NetworkConfig,
) -> Result<Gradients> {
    params.check_against(config)?;
    let depth = params.layers.len();
    if trace.activations.len() != depth + 1 || trace.pre_activations.len() != depth {
        return Err(NnError::Shape(format!(
            "trace covers {} layers, network has {depth}",
            trace.pre_activations.len()
        )));
    }
    let output = trace.output();
    if target.len() != output.len() {
        return Err(NnError::Shape(format!(
            "target has {} values, output has {}",
            target.len(),
            output.len()
        )));
    }

    let scale = match config.task {
        TaskKind::Classification => 1.0,
        TaskKind::Regression => 2.0 / output.len() as f64,
    };
    let mut delta: Vec<f64> = output
        .iter()
        .zip(target)
        .map(|(o, t)| (o - t) * scale)
        .collect();

    let mut layers = Vec::with_capacity(depth);
    let mut deltas = Vec::with_capacity(depth);
    for l in (0..depth).rev() {
        let input = &trace.activations[l];
        let mut dw = Matrix::zeros(delta.len(), input.len());
        for (j, &d) in delta.iter().enumerate() {
            for (i, &a) in input.iter().enumerate() {
                dw.set(j, i, d * a);
            }
        }
        let next = if l > 0 {
            let back = params.layers[l].weights.mul_vec_transposed(&delta);
            Some(
                back.into_iter()
                    .zip(&trace.pre_activations[l - 1])
                    .map(|(g, &z)| g * config.activation.derivative(z))
                    .collect::<Vec<f64>>(),
            )
        } else {
            None
        };
        layers.push(Layer {
            weights: dw,
            biases: delta.clone(),
        });
        deltas.push(delta);
        match next {
            Some(d) => delta = d,
            None => break,
        }
    }
    layers.reverse();
    deltas.reverse();
    Ok(Gradients { layers, deltas })
}

/// `post = pre - lr * grad` for every weight and bias.
pub fn sgd_update(params: &NetworkParams, grads: &Gradients, lr: f64) -> Result<NetworkParams> {
    if params.layers.len() != grads.layers.len() {
        return Err(NnError::Shape(format!(
            "params have {} layers, gradients {}",
            params.layers.len(),
            grads.layers.len()
        )));
    }
    let layers = params
        .layers
        .iter()
        .zip(&grads.layers)
        .map(|(p, g)| sgd_layer(p, g, lr))
        .collect::<Result<Vec<_>>>()?;
    Ok(NetworkParams { layers })
}

pub fn sgd_layer(layer: &Layer, grad: &Layer, lr: f64) -> Result<Layer> {
    layer.check_same_shape(grad, "layer/gradient")?;
    let weights = layer
        .weights
        .as_slice()
        .iter()
        .zip(grad.weights.as_slice())
        .map(|(w, g)| sgd_step(*w, *g, lr))
        .collect();
    Ok(Layer {
        weights: Matrix::from_vec(layer.fan_out(), layer.fan_in(), weights)?,
        biases: layer
            .biases
            .iter()
            .zip(&grad.biases)
            .map(|(b, g)| sgd_step(*b, *g, lr))
            .collect(),
    })
}

/// The single scalar update rule; trace validation re-evaluates it bit for bit.
#[inline]
pub fn sgd_step(value: f64, grad: f64, lr: f64) -> f64 {
    value - lr * grad
}

/// Index of the largest entry, ties resolved toward the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn accuracy<O, T>(outputs: &[O], targets: &[T], task: TaskKind) -> Result<f64>
where
    O: AsRef<[f64]>,
    T: AsRef<[f64]>,
{
    if task == TaskKind::Regression {
        return Err(NnError::UnsupportedMetric {
            metric: "accuracy",
            task,
        });
    }
    if outputs.len() != targets.len() {
        return Err(NnError::Shape(format!(
            "{} outputs vs {} targets",
            outputs.len(),
            targets.len()
        )));
    }
    if outputs.is_empty() {
        return Err(NnError::Shape("accuracy of an empty sample set".into()));
    }
    let correct = outputs
        .iter()
        .zip(targets)
        .filter(|(o, t)| argmax(o.as_ref()) == argmax(t.as_ref()))
        .count();
    Ok(correct as f64 / outputs.len() as f64)
}

/// Rows fed to a full-batch step. Inputs are normalized features.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub inputs: &'a [Vec<f64>],
    pub targets: &'a [Vec<f64>],
}

impl<'a> Batch<'a> {
    pub fn new(inputs: &'a [Vec<f64>], targets: &'a [Vec<f64>]) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(NnError::Shape(format!(
                "{} inputs vs {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Result of one full-batch forward/backward sweep. Every field is an average
/// over the batch rows, accumulated in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchPass {
    pub loss: f64,
    pub accuracy: Option<f64>,
    /// Mean activation per layer, `mean_activations[l]` for layer `l` (0 = inputs).
    pub mean_activations: Vec<Vec<f64>>,
    pub gradients: Gradients,
    pub outputs: Vec<Vec<f64>>,
}

fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

fn scale_in_place(v: &mut [f64], n: f64) {
    for a in v {
        *a /= n;
    }
}

pub fn batch_pass(params: &NetworkParams, batch: Batch<'_>, config: &NetworkConfig) -> Result<BatchPass> {
    if batch.is_empty() {
        return Err(NnError::Shape("empty batch".into()));
    }
    let mut grads = Gradients::zeros_like(params);
    let mut mean_activations: Vec<Vec<f64>> = config.layer_sizes.iter().map(|&n| vec![0.0; n]).collect();
    let mut total_loss = 0.0;
    let mut outputs = Vec::with_capacity(batch.len());
    for (x, t) in batch.inputs.iter().zip(batch.targets) {
        let trace = forward(params, x, config)?;
        total_loss += loss(config.task, trace.output(), t)?;
        let g = backward(params, &trace, t, config)?;
        for (acc, a) in mean_activations.iter_mut().zip(&trace.activations) {
            add_into(acc, a);
        }
        for ((acc, gl), (dacc, d)) in grads
            .layers
            .iter_mut()
            .zip(&g.layers)
            .zip(grads.deltas.iter_mut().zip(&g.deltas))
        {
            add_into(acc.weights.as_mut_slice(), gl.weights.as_slice());
            add_into(&mut acc.biases, &gl.biases);
            add_into(dacc, d);
        }
        outputs.push(trace.output().to_vec());
    }
    let n = batch.len() as f64;
    for a in &mut mean_activations {
        scale_in_place(a, n);
    }
    for (gl, d) in grads.layers.iter_mut().zip(grads.deltas.iter_mut()) {
        scale_in_place(gl.weights.as_mut_slice(), n);
        scale_in_place(&mut gl.biases, n);
        scale_in_place(d, n);
    }
    let accuracy = match config.task {
        TaskKind::Classification => Some(accuracy(&outputs, batch.targets, config.task)?),
        TaskKind::Regression => None,
    };
    Ok(BatchPass {
        loss: total_loss / n,
        accuracy,
        mean_activations,
        gradients: grads,
        outputs,
    })
}

/// Mean loss (and accuracy for classification) of `params` over a batch,
/// without computing gradients.
pub fn evaluate(params: &NetworkParams, batch: Batch<'_>, config: &NetworkConfig) -> Result<(f64, Option<f64>)> {
    if batch.is_empty() {
        return Err(NnError::Shape("empty batch".into()));
    }
    let mut total = 0.0;
    let mut outputs = Vec::with_capacity(batch.len());
    for (x, t) in batch.inputs.iter().zip(batch.targets) {
        let trace = forward(params, x, config)?;
        total += loss(config.task, trace.output(), t)?;
        outputs.push(trace.activations.last().cloned().unwrap_or_default());
    }
    let acc = match config.task {
        TaskKind::Classification => Some(accuracy(&outputs, batch.targets, config.task)?),
        TaskKind::Regression => None,
    };
    Ok((total / batch.len() as f64, acc))
}
