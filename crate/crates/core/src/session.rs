//! A live training session: status machine, event-by-event execution,
//! prediction with the current weights, per-neuron equations and the
//! network information panel.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, DatasetSchema, NormStat};
use crate::nn::{self, ActivationKind, Metrics, NetworkConfig, NetworkParams, NnError, TaskKind};
use crate::trace::{self, EdgeLayer, EventKind, TraceError, TrainingEvent};

pub const MAX_HIDDEN_LAYERS: usize = 6;
pub const MAX_NEURONS: usize = 32;
pub const MAX_LEARNING_RATE: f64 = 10.0;
pub const MAX_EPOCHS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SessionStatus {
    Idle,
    Running,
    Paused,
    Completed,
    Stopped,
}

impl SessionStatus {
    pub const ALL: [SessionStatus; 5] = [
        SessionStatus::Idle,
        SessionStatus::Running,
        SessionStatus::Paused,
        SessionStatus::Completed,
        SessionStatus::Stopped,
    ];

    pub fn is_terminal(self) -> bool {
        matches!(self, SessionStatus::Completed | SessionStatus::Stopped)
    }
}

impl fmt::Display for SessionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Command {
    Play,
    Pause,
    Stop,
}

impl Command {
    pub const ALL: [Command; 3] = [Command::Play, Command::Pause, Command::Stop];
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The user-command transition table. `None` means the command is illegal in
/// that status. Running → Completed happens only through [`Session::advance`].
pub fn transition(status: SessionStatus, command: Command) -> Option<SessionStatus> {
    use Command::*;
    use SessionStatus::*;
    match (status, command) {
        (Idle, Play) | (Paused, Play) => Some(Running),
        (Running, Pause) => Some(Paused),
        (Running, Stop) | (Paused, Stop) => Some(Stopped),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigViolation {
    pub field: String,
    pub message: String,
}

impl ConfigViolation {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_owned(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid configuration: {}", join(.0))]
    Config(Vec<ConfigViolation>),
    #[error("cannot {command} a session that is {status}")]
    IllegalTransition { status: SessionStatus, command: Command },
    #[error("session is {status}, not Running")]
    NotRunning { status: SessionStatus },
    #[error("architecture cannot change while the session is {status}")]
    TopologyLocked { status: SessionStatus },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("event limit of {limit} reached")]
    EventLimit { limit: u64 },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

fn join(v: &[ConfigViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl From<NnError> for SessionError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::Shape(m) => SessionError::Shape(m),
            other => SessionError::Trace(TraceError::Nn(other)),
        }
    }
}

pub type Result<T> = std::result::Result<T, SessionError>;

/// Full layer list for `dataset`: feature count, the given hidden sizes, then
/// one output per class (classification) or a single output (regression).
pub fn config_for_dataset(
    dataset: &Dataset,
    hidden: &[usize],
    activation: ActivationKind,
    learning_rate: f64,
    epochs: u32,
    seed: u64,
) -> NetworkConfig {
    let outputs = match dataset.task() {
        TaskKind::Classification => dataset.schema.class_labels.len(),
        TaskKind::Regression => 1,
    };
    let mut layer_sizes = Vec::with_capacity(hidden.len() + 2);
    layer_sizes.push(dataset.feature_count());
    layer_sizes.extend_from_slice(hidden);
    layer_sizes.push(outputs);
    NetworkConfig {
        layer_sizes,
        activation,
        learning_rate,
        epochs,
        task: dataset.task(),
        seed,
    }
}

/// Check a configuration against a dataset and the interface bounds.
pub fn validate_config(dataset: &Dataset, config: &NetworkConfig) -> std::result::Result<(), Vec<ConfigViolation>> {
    let mut v = Vec::new();
    let sizes = &config.layer_sizes;
    if sizes.len() < 2 {
        v.push(ConfigViolation::new(
            "layer_sizes",
            "needs at least an input and an output size",
        ));
    } else {
        let hidden = &sizes[1..sizes.len() - 1];
        if hidden.len() > MAX_HIDDEN_LAYERS {
            v.push(ConfigViolation::new(
                "layer_sizes",
                format!("{} hidden layers, at most {MAX_HIDDEN_LAYERS} allowed", hidden.len()),
            ));
        }
        for (i, &n) in hidden.iter().enumerate() {
            if !(1..=MAX_NEURONS).contains(&n) {
                v.push(ConfigViolation::new(
                    "layer_sizes",
                    format!("hidden layer {} has {n} neurons, allowed 1..={MAX_NEURONS}", i + 1),
                ));
            }
        }
        if sizes[0] != dataset.feature_count() {
            v.push(ConfigViolation::new(
                "layer_sizes",
                format!(
                    "input size {} ≠ feature count {}",
                    sizes[0],
                    dataset.feature_count()
                ),
            ));
        }
        let out = sizes[sizes.len() - 1];
        match dataset.task() {
            TaskKind::Regression if out != 1 => v.push(ConfigViolation::new(
                "layer_sizes",
                format!("regression requires output size 1, got {out}"),
            )),
            TaskKind::Classification if out != dataset.schema.class_labels.len() => {
                v.push(ConfigViolation::new(
                    "layer_sizes",
                    format!(
                        "output size {out} ≠ class count {}",
                        dataset.schema.class_labels.len()
                    ),
                ))
            }
            _ => {}
        }
    }
    if config.task != dataset.task() {
        v.push(ConfigViolation::new(
            "task",
            format!("dataset is a {} task, config says {}", dataset.task(), config.task),
        ));
    }
    if !(config.learning_rate > 0.0 && config.learning_rate <= MAX_LEARNING_RATE) {
        v.push(ConfigViolation::new(
            "learning_rate",
            format!("{} is outside (0, {MAX_LEARNING_RATE}]", config.learning_rate),
        ));
    }
    if !(1..=MAX_EPOCHS).contains(&config.epochs) {
        v.push(ConfigViolation::new(
            "epochs",
            format!("{} is outside [1, {MAX_EPOCHS}]", config.epochs),
        ));
    }
    if dataset.train.is_empty() {
        v.push(ConfigViolation::new("dataset", "training split is empty"));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: u32,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub task: TaskKind,
    /// Raw network output (probabilities, or the scaled regression value).
    pub outputs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_index: Option<usize>,
    /// Regression output mapped back to target units.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// Weighted-sum expression of one neuron with its current coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronEquation {
    pub neuron_label: String,
    pub terms: Vec<(f64, String)>,
    pub bias: f64,
    pub wrapper: Option<String>,
    pub rendered: String,
}

fn coefficient(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

impl NeuronEquation {
    pub fn new(neuron_label: String, terms: Vec<(f64, String)>, bias: f64, wrapper: Option<String>) -> Self {
        let mut sum: Vec<String> = terms
            .iter()
            .map(|(w, input)| format!("{}·{input}", coefficient(*w)))
            .collect();
        sum.push(coefficient(bias));
        let sum = sum.join(" + ");
        let rendered = match &wrapper {
            Some(f) => format!("{neuron_label} = {f}({sum})"),
            None => format!("{neuron_label} = {sum}"),
        };
        Self {
            neuron_label,
            terms,
            bias,
            wrapper,
            rendered,
        }
    }
}

/// Parsed form of a rendered equation: label, wrapper, terms, bias.
pub type ParsedEquation = (String, Option<String>, Vec<(f64, String)>, f64);

/// Inverse of the rendering at its 2-decimal precision.
pub fn parse_equation(rendered: &str) -> Option<ParsedEquation> {
    let (label, rhs) = rendered.split_once(" = ")?;
    let (wrapper, body) = match rhs.find('(') {
        Some(open) if rhs.ends_with(')') => (Some(rhs[..open].to_owned()), &rhs[open + 1..rhs.len() - 1]),
        _ => (None, rhs),
    };
    let mut parts: Vec<&str> = body.split(" + ").collect();
    let bias = parts.pop()?.parse().ok()?;
    let terms = parts
        .into_iter()
        .map(|p| {
            let (w, input) = p.split_once('·')?;
            Some((w.parse().ok()?, input.to_owned()))
        })
        .collect::<Option<Vec<_>>>()?;
    Some((label.to_owned(), wrapper, terms, bias))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub samples: usize,
    pub train_samples: usize,
    pub val_samples: usize,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub task: TaskKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub class_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureInfo {
    pub layer_sizes: Vec<usize>,
    pub hidden_layers: usize,
    pub hidden_activation: ActivationKind,
    pub output_activation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub status: SessionStatus,
    pub current_epoch: u32,
    pub total_epochs: u32,
    pub events_emitted: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latest: Option<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    pub epochs: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    pub parameter_count: usize,
    pub mean_abs_weight: f64,
    pub max_abs_weight: f64,
}

/// The "Network Information" panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInfo {
    pub dataset: DatasetInfo,
    pub architecture: ArchitectureInfo,
    pub training: TrainingInfo,
    pub hyperparameters: Hyperparameters,
    pub model: ModelStats,
    pub current_epoch: u32,
}

/// Trained network plus the dataset statistics needed to run it on raw
/// inputs; the file format of saved models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub dataset_name: String,
    pub schema: DatasetSchema,
    pub norm_stats: Vec<NormStat>,
    pub target_stats: Option<NormStat>,
    pub config: NetworkConfig,
    pub params: NetworkParams,
    pub epochs_trained: u32,
}

impl ModelState {
    pub fn predict(&self, raw_inputs: &[f64]) -> Result<Prediction> {
        predict_raw(
            &self.schema,
            &self.norm_stats,
            self.target_stats,
            &self.config,
            &self.params,
            raw_inputs,
        )
    }

    /// Reject states whose pieces disagree (hand-edited or corrupt files).
    pub fn check(&self) -> Result<()> {
        self.config.validate()?;
        self.params.check_against(&self.config)?;
        let d = self.schema.feature_names.len();
        if self.norm_stats.len() != d || self.config.input_size() != d {
            return Err(SessionError::Shape(format!(
                "model has {d} features but {} normalization stats and input size {}",
                self.norm_stats.len(),
                self.config.input_size()
            )));
        }
        Ok(())
    }
}

fn predict_raw(
    schema: &DatasetSchema,
    norm_stats: &[NormStat],
    target_stats: Option<NormStat>,
    config: &NetworkConfig,
    params: &NetworkParams,
    raw_inputs: &[f64],
) -> Result<Prediction> {
    let d = schema.feature_names.len();
    if raw_inputs.len() != d {
        return Err(SessionError::Shape(format!(
            "expected {d} inputs, got {}",
            raw_inputs.len()
        )));
    }
    if let Some(i) = raw_inputs.iter().position(|v| !v.is_finite()) {
        return Err(SessionError::Input(format!(
            "input {} (`{}`) is not a finite number",
            i, schema.feature_names[i]
        )));
    }
    let x: Vec<f64> = raw_inputs.iter().zip(norm_stats).map(|(&v, s)| s.apply(v)).collect();
    let out = nn::forward(params, &x, config)?.output().to_vec();
    Ok(match config.task {
        TaskKind::Classification => {
            let k = nn::argmax(&out);
            Prediction {
                task: TaskKind::Classification,
                label: schema.class_labels.get(k).cloned(),
                class_index: Some(k),
                value: None,
                outputs: out,
            }
        }
        TaskKind::Regression => Prediction {
            task: TaskKind::Regression,
            value: Some(target_stats.map_or(out[0], |s| s.invert(out[0]))),
            label: None,
            class_index: None,
            outputs: out,
        },
    })
}

/// Complete state a late subscriber needs before following live events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub status: SessionStatus,
    pub current_epoch: u32,
    /// seq of the next event; everything before it is reflected here.
    pub next_seq: u64,
    pub config: NetworkConfig,
    pub params: NetworkParams,
    pub history: Vec<EpochMetrics>,
    pub edges: Vec<EdgeLayer>,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    config: NetworkConfig,
    dataset: Arc<Dataset>,
    params: NetworkParams,
    status: SessionStatus,
    current_epoch: u32,
    history: Vec<EpochMetrics>,
    next_seq: u64,
    /// Remaining events of the epoch in progress.
    pending: VecDeque<TrainingEvent>,
    event_limit: Option<u64>,
}

impl Session {
    /// Validate `config` against `dataset` and initialize parameters from
    /// `config.seed`. The dataset should already carry its train/validation split.
    pub fn create(dataset: Arc<Dataset>, config: NetworkConfig) -> Result<Self> {
        Self::with_id(uuid::Uuid::new_v4().to_string(), dataset, config)
    }

    pub fn with_id(id: String, dataset: Arc<Dataset>, config: NetworkConfig) -> Result<Self> {
        validate_config(&dataset, &config).map_err(SessionError::Config)?;
        let params = nn::init_params(&config, config.seed)?;
        Ok(Self {
            id,
            config,
            dataset,
            params,
            status: SessionStatus::Idle,
            current_epoch: 0,
            history: Vec::new(),
            next_seq: 0,
            pending: VecDeque::new(),
            event_limit: None,
        })
    }

    /// Refuse to start an epoch whose events would push the trace past `limit`.
    pub fn with_event_limit(mut self, limit: u64) -> Self {
        self.event_limit = Some(limit);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    /// Current parameters. Inside an epoch, layers whose update has already
    /// been emitted hold their post-update values.
    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn current_epoch(&self) -> u32 {
        self.current_epoch
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    pub fn metrics_history(&self) -> &[EpochMetrics] {
        &self.history
    }

    /// True between an epoch's first and last event.
    pub fn mid_epoch(&self) -> bool {
        !self.pending.is_empty()
    }

    pub fn control(&mut self, command: Command) -> Result<SessionStatus> {
        let next = transition(self.status, command).ok_or(SessionError::IllegalTransition {
            status: self.status,
            command,
        })?;
        self.status = next;
        Ok(next)
    }

    /// Replace the configuration. Only allowed before training starts or after
    /// Stop; the session restarts at epoch 0 with a fresh trace.
    pub fn reconfigure(&mut self, config: NetworkConfig) -> Result<()> {
        if !matches!(self.status, SessionStatus::Idle | SessionStatus::Stopped) {
            return Err(SessionError::TopologyLocked {
                status: self.status,
            });
        }
        let fresh = Self::with_id(self.id.clone(), Arc::clone(&self.dataset), config)?;
        let limit = self.event_limit;
        *self = fresh;
        self.event_limit = limit;
        Ok(())
    }

    /// Emit the next event of the current epoch.
    pub fn advance(&mut self) -> Result<TrainingEvent> {
        if self.status != SessionStatus::Running {
            return Err(SessionError::NotRunning {
                status: self.status,
            });
        }
        if self.pending.is_empty() {
            let needed = trace::events_per_epoch(self.config.depth()) as u64;
            if let Some(limit) = self.event_limit {
                if self.next_seq + needed > limit {
                    return Err(SessionError::EventLimit { limit });
                }
            }
            let val = (!self.dataset.val.is_empty()).then(|| self.dataset.val.batch());
            let run = trace::run_epoch(
                &self.params,
                &self.config,
                self.dataset.train.batch(),
                val,
                self.current_epoch,
                self.next_seq,
            )?;
            self.pending = run.events.into();
        }
        let event = self.pending.pop_front().expect("epoch has events");
        match &event.kind {
            EventKind::WeightsUpdated {
                layer, w_post, b_post, ..
            } => {
                let l = &mut self.params.layers[*layer as usize - 1];
                l.weights = w_post.clone();
                l.biases = b_post.clone();
            }
            EventKind::EpochEnd { metrics } => {
                self.history.push(EpochMetrics {
                    epoch: event.epoch,
                    metrics: metrics.clone(),
                });
                self.current_epoch += 1;
                if self.current_epoch >= self.config.epochs {
                    self.status = SessionStatus::Completed;
                }
            }
            _ => {}
        }
        self.next_seq += 1;
        Ok(event)
    }

    /// Advance until the session leaves Running, collecting every event.
    pub fn run_to_end(&mut self) -> Result<Vec<TrainingEvent>> {
        let mut events = Vec::new();
        while self.status == SessionStatus::Running {
            events.push(self.advance()?);
        }
        Ok(events)
    }

    /// Inference on raw (unnormalized) feature values with the current weights.
    pub fn predict(&self, raw_inputs: &[f64]) -> Result<Prediction> {
        predict_raw(
            &self.dataset.schema,
            &self.dataset.norm_stats,
            self.dataset.target_stats,
            &self.config,
            &self.params,
            raw_inputs,
        )
    }

    /// Detached copy of everything inference needs.
    pub fn model_state(&self) -> ModelState {
        ModelState {
            dataset_name: self.dataset.name.clone(),
            schema: self.dataset.schema.clone(),
            norm_stats: self.dataset.norm_stats.clone(),
            target_stats: self.dataset.target_stats,
            config: self.config.clone(),
            params: self.params.clone(),
            epochs_trained: self.current_epoch,
        }
    }

    /// Display label of neuron `index` (0-based) in `layer` (0 = inputs).
    pub fn neuron_label(&self, layer: usize, index: usize) -> String {
        let depth = self.config.depth();
        if layer == 0 {
            self.dataset
                .schema
                .feature_names
                .get(index)
                .cloned()
                .unwrap_or_else(|| format!("x{}", index + 1))
        } else if layer == depth {
            format!("o{}", index + 1)
        } else if depth == 2 {
            format!("h{}", index + 1)
        } else {
            format!("h{layer}_{}", index + 1)
        }
    }

    /// Current weighted-sum equation of neuron `index` (0-based) in weight layer `layer` (≥ 1).
    pub fn neuron_equation(&self, layer: usize, index: usize) -> Result<NeuronEquation> {
        let depth = self.config.depth();
        if layer == 0 || layer > depth {
            return Err(SessionError::Shape(format!(
                "layer {layer} has no equation (valid layers: 1..={depth})"
            )));
        }
        let p = &self.params.layers[layer - 1];
        if index >= p.fan_out() {
            return Err(SessionError::Shape(format!(
                "layer {layer} has {} neurons, index {index} is out of range",
                p.fan_out()
            )));
        }
        let terms = p
            .weights
            .row(index)
            .iter()
            .enumerate()
            .map(|(i, &w)| (w, self.neuron_label(layer - 1, i)))
            .collect();
        let wrapper = if layer < depth {
            Some(self.config.activation.name().to_owned())
        } else {
            match self.config.task {
                TaskKind::Classification => Some("softmax".to_owned()),
                TaskKind::Regression => None,
            }
        };
        Ok(NeuronEquation::new(
            self.neuron_label(layer, index),
            terms,
            p.biases[index],
            wrapper,
        ))
    }

    pub fn network_info(&self) -> NetworkInfo {
        let ds = &self.dataset;
        let weights: Vec<f64> = self
            .params
            .layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().map(|w| w.abs()))
            .collect();
        let sizes = &self.config.layer_sizes;
        NetworkInfo {
            dataset: DatasetInfo {
                name: ds.name.clone(),
                samples: ds.len(),
                train_samples: ds.train.len(),
                val_samples: ds.val.len(),
                feature_names: ds.schema.feature_names.clone(),
                target_name: ds.schema.target_name.clone(),
                task: ds.task(),
                class_labels: ds.schema.class_labels.clone(),
            },
            architecture: ArchitectureInfo {
                layer_sizes: sizes.clone(),
                hidden_layers: sizes.len().saturating_sub(2),
                hidden_activation: self.config.activation,
                output_activation: match self.config.task {
                    TaskKind::Classification => "softmax",
                    TaskKind::Regression => "identity",
                }
                .to_owned(),
            },
            training: TrainingInfo {
                status: self.status,
                current_epoch: self.current_epoch,
                total_epochs: self.config.epochs,
                events_emitted: self.next_seq,
                latest: self.history.last().map(|h| h.metrics.clone()),
            },
            hyperparameters: Hyperparameters {
                learning_rate: self.config.learning_rate,
                epochs: self.config.epochs,
                seed: self.config.seed,
            },
            model: ModelStats {
                parameter_count: self.params.parameter_count(),
                mean_abs_weight: if weights.is_empty() {
                    0.0
                } else {
                    weights.iter().sum::<f64>() / weights.len() as f64
                },
                max_abs_weight: weights.iter().copied().fold(0.0, f64::max),
            },
            current_epoch: self.current_epoch,
        }
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            session_id: self.id.clone(),
            status: self.status,
            current_epoch: self.current_epoch,
            next_seq: self.next_seq,
            config: self.config.clone(),
            params: self.params.clone(),
            history: self.history.clone(),
            edges: trace::edge_render_weights(&self.params),
        }
    }
}
