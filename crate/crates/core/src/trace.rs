//! Training events and the traced epoch.
//!
//! One epoch with `L` weight layers always produces, in order:
//!
//! ```text
//! EPOCH_START
//! (FORWARD_PULSE l-1→l, ACTIVATIONS_COMPUTED l)      for l = 1..L
//! OUTPUT_PRODUCED, LOSS_COMPUTED
//! (BACKWARD_PULSE into l, WEIGHTS_UPDATED l)          for l = L..1
//! EPOCH_END
//! ```
//!
//! so a layer's parameters change only after the backward signal reached it.
//! Events are serialized one JSON object per line; see `docs/protocol.md`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nn::{self, Batch, Layer, Matrix, Metrics, NetworkConfig, NetworkParams, NnError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingEvent {
    pub seq: u64,
    pub epoch: u32,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    EpochStart,
    ForwardPulse {
        from_layer: u32,
        to_layer: u32,
        /// Weights the pulse travels along, row = destination neuron.
        edge_weights: Matrix,
    },
    /// Batch-mean activation per neuron.
    ActivationsComputed {
        layer: u32,
        #[serde(deserialize_with = "nn::nullable::vec")]
        values: Vec<f64>,
    },
    /// Batch-mean network output.
    OutputProduced {
        #[serde(deserialize_with = "nn::nullable::vec")]
        values: Vec<f64>,
    },
    LossComputed {
        #[serde(deserialize_with = "nn::nullable::f64")]
        loss: f64,
    },
    /// Batch-mean error signal arriving at `into_layer`.
    BackwardPulse {
        into_layer: u32,
        #[serde(deserialize_with = "nn::nullable::vec")]
        deltas: Vec<f64>,
    },
    WeightsUpdated {
        layer: u32,
        #[serde(deserialize_with = "nn::nullable::f64")]
        learning_rate: f64,
        w_pre: Matrix,
        w_post: Matrix,
        #[serde(deserialize_with = "nn::nullable::vec")]
        b_pre: Vec<f64>,
        #[serde(deserialize_with = "nn::nullable::vec")]
        b_post: Vec<f64>,
        grad_w: Matrix,
        #[serde(deserialize_with = "nn::nullable::vec")]
        grad_b: Vec<f64>,
    },
    EpochEnd { metrics: Metrics },
}

impl EventKind {
    pub fn tag(&self) -> &'static str {
        match self {
            EventKind::EpochStart => "EPOCH_START",
            EventKind::ForwardPulse { .. } => "FORWARD_PULSE",
            EventKind::ActivationsComputed { .. } => "ACTIVATIONS_COMPUTED",
            EventKind::OutputProduced { .. } => "OUTPUT_PRODUCED",
            EventKind::LossComputed { .. } => "LOSS_COMPUTED",
            EventKind::BackwardPulse { .. } => "BACKWARD_PULSE",
            EventKind::WeightsUpdated { .. } => "WEIGHTS_UPDATED",
            EventKind::EpochEnd { .. } => "EPOCH_END",
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("training split is empty")]
    EmptyTraining,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Number of events in one epoch of a network with `depth` weight layers.
pub fn events_per_epoch(depth: usize) -> usize {
    4 * depth + 4
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRun {
    pub params: NetworkParams,
    pub events: Vec<TrainingEvent>,
    pub metrics: Metrics,
}

/// Run one full-batch epoch and record it as events numbered from `first_seq`.
///
/// Train loss and accuracy come from this epoch's forward phase, i.e. they
/// describe the parameters before the update; validation metrics use the
/// same pre-update parameters.
pub fn run_epoch(
    params: &NetworkParams,
    config: &NetworkConfig,
    train: Batch<'_>,
    val: Option<Batch<'_>>,
    epoch: u32,
    first_seq: u64,
) -> Result<EpochRun, TraceError> {
    if train.is_empty() {
        return Err(TraceError::EmptyTraining);
    }
    params.check_against(config)?;
    let pass = nn::batch_pass(params, train, config)?;
    let (val_loss, val_accuracy) = match val.filter(|v| !v.is_empty()) {
        Some(v) => {
            let (l, a) = nn::evaluate(params, v, config)?;
            (Some(l), a)
        }
        None => (None, None),
    };
    let metrics = Metrics {
        loss: pass.loss,
        accuracy: pass.accuracy,
        val_loss,
        val_accuracy,
    };

    let depth = params.layers.len();
    let mut events = Vec::with_capacity(events_per_epoch(depth));
    let mut seq = first_seq;
    let mut push = |kind: EventKind| {
        events.push(TrainingEvent { seq, epoch, kind });
        seq += 1;
    };

    push(EventKind::EpochStart);
    for l in 1..=depth {
        push(EventKind::ForwardPulse {
            from_layer: (l - 1) as u32,
            to_layer: l as u32,
            edge_weights: params.layers[l - 1].weights.clone(),
        });
        push(EventKind::ActivationsComputed {
            layer: l as u32,
            values: pass.mean_activations[l].clone(),
        });
    }
    push(EventKind::OutputProduced {
        values: pass.mean_activations[depth].clone(),
    });
    push(EventKind::LossComputed { loss: pass.loss });

    let mut layers: Vec<Option<Layer>> = vec![None; depth];
    for l in (1..=depth).rev() {
        let pre = &params.layers[l - 1];
        let grad = &pass.gradients.layers[l - 1];
        push(EventKind::BackwardPulse {
            into_layer: l as u32,
            deltas: pass.gradients.deltas[l - 1].clone(),
        });
        let post = nn::sgd_layer(pre, grad, config.learning_rate)?;
        push(EventKind::WeightsUpdated {
            layer: l as u32,
            learning_rate: config.learning_rate,
            w_pre: pre.weights.clone(),
            w_post: post.weights.clone(),
            b_pre: pre.biases.clone(),
            b_post: post.biases.clone(),
            grad_w: grad.weights.clone(),
            grad_b: grad.biases.clone(),
        });
        layers[l - 1] = Some(post);
    }
    push(EventKind::EpochEnd {
        metrics: metrics.clone(),
    });

    Ok(EpochRun {
        params: NetworkParams {
            layers: layers.into_iter().map(|l| l.expect("every layer updated")).collect(),
        },
        events,
        metrics,
    })
}

/// Which trace rule an event broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// seq numbers start at 0 and increase by exactly one.
    SeqOrder,
    /// Epoch numbers start at 0, are constant within an epoch and increase by one.
    EpochOrder,
    /// Event types must follow the epoch grammar.
    Grammar,
    /// A layer's update must come after the backward pulse into that layer.
    UpdateTiming,
    /// `w_post = w_pre − lr · grad`, bit for bit.
    UpdateAlgebra,
    /// Snapshots must chain: pulse weights equal the last posted weights.
    SnapshotContinuity,
    /// Recomputing from snapshots and data must reproduce the payloads.
    Replay,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::SeqOrder => "seq-order",
            Rule::EpochOrder => "epoch-order",
            Rule::Grammar => "grammar",
            Rule::UpdateTiming => "update-timing",
            Rule::UpdateAlgebra => "update-algebra",
            Rule::SnapshotContinuity => "snapshot-continuity",
            Rule::Replay => "replay",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("seq {seq}: {rule} violated: {detail}")]
pub struct Violation {
    pub seq: u64,
    pub rule: Rule,
    pub detail: String,
}


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Expect {
    EpochStart,
    Forward(usize),
    Activations(usize),
    Output,
    Loss,
    Backward(usize),
    Update(usize),
    EpochEnd,
}

/// Incremental checker for the trace rules. Feed events in order with
/// [`TraceValidator::push`], then call [`TraceValidator::finish`].
#[derive(Debug)]
pub struct TraceValidator {
    next_seq: u64,
    epoch: Option<u32>,
    expect: Expect,
    depth: Option<usize>,
    /// Last posted parameters per layer, index `l - 1`.
    posted: Vec<Option<Layer>>,
    /// Weights carried by this epoch's forward pulses.
    pulsed: Vec<Option<Matrix>>,
    /// Error signal that reached each layer during this epoch.
    arrived: Vec<Option<Vec<f64>>>,
    last_seq: Option<u64>,
}

impl Default for TraceValidator {
    fn default() -> Self {
        Self {
            next_seq: 0,
            epoch: None,
            expect: Expect::EpochStart,
            depth: None,
            posted: Vec::new(),
            pulsed: Vec::new(),
            arrived: Vec::new(),
            last_seq: None,
        }
    }
}

fn slot<T>(v: &mut Vec<Option<T>>, l: usize) -> &mut Option<T> {
    while v.len() < l {
        v.push(None);
    }
    &mut v[l - 1]
}

fn violation<T>(seq: u64, rule: Rule, detail: impl Into<String>) -> Result<T, Violation> {
    Err(Violation {
        seq,
        rule,
        detail: detail.into(),
    })
}

fn bits_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

impl TraceValidator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ev: &TrainingEvent) -> Result<(), Violation> {
        let seq = ev.seq;
        if seq != self.next_seq {
            return violation(seq, Rule::SeqOrder, format!("expected seq {}", self.next_seq));
        }
        self.next_seq += 1;
        self.last_seq = Some(seq);

        if self.expect == Expect::EpochStart {
            let want = self.epoch.map_or(0, |e| e + 1);
            if ev.epoch != want {
                return violation(
                    seq,
                    Rule::EpochOrder,
                    format!("expected epoch {want}, found {}", ev.epoch),
                );
            }
        } else if Some(ev.epoch) != self.epoch {
            return violation(
                seq,
                Rule::EpochOrder,
                format!("epoch {} appears inside epoch {}", ev.epoch, self.epoch.unwrap_or(0)),
            );
        }

        self.expect = self.step(ev)?;
        Ok(())
    }

    fn step(&mut self, ev: &TrainingEvent) -> Result<Expect, Violation> {
        let seq = ev.seq;
        let grammar = |want: String| -> Result<Expect, Violation> {
            violation(seq, Rule::Grammar, format!("expected {want}, found {}", ev.kind.tag()))
        };
        match (&ev.kind, self.expect) {
            (EventKind::EpochStart, Expect::EpochStart) => {
                self.epoch = Some(ev.epoch);
                self.pulsed.clear();
                self.arrived.clear();
                Ok(Expect::Forward(1))
            }
            (
                EventKind::ForwardPulse {
                    from_layer,
                    to_layer,
                    edge_weights,
                },
                Expect::Forward(l),
            ) => {
                if *to_layer as usize != l || *from_layer as usize + 1 != l {
                    return grammar(format!("FORWARD_PULSE {}→{l}", l - 1));
                }
                if let Some(Some(prev)) = self.posted.get(l - 1) {
                    if &prev.weights != edge_weights {
                        return violation(
                            seq,
                            Rule::SnapshotContinuity,
                            format!("layer {l} pulse weights differ from the last posted weights"),
                        );
                    }
                }
                *slot(&mut self.pulsed, l) = Some(edge_weights.clone());
                Ok(Expect::Activations(l))
            }
            (EventKind::ActivationsComputed { layer, values }, Expect::Activations(l)) => {
                if *layer as usize != l {
                    return grammar(format!("ACTIVATIONS_COMPUTED for layer {l}"));
                }
                let width = self.pulsed[l - 1].as_ref().map_or(0, Matrix::rows);
                if values.len() != width {
                    return grammar(format!("{width} activation values for layer {l}"));
                }
                Ok(match self.depth {
                    Some(d) if l == d => Expect::Output,
                    _ => Expect::Forward(l + 1),
                })
            }
            (EventKind::OutputProduced { values }, Expect::Forward(l)) if self.depth.is_none() && l > 1 => {
                self.depth = Some(l - 1);
                self.check_output(seq, values)?;
                Ok(Expect::Loss)
            }
            (EventKind::OutputProduced { values }, Expect::Output) => {
                self.check_output(seq, values)?;
                Ok(Expect::Loss)
            }
            (EventKind::LossComputed { loss }, Expect::Loss) => {
                if !(loss.is_finite() && *loss >= 0.0) {
                    return grammar("a finite, nonnegative loss".into());
                }
                Ok(Expect::Backward(self.depth.expect("known once output was produced")))
            }
            (EventKind::BackwardPulse { into_layer, deltas }, Expect::Backward(l)) => {
                if *into_layer as usize != l {
                    return grammar(format!("BACKWARD_PULSE into layer {l}"));
                }
                let width = self.pulsed[l - 1].as_ref().map_or(0, Matrix::rows);
                if deltas.len() != width {
                    return grammar(format!("{width} error values for layer {l}"));
                }
                *slot(&mut self.arrived, l) = Some(deltas.clone());
                Ok(Expect::Update(l))
            }
            (EventKind::WeightsUpdated { layer, .. }, expect)
                if matches!(expect, Expect::Backward(_) | Expect::Update(_))
                    && *layer >= 1
                    && self.arrived.get(*layer as usize - 1).and_then(Option::as_ref).is_none() =>
            {
                violation(
                    seq,
                    Rule::UpdateTiming,
                    format!("layer {layer} updated before the backward pulse reached it"),
                )
            }
            (
                EventKind::WeightsUpdated {
                    layer,
                    learning_rate,
                    w_pre,
                    w_post,
                    b_pre,
                    b_post,
                    grad_w,
                    grad_b,
                },
                Expect::Update(l),
            ) => {
                if *layer as usize != l {
                    return grammar(format!("WEIGHTS_UPDATED for layer {l}"));
                }
                let pulsed = self.pulsed[l - 1].as_ref().expect("pulse recorded before update");
                if w_pre != pulsed {
                    return violation(
                        seq,
                        Rule::SnapshotContinuity,
                        format!("layer {l} w_pre differs from the weights pulsed this epoch"),
                    );
                }
                if let Some(Some(prev)) = self.posted.get(l - 1) {
                    if &prev.biases != b_pre {
                        return violation(
                            seq,
                            Rule::SnapshotContinuity,
                            format!("layer {l} b_pre differs from the last posted biases"),
                        );
                    }
                }
                let arrived = self.arrived[l - 1].as_ref().expect("checked above");
                if !bits_equal(arrived, grad_b) {
                    return violation(
                        seq,
                        Rule::UpdateAlgebra,
                        format!("layer {l} bias gradient differs from the error signal that arrived"),
                    );
                }
                check_update(seq, l, *learning_rate, w_pre, w_post, grad_w, b_pre, b_post, grad_b)?;
                *slot(&mut self.posted, l) = Some(Layer {
                    weights: w_post.clone(),
                    biases: b_post.clone(),
                });
                Ok(if l == 1 { Expect::EpochEnd } else { Expect::Backward(l - 1) })
            }
            (EventKind::EpochEnd { metrics }, Expect::EpochEnd) => {
                if !(metrics.loss.is_finite() && metrics.loss >= 0.0) {
                    return grammar("finite, nonnegative epoch loss".into());
                }
                Ok(Expect::EpochStart)
            }
            (_, expect) => grammar(describe(expect, self.depth)),
        }
    }

    fn check_output(&self, seq: u64, values: &[f64]) -> Result<(), Violation> {
        let d = self.depth.expect("set before output check");
        let width = self.pulsed[d - 1].as_ref().map_or(0, Matrix::rows);
        if values.len() != width {
            return violation(seq, Rule::Grammar, format!("expected {width} output values"));
        }
        Ok(())
    }

    /// The trace must not stop inside an epoch.
    pub fn finish(self) -> Result<(), Violation> {
        if self.expect != Expect::EpochStart {
            return violation(
                self.last_seq.unwrap_or(0),
                Rule::Grammar,
                format!("trace ends mid-epoch, expected {}", describe(self.expect, self.depth)),
            );
        }
        Ok(())
    }
}

fn describe(expect: Expect, depth: Option<usize>) -> String {
    match expect {
        Expect::EpochStart => "EPOCH_START".into(),
        Expect::Forward(l) if depth.is_none() && l > 1 => {
            format!("FORWARD_PULSE {}→{l} or OUTPUT_PRODUCED", l - 1)
        }
        Expect::Forward(l) => format!("FORWARD_PULSE {}→{l}", l - 1),
        Expect::Activations(l) => format!("ACTIVATIONS_COMPUTED for layer {l}"),
        Expect::Output => "OUTPUT_PRODUCED".into(),
        Expect::Loss => "LOSS_COMPUTED".into(),
        Expect::Backward(l) => format!("BACKWARD_PULSE into layer {l}"),
        Expect::Update(l) => format!("WEIGHTS_UPDATED for layer {l}"),
        Expect::EpochEnd => "EPOCH_END".into(),
    }
}

#[allow(clippy::too_many_arguments)]
fn check_update(
    seq: u64,
    layer: usize,
    lr: f64,
    w_pre: &Matrix,
    w_post: &Matrix,
    grad_w: &Matrix,
    b_pre: &[f64],
    b_post: &[f64],
    grad_b: &[f64],
) -> Result<(), Violation> {
    let algebra = |detail: String| violation(seq, Rule::UpdateAlgebra, detail);
    if !(lr.is_finite() && lr >= 0.0) {
        return algebra(format!("layer {layer} learning rate {lr} is not usable"));
    }
    if w_post.shape() != w_pre.shape() || grad_w.shape() != w_pre.shape() {
        return algebra(format!("layer {layer} weight snapshots disagree in shape"));
    }
    if b_post.len() != b_pre.len() || grad_b.len() != b_pre.len() {
        return algebra(format!("layer {layer} bias snapshots disagree in length"));
    }
    let cols = w_pre.cols().max(1);
    for (k, ((pre, post), g)) in w_pre
        .as_slice()
        .iter()
        .zip(w_post.as_slice())
        .zip(grad_w.as_slice())
        .enumerate()
    {
        let want = nn::sgd_step(*pre, *g, lr);
        if want.to_bits() != post.to_bits() {
            return algebra(format!(
                "layer {layer} w[{}][{}]: post {post} != pre {pre} - {lr}·{g} = {want}",
                k / cols,
                k % cols
            ));
        }
    }
    for (k, ((pre, post), g)) in b_pre.iter().zip(b_post).zip(grad_b).enumerate() {
        let want = nn::sgd_step(*pre, *g, lr);
        if want.to_bits() != post.to_bits() {
            return algebra(format!(
                "layer {layer} b[{k}]: post {post} != pre {pre} - {lr}·{g} = {want}"
            ));
        }
    }
    Ok(())
}

/// Check ordering, grammar, update timing, update algebra and snapshot
/// continuity. Returns the first violation.
pub fn validate_trace(events: &[TrainingEvent]) -> Result<(), Violation> {
    let mut v = TraceValidator::new();
    for ev in events {
        v.push(ev)?;
    }
    v.finish()
}

/// Data a trace can be replayed against.
#[derive(Debug, Clone, Copy)]
pub struct ReplayInput<'a> {
    pub config: &'a NetworkConfig,
    pub train: Batch<'a>,
    pub val: Option<Batch<'a>>,
}

/// Tolerance for replayed payloads.
pub const REPLAY_TOLERANCE: f64 = 1e-12;

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= REPLAY_TOLERANCE * x.abs().max(y.abs()).max(1.0))
}

fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => close(&[x], &[y]),
        (None, None) => true,
        _ => false,
    }
}

/// Recompute every epoch from the `w_pre`/`b_pre` snapshots it carries and
/// the data, and compare activations, outputs, loss, error signals, gradients,
/// posted weights and metrics against the recorded payloads. The trace should
/// already satisfy [`validate_trace`].
pub fn replay_trace(events: &[TrainingEvent], input: ReplayInput<'_>) -> Result<(), Violation> {
    let per_epoch = events_per_epoch(input.config.depth());
    if !events.len().is_multiple_of(per_epoch) {
        return violation(
            events.last().map_or(0, |e| e.seq),
            Rule::Replay,
            format!("trace length {} is not a whole number of {per_epoch}-event epochs", events.len()),
        );
    }
    for chunk in events.chunks(per_epoch) {
        replay_epoch(chunk, input)?;
    }
    Ok(())
}

fn replay_epoch(chunk: &[TrainingEvent], input: ReplayInput<'_>) -> Result<(), Violation> {
    let config = input.config;
    let depth = config.depth();
    let mut params = NetworkParams::zeros(&config.layer_sizes);
    for ev in chunk {
        if let EventKind::WeightsUpdated { layer, w_pre, b_pre, .. } = &ev.kind {
            let l = *layer as usize;
            if l == 0 || l > depth || w_pre.shape() != params.layers[l - 1].weights.shape() {
                return violation(ev.seq, Rule::Replay, format!("layer {l} does not fit the configuration"));
            }
            params.layers[l - 1] = Layer {
                weights: w_pre.clone(),
                biases: b_pre.clone(),
            };
        }
    }
    let first = &chunk[0];
    let run = run_epoch(&params, config, input.train, input.val, first.epoch, first.seq)
        .map_err(|e| Violation {
            seq: first.seq,
            rule: Rule::Replay,
            detail: format!("recomputation failed: {e}"),
        })?;
    for (got, want) in chunk.iter().zip(&run.events) {
        let mismatch = |what: &str| violation(got.seq, Rule::Replay, format!("{what} not reproduced"));
        match (&got.kind, &want.kind) {
            (
                EventKind::ActivationsComputed { values: a, .. },
                EventKind::ActivationsComputed { values: b, .. },
            )
            | (EventKind::OutputProduced { values: a }, EventKind::OutputProduced { values: b })
            | (EventKind::BackwardPulse { deltas: a, .. }, EventKind::BackwardPulse { deltas: b, .. }) => {
                if !close(a, b) {
                    return mismatch(got.kind.tag());
                }
            }
            (EventKind::LossComputed { loss: a }, EventKind::LossComputed { loss: b }) => {
                if !close(&[*a], &[*b]) {
                    return mismatch("loss");
                }
            }
            (
                EventKind::WeightsUpdated {
                    learning_rate: lr_a,
                    w_post: wa,
                    b_post: ba,
                    grad_w: ga,
                    grad_b: gba,
                    ..
                },
                EventKind::WeightsUpdated {
                    learning_rate: lr_b,
                    w_post: wb,
                    b_post: bb,
                    grad_w: gb,
                    grad_b: gbb,
                    ..
                },
            ) => {
                if lr_a != lr_b {
                    return mismatch("learning rate");
                }
                if !close(ga.as_slice(), gb.as_slice()) || !close(gba, gbb) {
                    return mismatch("gradient");
                }
                if !close(wa.as_slice(), wb.as_slice()) || !close(ba, bb) {
                    return mismatch("posted weights");
                }
            }
            (EventKind::EpochEnd { metrics: a }, EventKind::EpochEnd { metrics: b }) => {
                if !close(&[a.loss], &[b.loss])
                    || !close_opt(a.accuracy, b.accuracy)
                    || !close_opt(a.val_loss, b.val_loss)
                    || !close_opt(a.val_accuracy, b.val_accuracy)
                {
                    return mismatch("epoch metrics");
                }
            }
            (a, b) if a.tag() == b.tag() => {}
            _ => return mismatch("event order"),
        }
    }
    Ok(())
}

pub fn serialize_event(event: &TrainingEvent) -> String {
    serde_json::to_string(event).expect("events contain only finite numbers and plain strings")
}

pub fn deserialize_event(line: &str) -> Result<TrainingEvent, serde_json::Error> {
    serde_json::from_str(line)
}

pub fn write_trace<W: Write>(mut out: W, events: &[TrainingEvent]) -> std::io::Result<()> {
    for ev in events {
        out.write_all(serialize_event(ev).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Read a line-delimited trace. Line numbers in errors are 1-based.
pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TrainingEvent>, TraceError> {
    let mut events = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let ev = deserialize_event(&line).map_err(|e| TraceError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        events.push(ev);
    }
    Ok(events)
}

/// Per-edge magnitude scaled into [0, 1] plus sign, for weight-based edge thickness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLayer {
    /// `|w| / max |w|` over every edge of the network, row = destination neuron.
    pub magnitude: Matrix,
    /// -1, 0 or 1 per edge.
    pub sign: Vec<Vec<i8>>,
}

pub fn edge_render_weights(params: &NetworkParams) -> Vec<EdgeLayer> {
    let max = params
        .layers
        .iter()
        .flat_map(|l| l.weights.as_slice())
        .fold(0.0f64, |m, w| m.max(w.abs()));
    params
        .layers
        .iter()
        .map(|l| {
            let (rows, cols) = l.weights.shape();
            let mag = l
                .weights
                .as_slice()
                .iter()
                .map(|w| if max > 0.0 { w.abs() / max } else { 0.0 })
                .collect();
            EdgeLayer {
                magnitude: Matrix::from_vec(rows, cols, mag).expect("same shape"),
                sign: l
                    .weights
                    .iter_rows()
                    .map(|r| {
                        r.iter()
                            .map(|&w| {
                                if w > 0.0 {
                                    1
                                } else if w < 0.0 {
                                    -1
                                } else {
                                    0
                                }
                            })
                            .collect()
                    })
                    .collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{init_params, ActivationKind, TaskKind};

    fn config(sizes: &[usize], lr: f64) -> NetworkConfig {
        NetworkConfig {
            layer_sizes: sizes.to_vec(),
            activation: ActivationKind::Sigmoid,
            learning_rate: lr,
            epochs: 3,
            task: TaskKind::Classification,
            seed: 1,
        }
    }

    fn toy_batch() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let x = vec![
            vec![0.1, 0.9, 0.3, 0.5],
            vec![0.7, 0.2, 0.8, 0.1],
            vec![0.4, 0.4, 0.6, 0.9],
        ];
        let y = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        (x, y)
    }

    fn epochs(c: &NetworkConfig, n: u32) -> Vec<TrainingEvent> {
        let (x, y) = toy_batch();
        let mut params = init_params(c, c.seed).unwrap();
        let mut all = Vec::new();
        for e in 0..n {
            let run = run_epoch(&params, c, Batch::new(&x, &y).unwrap(), None, e, all.len() as u64).unwrap();
            params = run.params;
            all.extend(run.events);
        }
        all
    }

    #[test]
    fn twelve_events_for_one_hidden_layer() {
        let ev = epochs(&config(&[4, 8, 3], 0.5), 1);
        assert_eq!(ev.len(), 12);
        let tags: Vec<_> = ev.iter().map(|e| e.kind.tag()).collect();
        assert_eq!(
            tags,
            vec![
                "EPOCH_START",
                "FORWARD_PULSE",
                "ACTIVATIONS_COMPUTED",
                "FORWARD_PULSE",
                "ACTIVATIONS_COMPUTED",
                "OUTPUT_PRODUCED",
                "LOSS_COMPUTED",
                "BACKWARD_PULSE",
                "WEIGHTS_UPDATED",
                "BACKWARD_PULSE",
                "WEIGHTS_UPDATED",
                "EPOCH_END"
            ]
        );
        assert!(ev.iter().enumerate().all(|(i, e)| e.seq == i as u64));
        assert_eq!(validate_trace(&ev), Ok(()));
    }

    #[test]
    fn zero_learning_rate_leaves_weights() {
        let c = config(&[4, 5, 3], 0.5);
        let (x, y) = toy_batch();
        let params = init_params(&c, 2).unwrap();
        let mut zero = c.clone();
        zero.learning_rate = 0.0;
        let run = run_epoch(&params, &zero, Batch::new(&x, &y).unwrap(), None, 0, 0).unwrap();
        assert_eq!(run.params, params);
        for e in &run.events {
            if let EventKind::WeightsUpdated { w_pre, w_post, .. } = &e.kind {
                assert_eq!(w_pre, w_post);
            }
        }
    }

    #[test]
    fn empty_training_split_is_an_error() {
        let c = config(&[4, 3], 0.5);
        let params = init_params(&c, 2).unwrap();
        let empty: Vec<Vec<f64>> = Vec::new();
        let err = run_epoch(&params, &c, Batch::new(&empty, &empty).unwrap(), None, 0, 0);
        assert!(matches!(err, Err(TraceError::EmptyTraining)));
    }

    #[test]
    fn multi_epoch_traces_validate_and_replay() {
        let c = config(&[4, 6, 5, 3], 0.8);
        let ev = epochs(&c, 4);
        assert_eq!(validate_trace(&ev), Ok(()));
        let (x, y) = toy_batch();
        let input = ReplayInput {
            config: &c,
            train: Batch::new(&x, &y).unwrap(),
            val: None,
        };
        assert_eq!(replay_trace(&ev, input), Ok(()));
    }

    #[test]
    fn update_before_pulse_is_a_timing_violation() {
        let mut ev = epochs(&config(&[4, 8, 3], 0.5), 1);
        // BACKWARD_PULSE into 2 sits at index 7, its update at 8
        ev.swap(7, 8);
        for (i, e) in ev.iter_mut().enumerate() {
            e.seq = i as u64;
        }
        let v = validate_trace(&ev).unwrap_err();
        assert_eq!(v.rule, Rule::UpdateTiming);
        assert_eq!(v.seq, 7);
    }

    #[test]
    fn tampered_post_weights_break_algebra() {
        let mut ev = epochs(&config(&[4, 8, 3], 0.5), 1);
        if let EventKind::WeightsUpdated { w_post, .. } = &mut ev[10].kind {
            let v = w_post.get(0, 0);
            w_post.set(0, 0, v + 1e-3);
        }
        let v = validate_trace(&ev).unwrap_err();
        assert_eq!(v.rule, Rule::UpdateAlgebra);
        assert_eq!(v.seq, 10);
    }

    #[test]
    fn other_violations() {
        let ev = epochs(&config(&[4, 8, 3], 0.5), 2);
        let mut gap = ev.clone();
        gap.remove(3);
        assert_eq!(validate_trace(&gap).unwrap_err().rule, Rule::SeqOrder);

        let mut epoch = ev.clone();
        epoch[13].epoch = 5;
        assert_eq!(validate_trace(&epoch).unwrap_err().rule, Rule::EpochOrder);

        let cut = &ev[..17];
        let v = validate_trace(cut).unwrap_err();
        assert_eq!(v.rule, Rule::Grammar);
        assert!(v.detail.contains("mid-epoch"));

        // second epoch pulses through weights that were never posted
        let mut cont = ev.clone();
        if let EventKind::ForwardPulse { edge_weights, .. } = &mut cont[13].kind {
            edge_weights.set(0, 0, 42.0);
        }
        assert_eq!(validate_trace(&cont).unwrap_err().rule, Rule::SnapshotContinuity);

        let mut order = ev;
        order.swap(5, 6);
        for (i, e) in order.iter_mut().enumerate() {
            e.seq = i as u64;
        }
        assert_eq!(validate_trace(&order).unwrap_err().rule, Rule::Grammar);
    }

    #[test]
    fn replay_catches_wrong_loss() {
        let c = config(&[4, 8, 3], 0.5);
        let mut ev = epochs(&c, 1);
        if let EventKind::LossComputed { loss } = &mut ev[6].kind {
            *loss += 1e-6;
        }
        assert_eq!(validate_trace(&ev), Ok(()));
        let (x, y) = toy_batch();
        let v = replay_trace(
            &ev,
            ReplayInput {
                config: &c,
                train: Batch::new(&x, &y).unwrap(),
                val: None,
            },
        )
        .unwrap_err();
        assert_eq!((v.rule, v.seq), (Rule::Replay, 6));
    }

    #[test]
    fn serialization_round_trip_and_format() {
        let ev = epochs(&config(&[4, 3, 3], 0.5), 1);
        for e in &ev {
            let line = serialize_event(e);
            assert!(!line.contains('\n'));
            assert_eq!(&deserialize_event(&line).unwrap(), e);
        }
        let zero = TrainingEvent {
            seq: 3,
            epoch: 0,
            kind: EventKind::LossComputed { loss: 0.0 },
        };
        assert_eq!(
            serialize_event(&zero),
            r#"{"seq":3,"epoch":0,"type":"LOSS_COMPUTED","loss":0.0}"#
        );
        assert!(deserialize_event(r#"{"seq":0,"epoch":0,"type":"NOPE"}"#).is_err());
    }

    #[test]
    fn read_trace_reports_line_numbers() {
        let ev = epochs(&config(&[4, 3], 0.5), 1);
        let mut buf = Vec::new();
        write_trace(&mut buf, &ev).unwrap();
        assert_eq!(read_trace(&buf[..]).unwrap(), ev);
        let text = String::from_utf8(buf).unwrap();
        let broken = format!("{}\n{{\"seq\":", text.lines().next().unwrap());
        match read_trace(broken.as_bytes()) {
            Err(TraceError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn edge_weights_scale_by_global_max() {
        let mut p = NetworkParams::zeros(&[3, 1]);
        assert!(edge_render_weights(&p)[0]
            .magnitude
            .as_slice()
            .iter()
            .all(|&m| m == 0.0));
        for (k, w) in [1.0, -2.0, 4.0].into_iter().enumerate() {
            p.layers[0].weights.set(0, k, w);
        }
        let e = &edge_render_weights(&p)[0];
        assert_eq!(e.magnitude.as_slice(), &[0.25, 0.5, 1.0]);
        assert_eq!(e.sign, vec![vec![1, -1, 1]]);
        for k in 0..3 {
            p.layers[0].weights.set(0, k, if k % 2 == 0 { 0.3 } else { -0.3 });
        }
        assert!(edge_render_weights(&p)[0].magnitude.as_slice().iter().all(|&m| m == 1.0));
    }
}
