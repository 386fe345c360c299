//! Traced multilayer-perceptron training.
//!
//! - [`nn`]: network math (forward, losses, backpropagation, SGD).
//! - [`gradcheck`]: finite-difference gradient estimates.
//! - [`trace`]: training events, traced epochs, validation and replay.
//! - [`data`]: CSV ingestion, schema inference, normalization, splits.
//! - [`session`]: play/pause/stop training sessions with prediction and
//!   per-neuron equations.

pub mod data;
pub mod gradcheck;
pub mod nn;
pub mod session;
pub mod trace;

pub use data::{Dataset, DatasetSchema, DatasetSummary};
pub use nn::{ActivationKind, Metrics, NetworkConfig, NetworkParams, TaskKind};
pub use session::{Command, Session, SessionStatus};
pub use trace::{EventKind, TrainingEvent};
