//! One task per session. The task owns the [`Session`]; request handlers talk
//! to it through a command queue, and subscribers read the retained event log.

use std::sync::{Arc, RwLock};
use std::time::Duration;

use netpulse_core::nn::NetworkConfig;
use netpulse_core::session::{
    EpochMetrics, NetworkInfo, NeuronEquation, Prediction, SessionError, SessionSnapshot,
};
use netpulse_core::trace::serialize_event;
use netpulse_core::{Command, Session, SessionStatus};
use serde::{Deserialize, Serialize};
use tokio::sync::{mpsc, oneshot, watch};
use tokio::time::{sleep_until, Instant};

const QUEUE_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDescriptor {
    pub id: String,
    pub dataset_id: String,
    pub dataset_name: String,
    pub status: SessionStatus,
    pub current_epoch: u32,
    pub next_seq: u64,
    pub config: NetworkConfig,
    pub val_fraction: f64,
    /// Why the server stopped the session on its own, if it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halted: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    pub session: SessionDescriptor,
    pub network_info: NetworkInfo,
    pub metrics_history: Vec<EpochMetrics>,
}

/// What a subscriber can observe without asking the worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamState {
    /// Number of events in the log; also the seq of the next event.
    pub len: u64,
    /// No further events will ever be appended.
    pub terminal: bool,
}

/// Every serialized event of the session, indexed by seq.
pub struct EventLog {
    lines: RwLock<Vec<Arc<str>>>,
    state: watch::Sender<StreamState>,
}

impl EventLog {
    fn new() -> Self {
        let (state, _) = watch::channel(StreamState {
            len: 0,
            terminal: false,
        });
        Self {
            lines: RwLock::new(Vec::new()),
            state,
        }
    }

    pub fn watch(&self) -> watch::Receiver<StreamState> {
        self.state.subscribe()
    }

    pub fn len(&self) -> u64 {
        self.lines.read().expect("event log lock").len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lines with seq in `from..to`.
    pub fn range(&self, from: u64, to: u64) -> Vec<Arc<str>> {
        let lines = self.lines.read().expect("event log lock");
        let to = (to as usize).min(lines.len());
        let from = (from as usize).min(to);
        lines[from..to].to_vec()
    }

    fn append(&self, line: String) -> u64 {
        let mut lines = self.lines.write().expect("event log lock");
        lines.push(line.into());
        lines.len() as u64
    }

    fn publish(&self, len: u64, terminal: bool) {
        self.state.send_replace(StreamState { len, terminal });
    }
}

enum Request {
    Control(Command, oneshot::Sender<Result<SessionStatus, SessionError>>),
    Predict(Vec<f64>, oneshot::Sender<Result<Prediction, SessionError>>),
    Neuron(usize, usize, oneshot::Sender<Result<NeuronEquation, SessionError>>),
    Describe(oneshot::Sender<SessionView>),
    Snapshot(oneshot::Sender<SessionSnapshot>),
}

/// Cloneable handle to a running session worker.
#[derive(Clone)]
pub struct SessionHandle {
    pub id: String,
    pub dataset_id: String,
    requests: mpsc::Sender<Request>,
    log: Arc<EventLog>,
}

/// The worker has exited; only happens while the server shuts down.
#[derive(Debug)]
pub struct WorkerGone;

impl SessionHandle {
    /// Spawn the worker task for `session` and return a handle to it.
    pub fn spawn(session: Session, dataset_id: String, val_fraction: f64, event_delay: Duration) -> Self {
        let (tx, rx) = mpsc::channel(QUEUE_DEPTH);
        let log = Arc::new(EventLog::new());
        let handle = Self {
            id: session.id().to_owned(),
            dataset_id: dataset_id.clone(),
            requests: tx,
            log: Arc::clone(&log),
        };
        let worker = Worker {
            session,
            dataset_id,
            val_fraction,
            log,
            halted: None,
            event_delay,
        };
        tokio::spawn(worker.run(rx));
        handle
    }

    pub fn log(&self) -> &Arc<EventLog> {
        &self.log
    }

    async fn ask<T>(&self, make: impl FnOnce(oneshot::Sender<T>) -> Request) -> Result<T, WorkerGone> {
        let (tx, rx) = oneshot::channel();
        self.requests.send(make(tx)).await.map_err(|_| WorkerGone)?;
        rx.await.map_err(|_| WorkerGone)
    }

    pub async fn control(&self, command: Command) -> Result<Result<SessionStatus, SessionError>, WorkerGone> {
        self.ask(|tx| Request::Control(command, tx)).await
    }

    pub async fn predict(&self, inputs: Vec<f64>) -> Result<Result<Prediction, SessionError>, WorkerGone> {
        self.ask(|tx| Request::Predict(inputs, tx)).await
    }

    pub async fn neuron(&self, layer: usize, index: usize) -> Result<Result<NeuronEquation, SessionError>, WorkerGone> {
        self.ask(|tx| Request::Neuron(layer, index, tx)).await
    }

    pub async fn describe(&self) -> Result<SessionView, WorkerGone> {
        self.ask(Request::Describe).await
    }

    /// State at an event boundary; `next_seq` equals the log length at that
    /// moment, so following the log from there misses nothing.
    pub async fn snapshot(&self) -> Result<SessionSnapshot, WorkerGone> {
        self.ask(Request::Snapshot).await
    }
}

struct Worker {
    session: Session,
    dataset_id: String,
    val_fraction: f64,
    log: Arc<EventLog>,
    halted: Option<String>,
    event_delay: Duration,
}

impl Worker {
    async fn run(mut self, mut rx: mpsc::Receiver<Request>) {
        loop {
            if self.session.status() == SessionStatus::Running {
                // Queued requests first, so Pause and Stop take effect before
                // the next event.
                while let Ok(req) = rx.try_recv() {
                    self.handle(req);
                }
                if self.session.status() != SessionStatus::Running {
                    continue;
                }
                self.step();
                if self.event_delay.is_zero() {
                    tokio::task::yield_now().await;
                } else {
                    let deadline = Instant::now() + self.event_delay;
                    loop {
                        tokio::select! {
                            _ = sleep_until(deadline) => break,
                            req = rx.recv() => match req {
                                Some(req) => self.handle(req),
                                None => return self.shut_down(),
                            },
                        }
                    }
                }
            } else {
                match rx.recv().await {
                    Some(req) => self.handle(req),
                    None => return self.shut_down(),
                }
            }
        }
    }

    fn step(&mut self) {
        match self.session.advance() {
            Ok(event) => {
                let len = self.log.append(serialize_event(&event));
                self.log.publish(len, self.session.status().is_terminal());
            }
            Err(e) => {
                tracing::warn!(session = self.session.id(), error = %e, "halting session");
                self.halted = Some(e.to_string());
                let _ = self.session.control(Command::Stop);
                self.publish_status();
            }
        }
    }

    fn publish_status(&self) {
        self.log.publish(self.log.len(), self.session.status().is_terminal());
    }

    fn shut_down(mut self) {
        if !self.session.status().is_terminal() {
            let _ = self.session.control(Command::Stop);
        }
        self.publish_status();
    }

    fn handle(&mut self, req: Request) {
        match req {
            Request::Control(command, reply) => {
                let result = self.session.control(command);
                self.publish_status();
                let _ = reply.send(result);
            }
            Request::Predict(inputs, reply) => {
                let _ = reply.send(self.session.predict(&inputs));
            }
            Request::Neuron(layer, index, reply) => {
                let _ = reply.send(self.session.neuron_equation(layer, index));
            }
            Request::Describe(reply) => {
                let _ = reply.send(SessionView {
                    session: self.descriptor(),
                    network_info: self.session.network_info(),
                    metrics_history: self.session.metrics_history().to_vec(),
                });
            }
            Request::Snapshot(reply) => {
                let _ = reply.send(self.session.snapshot());
            }
        }
    }

    fn descriptor(&self) -> SessionDescriptor {
        SessionDescriptor {
            id: self.session.id().to_owned(),
            dataset_id: self.dataset_id.clone(),
            dataset_name: self.session.dataset().name.clone(),
            status: self.session.status(),
            current_epoch: self.session.current_epoch(),
            next_seq: self.session.next_seq(),
            config: self.session.config().clone(),
            val_fraction: self.val_fraction,
            halted: self.halted.clone(),
        }
    }
}
