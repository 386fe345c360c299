use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use netpulse_core::data::{self, BUILTIN_NAMES};
use netpulse_core::{Dataset, DatasetSummary};
use serde::{Deserialize, Serialize};

use crate::worker::SessionHandle;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 5 * 1024 * 1024;
pub const DEFAULT_MAX_SESSIONS: usize = 16;
pub const DEFAULT_EVENT_LIMIT: u64 = 200_000;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub listen: SocketAddr,
    /// Directory served at `/` for the browser bundle.
    pub static_dir: Option<PathBuf>,
    pub max_upload_bytes: usize,
    pub max_sessions: usize,
    /// Pause between consecutive events of a running session.
    pub event_delay: Duration,
    /// Retained events per session; a session is stopped before an epoch
    /// that would exceed it.
    pub event_limit: u64,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            listen: DEFAULT_LISTEN.parse().expect("valid default address"),
            static_dir: None,
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            max_sessions: DEFAULT_MAX_SESSIONS,
            event_delay: Duration::ZERO,
            event_limit: DEFAULT_EVENT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub id: String,
    pub builtin: bool,
    #[serde(flatten)]
    pub summary: DatasetSummary,
}

pub struct DatasetEntry {
    pub builtin: bool,
    pub dataset: Arc<Dataset>,
}

impl DatasetEntry {
    pub fn descriptor(&self, id: &str) -> DatasetDescriptor {
        DatasetDescriptor {
            id: id.to_owned(),
            builtin: self.builtin,
            summary: self.dataset.summarize(),
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    config: ServerConfig,
    datasets: RwLock<BTreeMap<String, Arc<DatasetEntry>>>,
    sessions: RwLock<BTreeMap<String, SessionHandle>>,
}

impl AppState {
    /// Fresh state with the built-in datasets registered under their names.
    pub fn new(config: ServerConfig) -> Self {
        let datasets = BUILTIN_NAMES
            .iter()
            .filter_map(|name| data::builtin(name).map(|d| (name.to_string(), d)))
            .map(|(name, d)| {
                let entry = DatasetEntry {
                    builtin: true,
                    dataset: Arc::new(d),
                };
                (name, Arc::new(entry))
            })
            .collect();
        Self {
            inner: Arc::new(Inner {
                config,
                datasets: RwLock::new(datasets),
                sessions: RwLock::new(BTreeMap::new()),
            }),
        }
    }

    pub fn config(&self) -> &ServerConfig {
        &self.inner.config
    }

    pub fn datasets(&self) -> Vec<DatasetDescriptor> {
        let map = self.inner.datasets.read().expect("dataset registry lock");
        map.iter().map(|(id, e)| e.descriptor(id)).collect()
    }

    pub fn dataset(&self, id: &str) -> Option<Arc<DatasetEntry>> {
        self.inner.datasets.read().expect("dataset registry lock").get(id).cloned()
    }

    pub fn add_dataset(&self, dataset: Dataset) -> DatasetDescriptor {
        let id = uuid::Uuid::new_v4().to_string();
        let entry = DatasetEntry {
            builtin: false,
            dataset: Arc::new(dataset),
        };
        let descriptor = entry.descriptor(&id);
        self.inner
            .datasets
            .write()
            .expect("dataset registry lock")
            .insert(id, Arc::new(entry));
        descriptor
    }

    pub fn session(&self, id: &str) -> Option<SessionHandle> {
        self.inner.sessions.read().expect("session registry lock").get(id).cloned()
    }

    pub fn sessions(&self) -> Vec<SessionHandle> {
        self.inner
            .sessions
            .read()
            .expect("session registry lock")
            .values()
            .cloned()
            .collect()
    }

    /// Register a session unless the cap is reached; the closure builds the
    /// handle only once a slot is secured.
    pub fn add_session<E>(
        &self,
        make: impl FnOnce() -> Result<SessionHandle, E>,
    ) -> Result<Option<SessionHandle>, E> {
        let mut map = self.inner.sessions.write().expect("session registry lock");
        if map.len() >= self.inner.config.max_sessions {
            return Ok(None);
        }
        let handle = make()?;
        map.insert(handle.id.clone(), handle.clone());
        Ok(Some(handle))
    }

    pub fn remove_session(&self, id: &str) -> Option<SessionHandle> {
        self.inner.sessions.write().expect("session registry lock").remove(id)
    }
}
