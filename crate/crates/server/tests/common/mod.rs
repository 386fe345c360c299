#![allow(dead_code)]

use std::sync::Arc;
use std::time::Duration;

use futures::StreamExt;
use netpulse_core::data::builtin;
use netpulse_core::nn::ActivationKind;
use netpulse_core::session::config_for_dataset;
use netpulse_core::trace::serialize_event;
use netpulse_core::{Command, Session};
use netpulse_server::ServerConfig;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message;

pub struct Server {
    pub base: String,
    pub ws_base: String,
    pub http: reqwest::Client,
}

pub async fn start(config: ServerConfig) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(netpulse_server::serve_on(listener, config));
    Server {
        base: format!("http://{addr}"),
        ws_base: format!("ws://{addr}"),
        http: reqwest::Client::new(),
    }
}

pub async fn start_default() -> Server {
    start(ServerConfig::default()).await
}

impl Server {
    pub async fn get(&self, path: &str) -> (u16, Value) {
        let r = self.http.get(format!("{}{path}", self.base)).send().await.unwrap();
        split(r).await
    }

    pub async fn post(&self, path: &str, body: Value) -> (u16, Value) {
        let r = self
            .http
            .post(format!("{}{path}", self.base))
            .json(&body)
            .send()
            .await
            .unwrap();
        split(r).await
    }

    pub async fn post_raw(&self, path: &str, body: impl Into<reqwest::Body>) -> (u16, Value) {
        let r = self
            .http
            .post(format!("{}{path}", self.base))
            .header("content-type", "text/csv")
            .body(body)
            .send()
            .await
            .unwrap();
        split(r).await
    }

    /// Create a session on `dataset` and return its id.
    pub async fn session(&self, dataset: &str, config: Value) -> String {
        let (status, body) = self
            .post("/sessions", json!({ "dataset_id": dataset, "config": config }))
            .await;
        assert_eq!(status, 201, "{body}");
        body["id"].as_str().unwrap().to_owned()
    }

    pub async fn control(&self, id: &str, command: &str) -> (u16, Value) {
        self.post(&format!("/sessions/{id}/control"), json!({ "command": command }))
            .await
    }

    pub async fn subscribe(&self, id: &str, last_seq: Option<u64>) -> Subscription {
        let url = match last_seq {
            Some(n) => format!("{}/sessions/{id}/events?last_seq={n}", self.ws_base),
            None => format!("{}/sessions/{id}/events", self.ws_base),
        };
        let (ws, _) = tokio_tungstenite::connect_async(url).await.unwrap();
        Subscription { ws }
    }

    /// Poll until the session reaches `status`.
    pub async fn wait_for(&self, id: &str, status: &str) -> Value {
        for _ in 0..2000 {
            let (_, body) = self.get(&format!("/sessions/{id}")).await;
            if body["session"]["status"] == status {
                return body;
            }
            tokio::time::sleep(Duration::from_millis(5)).await;
        }
        panic!("session {id} never reached {status}");
    }
}

async fn split(r: reqwest::Response) -> (u16, Value) {
    let status = r.status().as_u16();
    let text = r.text().await.unwrap();
    let body = if text.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&text).unwrap_or(Value::String(text))
    };
    (status, body)
}

pub struct Subscription {
    ws: tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>,
}

impl Subscription {
    /// Next text message, or None once the server closes the stream.
    pub async fn next_text(&mut self) -> Option<String> {
        loop {
            let msg = tokio::time::timeout(Duration::from_secs(20), self.ws.next())
                .await
                .expect("stream stalled")?;
            match msg.ok()? {
                Message::Text(t) => return Some(t.to_string()),
                Message::Close(_) => return None,
                _ => {}
            }
        }
    }

    /// Every remaining message until the server closes the stream.
    pub async fn collect(mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(m) = self.next_text().await {
            out.push(m);
        }
        out
    }
}

pub fn hidden_config(hidden: &[usize], lr: f64, epochs: u32, seed: u64) -> Value {
    json!({
        "hidden_layers": hidden,
        "activation": "sigmoid",
        "learning_rate": lr,
        "epochs": epochs,
        "seed": seed,
        "val_fraction": 0.2,
    })
}

/// The trace lines a headless run produces for the same inputs the server
/// receives from [`hidden_config`].
pub fn headless_lines(dataset: &str, hidden: &[usize], lr: f64, epochs: u32, seed: u64) -> Vec<String> {
    let data = builtin(dataset).unwrap().split(0.2, seed).unwrap();
    let config = config_for_dataset(&data, hidden, ActivationKind::Sigmoid, lr, epochs, seed);
    let mut s = Session::create(Arc::new(data), config).unwrap();
    s.control(Command::Play).unwrap();
    s.run_to_end().unwrap().iter().map(serialize_event).collect()
}

pub fn seqs(lines: &[String]) -> Vec<u64> {
    lines
        .iter()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["seq"].as_u64().unwrap())
        .collect()
}
