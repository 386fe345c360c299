//! Event subscriptions over WebSocket.
//!
//! Without `last_seq` the first message is a snapshot frame
//! (`"type":"SNAPSHOT"`) followed by every event from the snapshot's
//! `next_seq` onward. With `last_seq=N` the server replays from seq `N+1`
//! out of the retained log and sends no snapshot. Each event is one text
//! message holding exactly one trace line. The server closes the socket once
//! the session is Completed or Stopped and every event has been sent.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::rejection::{PathRejection, QueryRejection};
use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::response::Response;
use netpulse_core::session::SessionSnapshot;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{ApiError, ApiResult, ErrorCode};
use crate::state::AppState;
use crate::worker::{EventLog, SessionHandle};

pub const SNAPSHOT_TYPE: &str = "SNAPSHOT";
const CLOSE_NORMAL: u16 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotFrame {
    #[serde(rename = "type")]
    pub frame_type: String,
    #[serde(flatten)]
    pub snapshot: SessionSnapshot,
}

impl SnapshotFrame {
    pub fn new(snapshot: SessionSnapshot) -> Self {
        Self {
            frame_type: SNAPSHOT_TYPE.to_owned(),
            snapshot,
        }
    }
}

/// True for the snapshot frame; event lines never carry this type.
pub fn is_snapshot_frame(message: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(message)
        .ok()
        .and_then(|v| v.get("type").and_then(|t| t.as_str()).map(|t| t == SNAPSHOT_TYPE))
        .unwrap_or(false)
}

pub async fn subscribe(
    State(state): State<AppState>,
    path: Result<Path<String>, PathRejection>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
    upgrade: Result<WebSocketUpgrade, axum::extract::ws::rejection::WebSocketUpgradeRejection>,
) -> ApiResult<Response> {
    let Path(id) = path?;
    let Query(query) = query?;
    let handle = state.session(&id).ok_or_else(|| ApiError::not_found("session", &id))?;
    let last_seq = match query.get("last_seq") {
        None => None,
        Some(raw) => Some(raw.parse::<u64>().map_err(|_| {
            ApiError::new(ErrorCode::InputInvalid, format!("last_seq must be a non-negative integer, got {raw:?}"))
                .with_detail(json!({ "field": "last_seq" }))
        })?),
    };
    if let Some(n) = last_seq {
        let len = handle.log().len();
        if n >= len {
            return Err(ApiError::new(
                ErrorCode::InputInvalid,
                format!("last_seq {n} has not been emitted; next seq is {len}"),
            )
            .with_detail(json!({ "field": "last_seq", "next_seq": len })));
        }
    }
    let upgrade = upgrade.map_err(|e| ApiError::bad_request(format!("websocket upgrade required: {}", e.body_text())))?;
    Ok(upgrade.on_upgrade(move |socket| follow(socket, handle, last_seq)))
}

async fn follow(mut socket: WebSocket, handle: SessionHandle, last_seq: Option<u64>) {
    let log: Arc<EventLog> = Arc::clone(handle.log());
    let mut state = log.watch();
    let mut cursor = match last_seq {
        Some(n) => n + 1,
        None => {
            let Ok(snapshot) = handle.snapshot().await else {
                return;
            };
            let next = snapshot.next_seq;
            let frame = serde_json::to_string(&SnapshotFrame::new(snapshot)).expect("snapshot serializes");
            if socket.send(Message::Text(frame.into())).await.is_err() {
                return;
            }
            next
        }
    };
    // Holding the handle would keep a deleted session's worker alive.
    drop(handle);

    loop {
        let seen = *state.borrow_and_update();
        for line in log.range(cursor, u64::MAX) {
            if socket.send(Message::Text(line.to_string().into())).await.is_err() {
                return;
            }
            cursor += 1;
        }
        if seen.terminal && cursor >= seen.len {
            let _ = socket
                .send(Message::Close(Some(CloseFrame {
                    code: CLOSE_NORMAL,
                    reason: "session finished".into(),
                })))
                .await;
            return;
        }
        tokio::select! {
            changed = state.changed() => {
                if changed.is_err() {
                    return;
                }
            }
            incoming = socket.recv() => match incoming {
                None | Some(Err(_)) | Some(Ok(Message::Close(_))) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
