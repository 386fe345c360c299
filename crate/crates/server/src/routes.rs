use std::collections::HashMap;
use std::sync::Arc;

use axum::body::{to_bytes, Bytes};
use axum::extract::rejection::{PathRejection, QueryRejection};
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::Json;
use netpulse_core::data::DataError;
use netpulse_core::nn::{ActivationKind, NetworkConfig, TaskKind};
use netpulse_core::session::{config_for_dataset, NeuronEquation, Prediction};
use netpulse_core::{Command, Dataset, Session, SessionStatus};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ApiError, ApiResult, ErrorCode};
use crate::state::{AppState, DatasetDescriptor};
use crate::worker::{SessionDescriptor, SessionHandle, SessionView, WorkerGone};

pub const DEFAULT_VAL_FRACTION: f64 = 0.2;
const DEFAULT_UPLOAD_NAME: &str = "upload";

impl From<WorkerGone> for ApiError {
    fn from(_: WorkerGone) -> Self {
        ApiError::internal("session worker has shut down")
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        ApiError::new(ErrorCode::InputInvalid, e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(ErrorCode::InputInvalid, e.body_text())
    }
}

fn too_large(limit: usize) -> ApiError {
    ApiError::new(ErrorCode::PayloadTooLarge, format!("request body exceeds {limit} bytes"))
        .with_detail(json!({ "limit": limit }))
}

/// Whole request body, bounded by the configured upload limit.
async fn read_body(req: Request, limit: usize) -> ApiResult<Bytes> {
    let declared = req
        .headers()
        .get(header::CONTENT_LENGTH)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<u64>().ok());
    if declared.is_some_and(|n| n > limit as u64) {
        return Err(too_large(limit));
    }
    to_bytes(req.into_body(), limit).await.map_err(|e| {
        if e.to_string().contains("length limit") {
            too_large(limit)
        } else {
            ApiError::bad_request(format!("could not read request body: {e}"))
        }
    })
}

/// JSON request body whose every failure maps to an [`ApiError`].
pub struct JsonBody<T>(pub T);

impl<T: DeserializeOwned> FromRequest<AppState> for JsonBody<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &AppState) -> Result<Self, Self::Rejection> {
        let bytes = read_body(req, state.config().max_upload_bytes).await?;
        serde_json::from_slice(&bytes)
            .map(JsonBody)
            .map_err(|e| ApiError::bad_request(format!("malformed JSON body: {e}")))
    }
}

pub async fn list_datasets(State(state): State<AppState>) -> Json<Vec<DatasetDescriptor>> {
    Json(state.datasets())
}

pub async fn get_dataset(
    State(state): State<AppState>,
    path: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<DatasetDescriptor>> {
    let Path(id) = path?;
    let entry = state.dataset(&id).ok_or_else(|| ApiError::not_found("dataset", &id))?;
    Ok(Json(entry.descriptor(&id)))
}

/// Accepts either a raw CSV body or `multipart/form-data` with a file part
/// and optional `name` and `target` text parts. Query parameters `name` and
/// `target` take precedence over form fields.
pub async fn upload_dataset(
    State(state): State<AppState>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
    req: Request,
) -> ApiResult<(StatusCode, Json<DatasetDescriptor>)> {
    let Query(query) = query?;
    let limit = state.config().max_upload_bytes;
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));

    let mut name = None;
    let mut target = None;
    let body = if is_multipart {
        let mut form = Multipart::from_request(req, &state)
            .await
            .map_err(|e| ApiError::bad_request(e.body_text()))?;
        let mut file = None;
        while let Some(field) = form.next_field().await.map_err(|e| multipart_error(e, limit))? {
            let field_name = field.name().unwrap_or_default().to_owned();
            let file_name = field.file_name().map(str::to_owned);
            let bytes = field.bytes().await.map_err(|e| multipart_error(e, limit))?;
            match field_name.as_str() {
                "name" => name = Some(String::from_utf8_lossy(&bytes).trim().to_owned()),
                "target" => target = Some(String::from_utf8_lossy(&bytes).trim().to_owned()),
                _ if file.is_none() => {
                    if name.is_none() {
                        name = file_name.map(|f| f.trim_end_matches(".csv").to_owned());
                    }
                    file = Some(bytes);
                }
                _ => {}
            }
        }
        file.ok_or_else(|| ApiError::bad_request("multipart body has no file part"))?
    } else {
        read_body(req, limit).await?
    };
    if let Some(n) = query.get("name") {
        name = Some(n.clone());
    }
    if let Some(t) = query.get("target") {
        target = Some(t.clone());
    }
    let name = name
        .filter(|n| !n.is_empty())
        .unwrap_or_else(|| DEFAULT_UPLOAD_NAME.to_owned());
    let target = target.filter(|t| !t.is_empty());
    let dataset = Dataset::from_csv(&name, &body, target.as_deref())?;
    Ok((StatusCode::CREATED, Json(state.add_dataset(dataset))))
}

fn multipart_error(e: axum::extract::multipart::MultipartError, limit: usize) -> ApiError {
    if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
        too_large(limit)
    } else {
        ApiError::bad_request(e.body_text())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub dataset_id: String,
    pub config: Value,
}

/// Session configuration as accepted over HTTP. Either the full
/// `layer_sizes` or only `hidden_layers` (input and output sizes then follow
/// from the dataset).
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfigRequest {
    #[serde(default)]
    pub layer_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub hidden_layers: Option<Vec<usize>>,
    #[serde(default = "default_activation")]
    pub activation: ActivationKind,
    pub learning_rate: f64,
    pub epochs: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub task: Option<TaskKind>,
    #[serde(default = "default_val_fraction")]
    pub val_fraction: f64,
}

fn default_activation() -> ActivationKind {
    ActivationKind::Sigmoid
}

fn default_val_fraction() -> f64 {
    DEFAULT_VAL_FRACTION
}

impl SessionConfigRequest {
    pub fn to_config(&self, dataset: &Dataset) -> ApiResult<NetworkConfig> {
        let mut config = match (&self.layer_sizes, &self.hidden_layers) {
            (Some(_), Some(_)) => {
                return Err(ApiError::config_field(
                    "layer_sizes",
                    "give either layer_sizes or hidden_layers, not both",
                ))
            }
            (Some(sizes), None) => NetworkConfig {
                layer_sizes: sizes.clone(),
                activation: self.activation,
                learning_rate: self.learning_rate,
                epochs: self.epochs,
                task: dataset.task(),
                seed: self.seed,
            },
            (None, hidden) => config_for_dataset(
                dataset,
                hidden.as_deref().unwrap_or_default(),
                self.activation,
                self.learning_rate,
                self.epochs,
                self.seed,
            ),
        };
        if let Some(task) = self.task {
            config.task = task;
        }
        Ok(config)
    }
}

pub async fn create_session(
    State(state): State<AppState>,
    JsonBody(body): JsonBody<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionDescriptor>)> {
    let entry = state
        .dataset(&body.dataset_id)
        .ok_or_else(|| ApiError::not_found("dataset", &body.dataset_id))?;
    let request: SessionConfigRequest = serde_json::from_value(body.config)
        .map_err(|e| ApiError::config_field("config", e.to_string()))?;
    let config = request.to_config(&entry.dataset)?;
    let split = entry
        .dataset
        .split(request.val_fraction, config.seed)
        .map_err(|e: DataError| ApiError::config_field("val_fraction", e.to_string()))?;
    let session = Session::create(Arc::new(split), config)?.with_event_limit(state.config().event_limit);
    let delay = state.config().event_delay;
    let dataset_id = body.dataset_id.clone();
    let handle = state
        .add_session(|| Ok::<_, ApiError>(SessionHandle::spawn(session, dataset_id, request.val_fraction, delay)))?
        .ok_or_else(|| {
            let cap = state.config().max_sessions;
            ApiError::new(ErrorCode::SessionLimit, format!("at most {cap} sessions may exist at once"))
                .with_detail(json!({ "limit": cap }))
        })?;
    let view = handle.describe().await?;
    Ok((StatusCode::CREATED, Json(view.session)))
}

pub async fn list_sessions(State(state): State<AppState>) -> ApiResult<Json<Vec<SessionDescriptor>>> {
    let mut out = Vec::new();
    for handle in state.sessions() {
        out.push(handle.describe().await?.session);
    }
    Ok(Json(out))
}

fn lookup(state: &AppState, path: Result<Path<String>, PathRejection>) -> ApiResult<SessionHandle> {
    let Path(id) = path?;
    state.session(&id).ok_or_else(|| ApiError::not_found("session", &id))
}

pub async fn get_session(
    State(state): State<AppState>,
    path: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<SessionView>> {
    let handle = lookup(&state, path)?;
    Ok(Json(handle.describe().await?))
}

pub async fn delete_session(
    State(state): State<AppState>,
    path: Result<Path<String>, PathRejection>,
) -> ApiResult<StatusCode> {
    let Path(id) = path?;
    // Dropping the last handle shuts the worker down and ends open streams.
    state
        .remove_session(&id)
        .ok_or_else(|| ApiError::not_found("session", &id))?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlRequest {
    pub command: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ControlResponse {
    pub status: SessionStatus,
}

/// Command names are matched case-insensitively.
pub fn parse_command(s: &str) -> Option<Command> {
    Command::ALL
        .into_iter()
        .find(|c| format!("{c:?}").eq_ignore_ascii_case(s.trim()))
}

pub async fn control_session(
    State(state): State<AppState>,
    path: Result<Path<String>, PathRejection>,
    JsonBody(body): JsonBody<ControlRequest>,
) -> ApiResult<Json<ControlResponse>> {
    let handle = lookup(&state, path)?;
    let command = parse_command(&body.command).ok_or_else(|| {
        ApiError::new(ErrorCode::InputInvalid, format!("unknown command {:?}", body.command))
            .with_detail(json!({ "field": "command", "allowed": Command::ALL }))
    })?;
    let status = handle.control(command).await??;
    Ok(Json(ControlResponse { status }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    pub inputs: Vec<f64>,
}

pub async fn predict(
    State(state): State<AppState>,
    path: Result<Path<String>, PathRejection>,
    JsonBody(body): JsonBody<PredictRequest>,
) -> ApiResult<Json<Prediction>> {
    let handle = lookup(&state, path)?;
    Ok(Json(handle.predict(body.inputs).await??))
}

pub async fn neuron_equation(
    State(state): State<AppState>,
    path: Result<Path<(String, usize, usize)>, PathRejection>,
) -> ApiResult<Json<NeuronEquation>> {
    let Path((id, layer, index)) = path?;
    let handle = state.session(&id).ok_or_else(|| ApiError::not_found("session", &id))?;
    Ok(Json(handle.neuron(layer, index).await??))
}

pub async fn not_found() -> ApiError {
    ApiError::new(ErrorCode::NotFound, "no such route")
}

pub async fn method_not_allowed() -> ApiError {
    ApiError::new(ErrorCode::MethodNotAllowed, "method not allowed on this route")
}
