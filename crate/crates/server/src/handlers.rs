use std::sync::Arc;

use axum::Json;
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode, header};
use axum::response::{IntoResponse, Response};
use docgen_core::{
    AnalyticsError, ClipId, FilterSelection, GenerateError, GenerationConstraints, bank_stats,
    coverage_report, generate as generate_documentary, to_json_manifest,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::AppState;
use crate::sessions::{new_session_id, valid_session_id};

pub const SESSION_HEADER: &str = "x-docgen-session";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicCount {
    pub topic: String,
    pub clip_count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintOverrides {
    min_total_s: Option<u32>,
    max_total_s: Option<u32>,
    max_clips_per_speaker: Option<u32>,
    require_topic_coverage: Option<bool>,
    max_restarts: Option<u32>,
}

impl ConstraintOverrides {
    fn apply(self, base: GenerationConstraints) -> GenerationConstraints {
        GenerationConstraints {
            min_total_s: self.min_total_s.unwrap_or(base.min_total_s),
            max_total_s: self.max_total_s.unwrap_or(base.max_total_s),
            max_clips_per_speaker: self
                .max_clips_per_speaker
                .unwrap_or(base.max_clips_per_speaker),
            require_topic_coverage: self
                .require_topic_coverage
                .unwrap_or(base.require_topic_coverage),
            max_restarts: self.max_restarts.unwrap_or(base.max_restarts),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateRequest {
    topics: Vec<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    constraints: Option<ConstraintOverrides>,
}

pub struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl ToString) -> Self {
        ApiError {
            status,
            body: json!({"error": code, "message": message.to_string()}),
        }
    }

    fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.body[key] = value.into();
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<GenerateError> for ApiError {
    fn from(err: GenerateError) -> Self {
        match &err {
            GenerateError::EmptySelection => {
                ApiError::new(StatusCode::BAD_REQUEST, "EmptySelection", &err)
            }
            GenerateError::InvalidConstraints(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "InvalidConstraints", &err)
            }
            GenerateError::UnknownTopic(topic) => {
                ApiError::new(StatusCode::NOT_FOUND, "UnknownTopic", &err)
                    .with("topic", topic.as_str())
            }
            GenerateError::Infeasible { reason } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "Infeasible", &err)
                    .with("reason", reason.to_string())
            }
            GenerateError::RestartsExhausted { .. } | GenerateError::PoolTooLarge { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "Infeasible", &err)
                    .with("reason", "RestartsExhausted")
            }
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(err: AnalyticsError) -> Self {
        match err {
            AnalyticsError::EmptyLog => ApiError::new(StatusCode::NOT_FOUND, "EmptyLog", err),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "SessionLog", other),
        }
    }
}

fn session_from(headers: &HeaderMap) -> Result<String, ApiError> {
    match headers.get(SESSION_HEADER) {
        None => Ok(new_session_id()),
        Some(v) => match v.to_str() {
            Ok(id) if valid_session_id(id) => Ok(id.to_string()),
            _ => Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "BadSession",
                "session token must be 1-64 characters of [A-Za-z0-9_-]",
            )),
        },
    }
}

pub async fn topics(State(state): State<Arc<AppState>>) -> Json<Vec<TopicCount>> {
    let stats = bank_stats(&state.bank);
    Json(
        state
            .bank
            .topics()
            .iter()
            .map(|t| TopicCount {
                topic: t.display_name(),
                clip_count: stats.per_topic_clip_counts.get(t).copied().unwrap_or(0),
            })
            .collect(),
    )
}

pub async fn generate(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let session = session_from(&headers)?;
    let request: GenerateRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "MalformedBody", e))?;
    if request.topics.is_empty() {
        return Err(GenerateError::EmptySelection.into());
    }
    let selection = FilterSelection::parse(&request.topics)?;
    let constraints = request
        .constraints
        .unwrap_or_default()
        .apply(state.constraints);
    let seed = request.seed.unwrap_or_else(rand::random);

    let doc = generate_documentary(&state.bank, &selection, &constraints, seed)?;
    state.sessions.record(&session, &state.bank, &doc).await?;

    let mut response = (
        [(header::CONTENT_TYPE, "application/json")],
        to_json_manifest(&doc),
    )
        .into_response();
    response.headers_mut().insert(
        SESSION_HEADER,
        HeaderValue::from_str(&session).expect("validated token"),
    );
    Ok(response)
}

pub async fn clip(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    match state.bank.raw_clip(&ClipId(id.clone())) {
        Some(raw) => (
            [(header::CONTENT_TYPE, "application/json")],
            raw.get().to_string(),
        )
            .into_response(),
        None => ApiError::new(
            StatusCode::NOT_FOUND,
            "UnknownClip",
            format!("no clip {id:?}"),
        )
        .with("clip", id)
        .into_response(),
    }
}

pub async fn coverage(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let unknown = || {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "UnknownSession",
            format!("no session {id:?}"),
        )
    };
    if !valid_session_id(&id) {
        return Err(unknown());
    }
    let log = state.sessions.read(&id).await?.ok_or_else(unknown)?;
    let report = coverage_report(&log, &state.bank)?;
    Ok(Json(report).into_response())
}
