//! Stateless JSON-over-HTTP facade over the lifecycle models.
//!
//! | method | path               | body            |
//! |--------|--------------------|-----------------|
//! | GET    | `/api/v1/health`   |                 |
//! | GET    | `/api/v1/catalog`  |                 |
//! | POST   | `/api/v1/analyze`  | `AnalyzeRequest`|
//! | POST   | `/api/v1/sweep`    | `SweepRequest`  |
//!
//! Errors always come back as `{"error": {"code", "message", "field"?}}`.

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use refresh_core::analysis::{analyze_request, sweep_request, AnalysisError, AnalyzeRequest, SweepRequest};
use refresh_core::ingest::{Catalog, IngestError};
use refresh_core::lifecycle::LifecycleError;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::future::Future;
use std::sync::Arc;
use tower_http::cors::CorsLayer;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>, field: Option<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
                field: field.filter(|f| !f.is_empty()),
            },
        }
    }

    fn bad_request(message: impl Into<String>, field: Option<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message, field)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.body }))).into_response()
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let message = e.to_string();
        match e {
            AnalysisError::Ingest(IngestError::UnknownId(id)) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_id", message, Some(id))
            }
            AnalysisError::Ingest(IngestError::DanglingReference { missing, .. }) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_id", message, Some(missing))
            }
            AnalysisError::Ingest(IngestError::Validation { field, .. }) => Self::bad_request(message, Some(field)),
            AnalysisError::Lifecycle(LifecycleError::InfeasibleDutyCycle { .. }) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "infeasible_duty_cycle",
                message,
                Some("scenario.comparison_mode".into()),
            ),
            AnalysisError::Lifecycle(LifecycleError::Invalid(v)) | AnalysisError::Invalid(v) => {
                let field = scenario_field(&v.field);
                Self::bad_request(message, Some(field))
            }
            AnalysisError::Lifecycle(LifecycleError::Compose(c)) => Self::bad_request(c.to_string(), None),
            other => Self::bad_request(other.to_string(), None),
        }
    }
}

/// Maps a model field name onto its location in the request body.
fn scenario_field(field: &str) -> String {
    const SCENARIO: [&str; 5] = [
        "renewable_fraction",
        "r_sleep",
        "r_active",
        "horizon_years",
        "renewable_intensity_g_per_kwh",
    ];
    match field {
        "base_intensity_g_per_kwh" => "scenario.grid_intensity_g_per_kwh".into(),
        f if SCENARIO.contains(&f) => format!("scenario.{f}"),
        f => f.to_string(),
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let field = (path != ".").then_some(path);
        ApiError::bad_request(e.into_inner().to_string(), field)
    })?;
    de.end().map_err(|e| ApiError::bad_request(e.to_string(), None))?;
    Ok(value)
}

#[derive(Clone)]
struct AppState {
    catalog: Arc<Catalog>,
    catalog_listing: Arc<Value>,
}

async fn health() -> Json<Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn catalog_listing(State(state): State<AppState>) -> Json<Value> {
    Json((*state.catalog_listing).clone())
}

async fn analyze(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: AnalyzeRequest = parse_body(&body)?;
    let report = analyze_request(&state.catalog, &req)?;
    Ok(Json(report).into_response())
}

async fn sweep(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: SweepRequest = parse_body(&body)?;
    let result = sweep_request(&state.catalog, &req)?;
    Ok(Json(result).into_response())
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint", None)
}

/// Builds the service over an immutable catalog. With `cors_origin` set,
/// cross-origin requests from that origin are allowed; otherwise only
/// same-origin use is possible.
pub fn router(catalog: Catalog, cors_origin: Option<&str>) -> Result<Router, String> {
    let listing: Value = serde_json::from_str(&catalog.to_json()).expect("catalog listing is valid JSON");
    let state = AppState {
        catalog: Arc::new(catalog),
        catalog_listing: Arc::new(listing),
    };
    let mut app = Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/catalog", get(catalog_listing))
        .route("/api/v1/analyze", post(analyze))
        .route("/api/v1/sweep", post(sweep))
        .fallback(not_found)
        .with_state(state);
    if let Some(origin) = cors_origin {
        let origin = HeaderValue::from_str(origin).map_err(|_| format!("invalid CORS origin '{origin}'"))?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

/// Serves `app` on an already-bound listener until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
