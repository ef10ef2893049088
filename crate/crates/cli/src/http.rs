//! The `/v1` HTTP service. Request and response bodies are canonical
//! documents.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use imt_core::document::{AssessmentRequest, Document};
use imt_core::model::{NetworkId, Period};

use crate::service::{Project, ServiceError};

type Shared = Arc<Project>;

pub const CONTENT_TYPE: &str = "application/json";

struct Reply(StatusCode, Document);

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        match self.1.to_canonical() {
            Ok(body) => (self.0, [(header::CONTENT_TYPE, CONTENT_TYPE)], body).into_response(),
            Err(e) => ApiError(ServiceError::Document(e)).into_response(),
        }
    }
}

struct ApiError(ServiceError);

impl<E: Into<ServiceError>> From<E> for ApiError {
    fn from(e: E) -> Self {
        ApiError(e.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let code = self.0.code();
        let status = StatusCode::from_u16(code.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = Document::Error(self.0.to_body())
            .to_canonical()
            .unwrap_or_else(|_| format!(r#"{{"body":{{"code":"{}","message":"unprintable error"}},"kind":"error","schema":1}}"#, code.as_str()));
        (status, [(header::CONTENT_TYPE, CONTENT_TYPE)], body).into_response()
    }
}

type Result<T> = std::result::Result<T, ApiError>;

fn period(text: &str) -> Result<Period> {
    text.parse()
        .map_err(|e| ApiError(ServiceError::Invalid(format!("period {text:?}: {e}"))))
}

fn invalid(message: String) -> ApiError {
    ApiError(ServiceError::Invalid(message))
}

/// Runs store and planner work off the async threads.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> std::result::Result<T, ServiceError> + Send + 'static,
) -> Result<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| invalid(format!("worker failed: {e}")))?
        .map_err(ApiError)
}

pub fn router(project: Arc<Project>) -> Router {
    Router::new()
        .route("/v1/networks", get(list_networks).post(create_network))
        .route("/v1/networks/{id}", get(get_network).put(put_network))
        .route(
            "/v1/networks/{id}/indicators/{period}",
            put(put_indicators).get(get_indicators),
        )
        .route(
            "/v1/networks/{id}/assessments/{period}",
            post(post_assessment).get(get_assessment),
        )
        .route("/v1/networks/{id}/series", get(get_series))
        .route("/v1/networks/{id}/plans", post(post_plan))
        .with_state(project)
}

async fn list_networks(State(p): State<Shared>) -> Result<Reply> {
    Ok(Reply(StatusCode::OK, Document::NetworkList(p.store().list_networks())))
}

async fn create_network(State(p): State<Shared>, body: String) -> Result<Reply> {
    let network = Document::parse(&body)?.into_network()?;
    let stored = blocking(move || {
        p.put_network(network.clone(), false)?;
        Ok(p.store().get_network(&network.id)?)
    })
    .await?;
    Ok(Reply(StatusCode::CREATED, Document::Network(stored)))
}

async fn get_network(State(p): State<Shared>, Path(id): Path<String>) -> Result<Reply> {
    let network = p.store().get_network(&NetworkId::new(id))?;
    Ok(Reply(StatusCode::OK, Document::Network(network)))
}

async fn put_network(State(p): State<Shared>, Path(id): Path<String>, body: String) -> Result<Reply> {
    let network = Document::parse(&body)?.into_network()?;
    if network.id.as_str() != id {
        return Err(invalid(format!("document network {} does not match path {id}", network.id)));
    }
    let (stored, created) = blocking(move || {
        let (_, created) = p.put_network(network.clone(), true)?;
        Ok((p.store().get_network(&network.id)?, created))
    })
    .await?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok(Reply(status, Document::Network(stored)))
}

async fn put_indicators(
    State(p): State<Shared>,
    Path((id, period_text)): Path<(String, String)>,
    body: String,
) -> Result<Reply> {
    let files = Document::parse(&body)?.into_indicator_files()?;
    let period = period(&period_text)?;
    if files.network_id.as_str() != id || files.period != period {
        return Err(invalid(format!(
            "document is for {} {}, path names {id} {period}",
            files.network_id, files.period
        )));
    }
    let files = blocking(move || {
        p.put_indicator_files(&files)?;
        Ok(files)
    })
    .await?;
    Ok(Reply(StatusCode::OK, Document::IndicatorFiles(files)))
}

async fn get_indicators(State(p): State<Shared>, Path((id, period_text)): Path<(String, String)>) -> Result<Reply> {
    let period = period(&period_text)?;
    let files = blocking(move || p.indicator_files(&NetworkId::new(id), &period)).await?;
    Ok(Reply(StatusCode::OK, Document::IndicatorFiles(files)))
}

async fn post_assessment(
    State(p): State<Shared>,
    Path((id, period_text)): Path<(String, String)>,
    body: String,
) -> Result<Reply> {
    let period = period(&period_text)?;
    let request = if body.trim().is_empty() {
        AssessmentRequest::default()
    } else {
        Document::parse(&body)?.into_assessment_request()?
    };
    let status = if request.dry_run { StatusCode::OK } else { StatusCode::CREATED };
    let assessment = blocking(move || p.assess(&NetworkId::new(id), period, &request)).await?;
    Ok(Reply(status, Document::Assessment(assessment)))
}

async fn get_assessment(State(p): State<Shared>, Path((id, period_text)): Path<(String, String)>) -> Result<Reply> {
    let period = period(&period_text)?;
    let assessment = p.store().get_assessment(&NetworkId::new(id), &period)?;
    Ok(Reply(StatusCode::OK, Document::Assessment(assessment)))
}

async fn get_series(
    State(p): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Reply> {
    let from = query.get("from").map(|t| period(t)).transpose()?;
    let to = query.get("to").map(|t| period(t)).transpose()?;
    let epsilon = match query.get("epsilon") {
        Some(t) => t.parse().map_err(|_| invalid(format!("epsilon {t:?} is not a number")))?,
        None => 0.0,
    };
    let report = p.series(&NetworkId::new(id), from, to, epsilon)?;
    Ok(Reply(StatusCode::OK, Document::Series(report)))
}

/// Sets the flag when dropped. The handler future is dropped when the
/// client goes away, which stops the planner.
struct CancelOnDrop(Arc<AtomicBool>);

impl Drop for CancelOnDrop {
    fn drop(&mut self) {
        self.0.store(true, Ordering::Relaxed);
    }
}

async fn post_plan(State(p): State<Shared>, Path(id): Path<String>, body: String) -> Result<Reply> {
    let request = Document::parse(&body)?.into_plan_request()?;
    let cancel = Arc::new(AtomicBool::new(false));
    let _guard = CancelOnDrop(Arc::clone(&cancel));
    let plan = blocking(move || p.plan(&NetworkId::new(id), &request, &cancel)).await?;
    Ok(Reply(StatusCode::CREATED, Document::Plan(plan)))
}

/// Serves until interrupted.
pub async fn serve(project: Arc<Project>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(project))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
