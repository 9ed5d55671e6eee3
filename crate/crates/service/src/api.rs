use std::sync::Arc;

use axum::body::{to_bytes, Bytes};
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use subscope_core::charts::{build, chart_catalog, ChartId, ChartOptions};
use subscope_core::decisions::{export_csv, find_journal, summarize, SubscribedStatus};
use subscope_core::filters::{apply, slider_bounds, FilterError, FilterSpec};
use subscope_core::ingest::{load_sample, parse_export, validate_package, Package};
use subscope_core::metrics::WeightSetting;

use crate::error::ApiError;
use crate::session::{Session, Snapshot};
use crate::AppState;

pub const DEFAULT_PAGE_LIMIT: usize = 1000;

pub fn routes() -> Router<AppState> {
    Router::new()
        .route("/api/v1/sessions", post(create_session))
        .route("/api/v1/sessions/{id}/summary", get(summary))
        .route("/api/v1/sessions/{id}/journals", get(journals))
        .route("/api/v1/sessions/{id}/journals/{key}", patch(patch_status))
        .route("/api/v1/sessions/{id}/charts/{chart_id}", get(chart))
        .route("/api/v1/sessions/{id}/export", get(export))
        .route("/api/v1/sessions/{id}/bounds", get(bounds))
        .route("/api/v1/sessions/{id}/search", get(search))
        .route("/api/v1/charts/catalog", get(catalog))
}

type Pairs = Query<Vec<(String, String)>>;

fn session(app: &AppState, id: &str) -> Result<Arc<Session>, ApiError> {
    app.store.get(id).ok_or(ApiError::SessionNotFound)
}

fn filter_spec(pairs: &[(String, String)]) -> Result<FilterSpec, ApiError> {
    Ok(FilterSpec::from_query_pairs(pairs.iter().map(|(k, v)| (k, v)))?)
}

fn param<'a>(pairs: &'a [(String, String)], name: &str) -> Option<&'a str> {
    pairs.iter().rev().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
}

fn parsed<T: std::str::FromStr>(pairs: &[(String, String)], name: &str) -> Result<Option<T>, ApiError> {
    param(pairs, name)
        .map(|v| {
            v.trim().parse().map_err(|_| {
                ApiError::Filter(FilterError::InvalidParameter {
                    name: name.to_string(),
                    value: v.to_string(),
                })
            })
        })
        .transpose()
}

#[derive(Debug, Deserialize)]
struct SampleRequest {
    source: String,
}

async fn read_upload(app: &AppState, pairs: &[(String, String)], req: Request) -> Result<Package, ApiError> {
    let limit = app.config.max_upload_bytes;
    if param(pairs, "source") == Some("sample") {
        return Ok(load_sample());
    }
    let declared = req
        .headers()
        .get(header::CONTENT_LENGTH)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<usize>().ok());
    if declared.is_some_and(|n| n > limit) {
        return Err(ApiError::PayloadTooLarge(limit));
    }
    let content_type = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_ascii_lowercase();

    if content_type.starts_with("multipart/form-data") {
        let mut multipart = Multipart::from_request(req, &())
            .await
            .map_err(|e| ApiError::BadRequest(e.body_text()))?;
        let too_large = |status: StatusCode, text: String| {
            if status == StatusCode::PAYLOAD_TOO_LARGE {
                ApiError::PayloadTooLarge(limit)
            } else {
                ApiError::BadRequest(text)
            }
        };
        while let Some(field) = multipart.next_field().await.map_err(|e| too_large(e.status(), e.body_text()))? {
            let is_file = field.file_name().is_some() || field.name() == Some("file");
            let name = field.name().map(str::to_string);
            let bytes = field.bytes().await.map_err(|e| too_large(e.status(), e.body_text()))?;
            if is_file {
                return Ok(parse_export(&bytes)?);
            }
            if name.as_deref() == Some("source") && bytes.as_ref() == b"sample" {
                return Ok(load_sample());
            }
        }
        return Err(ApiError::BadRequest("multipart body has no file field".into()));
    }

    let body: Bytes = to_bytes(req.into_body(), limit)
        .await
        .map_err(|_| ApiError::PayloadTooLarge(limit))?;
    if content_type.starts_with("application/json") {
        let request: SampleRequest =
            serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
        if request.source == "sample" {
            return Ok(load_sample());
        }
        return Err(ApiError::BadRequest(format!("unknown source `{}`", request.source)));
    }
    if body.is_empty() {
        return Err(ApiError::BadRequest("empty body; send a CSV or use ?source=sample".into()));
    }
    Ok(parse_export(&body)?)
}

async fn create_session(
    State(app): State<AppState>,
    Query(pairs): Pairs,
    req: Request,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let package = read_upload(&app, &pairs, req).await?;
    let setting = match param(&pairs, "weights") {
        Some(w) => w.parse::<WeightSetting>()?,
        None => app.config.default_weights,
    };
    let source = setting.resolve(&package)?;
    let report = validate_package(&package);
    let session = app.store.create(package, source)?;
    let snap = session.snapshot();
    let analysis = &snap.analysis;
    tracing::info!(id = %session.id, n = analysis.package().len(), "session created");
    let body = json!({
        "id": session.id,
        "n": analysis.package().len(),
        "usage_source": analysis.source(),
        "warnings": report.warnings,
        "summary": summarize(analysis.package().records()),
    });
    Ok((StatusCode::CREATED, Json(body)))
}

fn view_summary(snap: &Snapshot, spec: &FilterSpec) -> Result<Value, ApiError> {
    let analysis = &snap.analysis;
    let view = apply(analysis, spec)?;
    Ok(json!({
        "n": analysis.package().len(),
        "view_n": view.len(),
        "package": summarize(analysis.package().records()),
        "view": view.summary(),
        "total_weighted_usage": analysis.metrics().total_weighted_usage,
        "package_if_percent": analysis.metrics().package_if_percent,
        "usage_source": analysis.source(),
        "edits": snap.edits.len(),
    }))
}

async fn summary(State(app): State<AppState>, Path(id): Path<String>, Query(pairs): Pairs) -> Result<Json<Value>, ApiError> {
    let snap = session(&app, &id)?.snapshot();
    let spec = filter_spec(&pairs)?;
    Ok(Json(view_summary(&snap, &spec)?))
}

async fn journals(State(app): State<AppState>, Path(id): Path<String>, Query(pairs): Pairs) -> Result<Json<Value>, ApiError> {
    let snap = session(&app, &id)?.snapshot();
    let spec = filter_spec(&pairs)?;
    let offset: usize = parsed(&pairs, "offset")?.unwrap_or(0);
    let limit: usize = parsed(&pairs, "limit")?.unwrap_or(DEFAULT_PAGE_LIMIT);
    let view = apply(&snap.analysis, &spec)?;
    let page: Vec<Value> = view
        .iter()
        .skip(offset)
        .take(limit)
        .map(|(record, metrics)| {
            let mut row = serde_json::to_value(record).expect("records serialize");
            row["metrics"] = serde_json::to_value(metrics).expect("metrics serialize");
            row
        })
        .collect();
    Ok(Json(json!({
        "total": view.len(),
        "offset": offset,
        "limit": limit,
        "journals": page,
    })))
}

#[derive(Debug, Deserialize)]
struct PatchBody {
    status: String,
}

async fn patch_status(
    State(app): State<AppState>,
    Path((id, key)): Path<(String, String)>,
    Query(pairs): Pairs,
    Json(body): Json<PatchBody>,
) -> Result<Json<Value>, ApiError> {
    let session = session(&app, &id)?;
    let status: SubscribedStatus = body.status.parse().map_err(|_| ApiError::InvalidStatus(body.status.clone()))?;
    let spec = filter_spec(&pairs)?;
    let (snap, entry) = session.set_status(&key, status)?;
    Ok(Json(json!({
        "edit": entry,
        "summary": view_summary(&snap, &spec)?,
    })))
}

async fn chart(
    State(app): State<AppState>,
    Path((id, chart_id)): Path<(String, String)>,
    Query(pairs): Pairs,
) -> Result<Response, ApiError> {
    let snap = session(&app, &id)?.snapshot();
    let chart_id: ChartId = chart_id.parse()?;
    let spec = filter_spec(&pairs)?;
    let defaults = ChartOptions::default();
    let options = ChartOptions {
        authorship_bins: parsed(&pairs, "authorship_bins")?.unwrap_or(defaults.authorship_bins).max(1),
        cpu_bins: parsed(&pairs, "cpu_bins")?.unwrap_or(defaults.cpu_bins).max(1),
    };
    let view = apply(&snap.analysis, &spec)?;
    Ok(Json(build(&view, chart_id, &options)).into_response())
}

async fn export(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = session(&app, &id)?.snapshot();
    let (name, bytes) = export_csv(snap.analysis.package());
    let mut headers = HeaderMap::new();
    headers.insert(header::CONTENT_TYPE, "text/csv; charset=utf-8".parse().expect("static"));
    headers.insert(
        header::CONTENT_DISPOSITION,
        format!("attachment; filename=\"{name}\"").parse().expect("alphanumeric name"),
    );
    Ok((headers, bytes).into_response())
}

async fn bounds(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let snap = session(&app, &id)?.snapshot();
    let bounds = match slider_bounds(&snap.analysis) {
        Ok(b) => b,
        Err(FilterError::EmptyPackage) => return Ok(Json(json!({}))),
        Err(e) => return Err(e.into()),
    };
    let map: serde_json::Map<String, Value> = bounds
        .iter()
        .map(|(metric, r)| (metric.name().to_string(), json!({ "lo": r.lo, "hi": r.hi })))
        .collect();
    Ok(Json(Value::Object(map)))
}

async fn search(State(app): State<AppState>, Path(id): Path<String>, Query(pairs): Pairs) -> Result<Json<Value>, ApiError> {
    let snap = session(&app, &id)?.snapshot();
    let q = param(&pairs, "q").unwrap_or("");
    let hits: Vec<Value> = find_journal(snap.analysis.package(), q)
        .into_iter()
        .take(50)
        .map(|(key, title)| json!({ "key": key, "title": title }))
        .collect();
    Ok(Json(Value::Array(hits)))
}

async fn catalog() -> Json<Value> {
    Json(json!(chart_catalog()))
}
