use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use subscope_service::{router, AppState, Config};

const HEADER: &str = "title,subscribed,price,downloads,citations,authorships,usage,cpu,cpu_rank,oa_percent,backfile_percent,subject";

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }
}

fn app() -> Router {
    router(AppState::new(Config::default()))
}

async fn send(app: &Router, req: Request<Body>) -> Reply {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post_csv(app: &Router, csv: &str) -> Reply {
    let req = Request::post("/api/v1/sessions")
        .header(header::CONTENT_TYPE, "text/csv")
        .body(Body::from(csv.to_string()))
        .unwrap();
    send(app, req).await
}

async fn patch(app: &Router, uri: &str, body: Value) -> Reply {
    let req = Request::builder()
        .method(Method::PATCH)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await
}

async fn sample_session(app: &Router) -> String {
    let r = send(app, Request::post("/api/v1/sessions?source=sample").body(Body::empty()).unwrap()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    r.json()["id"].as_str().unwrap().to_string()
}

async fn key_of(app: &Router, id: &str, title: &str) -> String {
    let q = title.replace(' ', "%20");
    let hits = get(app, &format!("/api/v1/sessions/{id}/search?q={q}")).await.json();
    hits[0]["key"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn sample_session_has_431_titles() {
    let app = app();
    let r = send(&app, Request::post("/api/v1/sessions?source=sample").body(Body::empty()).unwrap()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let body = r.json();
    assert_eq!(body["n"], 431);
    assert_eq!(body["id"].as_str().unwrap().len(), 32);
    assert_eq!(body["summary"]["total"]["title_count"], 431);
    assert_eq!(body["warnings"], json!([]));
}

#[tokio::test]
async fn json_and_multipart_uploads() {
    let app = app();
    let req = Request::post("/api/v1/sessions")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(r#"{"source":"sample"}"#))
        .unwrap();
    assert_eq!(send(&app, req).await.json()["n"], 431);

    let csv = format!("{HEADER}\nA,TRUE,10,5,0,0,5,2,1,0,0,Physics\n");
    let boundary = "XBOUNDARYX";
    let body = format!(
        "--{boundary}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"a.csv\"\r\nContent-Type: text/csv\r\n\r\n{csv}\r\n--{boundary}--\r\n"
    );
    let req = Request::post("/api/v1/sessions")
        .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={boundary}"))
        .body(Body::from(body))
        .unwrap();
    let r = send(&app, req).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&r.body));
    assert_eq!(r.json()["n"], 1);
}

#[tokio::test]
async fn header_only_upload_is_empty_session() {
    let app = app();
    let r = post_csv(&app, &format!("{HEADER}\n")).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["n"], 0);
}

#[tokio::test]
async fn missing_column_is_400() {
    let app = app();
    let header = HEADER.replace(",price", "");
    let r = post_csv(&app, &format!("{header}\nA,TRUE,1,1,1,111,0.1,1,0,0,Physics\n")).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let body = r.json();
    assert_eq!(body["error"], "missing_required_column");
    assert_eq!(body["detail"]["column"], "price");
}

#[tokio::test]
async fn oversize_upload_is_413() {
    let config = Config {
        max_upload_bytes: 64,
        ..Config::default()
    };
    let app = router(AppState::new(config));
    let r = post_csv(&app, &"x".repeat(200)).await;
    assert_eq!(r.status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn journals_filter_and_page() {
    let app = app();
    let id = sample_session(&app).await;
    let all = get(&app, &format!("/api/v1/sessions/{id}/journals")).await.json();
    assert_eq!(all["total"], 431);
    assert_eq!(all["journals"].as_array().unwrap().len(), 431);
    assert!(all["journals"][0]["metrics"]["cpu_rank"].is_number());

    let page = get(&app, &format!("/api/v1/sessions/{id}/journals?offset=400&limit=50")).await.json();
    assert_eq!(page["journals"].as_array().unwrap().len(), 31);

    let cheap = get(&app, &format!("/api/v1/sessions/{id}/journals?price_max=1000")).await.json();
    let n = cheap["total"].as_u64().unwrap();
    assert!(n > 0 && n < 431);
    assert!(cheap["journals"].as_array().unwrap().iter().all(|j| j["price"].as_f64().unwrap() <= 1000.0));

    let bad = get(&app, &format!("/api/v1/sessions/{id}/journals?price_min=5&price_max=1")).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn patch_moves_dollars() {
    let app = app();
    let id = sample_session(&app).await;
    let key = key_of(&app, &id, "Science Advance").await;
    let before = get(&app, &format!("/api/v1/sessions/{id}/summary")).await.json();
    let r = patch(&app, &format!("/api/v1/sessions/{id}/journals/{key}"), json!({"status": "FALSE"})).await;
    assert_eq!(r.status, StatusCode::OK);
    let after = r.json()["summary"].clone();
    let dollars = |v: &Value| v["package"]["FALSE"]["dollar_total"].as_f64().unwrap();
    assert_eq!(dollars(&after) - dollars(&before), 8000.0);

    // Same status again changes nothing.
    let again = patch(&app, &format!("/api/v1/sessions/{id}/journals/{key}"), json!({"status": "FALSE"})).await;
    assert_eq!(again.json()["summary"]["package"], after["package"]);

    let only = get(&app, &format!("/api/v1/sessions/{id}/journals?statuses=FALSE&price_min=8000&price_max=8000")).await.json();
    assert!(only["journals"].as_array().unwrap().iter().any(|j| j["title"] == "Science Advance"));
}

#[tokio::test]
async fn patch_errors() {
    let app = app();
    let id = sample_session(&app).await;
    let key = key_of(&app, &id, "Science Advance").await;
    let r = patch(&app, &format!("/api/v1/sessions/{id}/journals/{key}"), json!({"status": "YES"})).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    let r = patch(&app, &format!("/api/v1/sessions/{id}/journals/nope"), json!({"status": "TRUE"})).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = patch(&app, &format!("/api/v1/sessions/ffff/journals/{key}"), json!({"status": "TRUE"})).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn charts() {
    let app = app();
    let id = sample_session(&app).await;
    let c1 = get(&app, &format!("/api/v1/sessions/{id}/charts/usage_vs_cost_by_status")).await;
    assert_eq!(c1.status, StatusCode::OK);
    let doc = c1.json();
    assert_eq!(doc["data"]["values"].as_array().unwrap().len(), 431);
    assert!(doc["$schema"].as_str().unwrap().contains("vega-lite"));

    let c10 = get(&app, &format!("/api/v1/sessions/{id}/charts/normalized_if_vs_log_cost")).await.json();
    assert!(c10["data"]["values"].as_array().unwrap().iter().all(|r| r["normalized_if_cost"].is_number()));

    let filtered = get(&app, &format!("/api/v1/sessions/{id}/charts/usage_vs_cost_by_status?usage_max=1000")).await.json();
    assert!(filtered["data"]["values"].as_array().unwrap().len() < 431);

    assert_eq!(get(&app, &format!("/api/v1/sessions/{id}/charts/chart_99")).await.status, StatusCode::NOT_FOUND);

    let catalog = get(&app, "/api/v1/charts/catalog").await.json();
    assert_eq!(catalog.as_array().unwrap().len(), 12);
}

#[tokio::test]
async fn export_after_edit() {
    let app = app();
    let id = sample_session(&app).await;
    let r = get(&app, &format!("/api/v1/sessions/{id}/export")).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body, subscope_core::ingest::SAMPLE_CSV.as_bytes());
    let disposition = r.headers[header::CONTENT_DISPOSITION].to_str().unwrap().to_string();
    let name = disposition.split("filename=\"").nth(1).unwrap().trim_end_matches('"');
    assert_eq!(name.len(), 16);
    assert!(name[..12].chars().all(|c| c.is_ascii_alphanumeric()) && name.ends_with(".csv"));

    let key = key_of(&app, &id, "Scholar Trends").await;
    patch(&app, &format!("/api/v1/sessions/{id}/journals/{key}"), json!({"status": "MAYBE"})).await;
    let edited = get(&app, &format!("/api/v1/sessions/{id}/export")).await.body;
    let a = String::from_utf8(subscope_core::ingest::SAMPLE_CSV.as_bytes().to_vec()).unwrap();
    let b = String::from_utf8(edited).unwrap();
    let changed: Vec<_> = a.lines().zip(b.lines()).filter(|(x, y)| x != y).collect();
    assert_eq!(changed.len(), 1);
    assert!(changed[0].1.contains(",MAYBE,"));
}

#[tokio::test]
async fn bounds_and_search() {
    let app = app();
    let id = sample_session(&app).await;
    let b = get(&app, &format!("/api/v1/sessions/{id}/bounds")).await.json();
    assert_eq!(b["cpu_rank"], json!({"lo": 1.0, "hi": 431.0}));
    let hits = get(&app, &format!("/api/v1/sessions/{id}/search?q=science%20adv")).await.json();
    assert_eq!(hits.as_array().unwrap().len(), 1);
    assert_eq!(hits[0]["title"], "Science Advance");
}

#[tokio::test]
async fn weights_param_recomputes() {
    let app = app();
    let r = send(&app, Request::post("/api/v1/sessions?source=sample&weights=dynamic").body(Body::empty()).unwrap()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["usage_source"]["kind"], "recomputed");
    let r = send(&app, Request::post("/api/v1/sessions?source=sample&weights=1,2").body(Body::empty()).unwrap()).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = app();
    for path in ["summary", "journals", "export", "charts/if_vs_cost", "bounds"] {
        assert_eq!(get(&app, &format!("/api/v1/sessions/abc/{path}")).await.status, StatusCode::NOT_FOUND, "{path}");
    }
}
