use std::fs;
use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use imt::http::router;
use imt::Project;
use imt_core::document::{AssessmentRequest, Document, IndicatorFiles, PlanRequest};
use imt_core::model::{CollaborationNetwork, Period};
use tower::ServiceExt;

const NETWORK: &str = "public-accounting";

fn fixture(rest: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/public-accounting").join(rest);
    fs::read_to_string(path).unwrap()
}

fn network(quarter: &str) -> CollaborationNetwork {
    Document::parse(&fixture(&format!("quarters/{quarter}/network.json")))
        .unwrap()
        .into_network()
        .unwrap()
}

fn files(quarter: &str) -> Document {
    Document::IndicatorFiles(IndicatorFiles {
        network_id: NETWORK.into(),
        period: quarter.parse::<Period>().unwrap(),
        probes: fixture(&format!("quarters/{quarter}/probes.csv")),
        survey: fixture(&format!("quarters/{quarter}/survey.csv")),
    })
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Document>) -> (StatusCode, String) {
    let body = body.map_or(String::new(), |d| d.to_canonical().unwrap());
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    assert_eq!(response.headers()[header::CONTENT_TYPE], "application/json");
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn error_code(body: &str) -> String {
    Document::parse(body).unwrap().into_error().unwrap().code
}

async fn app_with(quarters: &[&str]) -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(Project::open(dir.path()).unwrap()));
    let (status, _) = call(&app, Method::POST, "/v1/networks", Some(Document::Network(network("2010-Q1")))).await;
    assert_eq!(status, StatusCode::CREATED);
    for q in quarters {
        let uri = format!("/v1/networks/{NETWORK}");
        call(&app, Method::PUT, &uri, Some(Document::Network(network(q)))).await;
        let uri = format!("/v1/networks/{NETWORK}/indicators/{q}");
        let (status, body) = call(&app, Method::PUT, &uri, Some(files(q))).await;
        assert_eq!(status, StatusCode::OK, "{body}");
    }
    (dir, app)
}

#[tokio::test]
async fn networks_are_created_once() {
    let (_dir, app) = app_with(&[]).await;
    let (status, body) = call(&app, Method::POST, "/v1/networks", Some(Document::Network(network("2010-Q1")))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&body), "conflict");

    let (status, body) = call(&app, Method::GET, "/v1/networks", None).await;
    assert_eq!(status, StatusCode::OK);
    match Document::parse(&body).unwrap() {
        Document::NetworkList(list) => assert_eq!(list.len(), 1),
        other => panic!("{other:?}"),
    }
    let (status, _) = call(&app, Method::GET, "/v1/networks/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = call(&app, Method::PUT, "/v1/networks/other", Some(Document::Network(network("2010-Q1")))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn assessments_and_series() {
    let (_dir, app) = app_with(&["2010-Q1", "2010-Q2"]).await;
    let (status, body) = call(&app, Method::GET, &format!("/v1/networks/{NETWORK}/series"), None).await;
    assert_eq!(status, StatusCode::OK);
    let empty = Document::parse(&body).unwrap().into_series().unwrap();
    assert!(empty.series.entries.is_empty() && empty.deltas.is_empty());

    for q in ["2010-Q1", "2010-Q2"] {
        let uri = format!("/v1/networks/{NETWORK}/assessments/{q}");
        let (status, body) = call(&app, Method::POST, &uri, None).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        let (status, again) = call(&app, Method::GET, &uri, None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body, again);
        let (status, body) = call(&app, Method::POST, &uri, None).await;
        assert_eq!(status, StatusCode::CONFLICT);
        assert_eq!(error_code(&body), "conflict");
    }

    let (status, body) = call(&app, Method::GET, &format!("/v1/networks/{NETWORK}/series?epsilon=0.01"), None).await;
    assert_eq!(status, StatusCode::OK);
    let report = Document::parse(&body).unwrap().into_series().unwrap();
    assert_eq!(report.series.entries.len(), 2);
    assert_eq!(report.deltas.len(), 1);
    assert!(!report.deltas[0].regression);

    let (status, _) = call(&app, Method::GET, &format!("/v1/networks/{NETWORK}/series?from=bogus"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn dry_run_stores_nothing() {
    let (_dir, app) = app_with(&["2010-Q3"]).await;
    let uri = format!("/v1/networks/{NETWORK}/assessments/2010-Q3");
    let request = AssessmentRequest {
        dry_run: true,
        network: Some(network("2010-Q4")),
        ..Default::default()
    };
    let (status, body) = call(&app, Method::POST, &uri, Some(Document::AssessmentRequest(request))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let preview = Document::parse(&body).unwrap().into_assessment().unwrap();
    assert_eq!(preview.version, 0);
    let (status, _) = call(&app, Method::GET, &uri, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn missing_indicator_files_name_the_step() {
    let (_dir, app) = app_with(&[]).await;
    let uri = format!("/v1/networks/{NETWORK}/assessments/2010-Q1");
    let (status, body) = call(&app, Method::POST, &uri, None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let error = Document::parse(&body).unwrap().into_error().unwrap();
    assert_eq!(error.step, Some(4));
}

#[tokio::test]
async fn plans_and_infeasible_targets() {
    let (_dir, app) = app_with(&["2010-Q4"]).await;
    call(&app, Method::POST, &format!("/v1/networks/{NETWORK}/assessments/2010-Q4"), None).await;
    let catalog = Document::parse(&fixture("catalog.json")).unwrap().into_catalog().unwrap();
    let uri = format!("/v1/networks/{NETWORK}/plans");

    let request = PlanRequest {
        catalog: catalog.clone(),
        target: 0.9,
        config: None,
    };
    let (status, body) = call(&app, Method::POST, &uri, Some(Document::PlanRequest(request))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let plan = Document::parse(&body).unwrap().into_plan().unwrap();
    assert!(plan.projected.ratlop >= 0.9);

    let request = PlanRequest {
        catalog,
        target: 0.99,
        config: None,
    };
    let (status, body) = call(&app, Method::POST, &uri, Some(Document::PlanRequest(request))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let error = Document::parse(&body).unwrap().into_error().unwrap();
    assert_eq!(error.code, "infeasible");
    let best = error.max_achievable.expect("max_achievable");
    assert!(best.ratlop < 0.99);

    let (status, _) = call(&app, Method::POST, &uri, None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}
