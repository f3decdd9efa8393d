use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use gspecies_cli::server::app;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Router, body: Value) -> Value {
    let (s, v) = call(app, "POST", "/api/sessions", Some(body)).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    v
}

fn vertex<'a>(state: &'a Value, label: &str) -> &'a Value {
    state["vertices"].as_array().unwrap().iter().find(|v| v["vertex"] == label).unwrap()
}

#[tokio::test]
async fn c3_session_reaches_the_worked_example() {
    let app = app();
    let s = create(&app, json!({"species": "c3"})).await;
    let id = s["id"].as_str().unwrap().to_string();
    let mut last = Value::Null;
    for k in ["2", "1", "3"] {
        let (st, v) = call(&app, "POST", &format!("/api/sessions/{id}/mutate"), Some(json!({"k": k}))).await;
        assert_eq!(st, StatusCode::OK);
        last = v;
    }
    let v3 = vertex(&last, "3");
    assert_eq!(v3["F_text"], "1 + z3 + z2*z3 + z1*z2*z3");
    assert_eq!(v3["g"], json!([0, 0, -1]));
    assert_eq!(last["history"], json!(["2", "1", "3"]));
}

#[tokio::test]
async fn http_and_cli_agree() {
    let app = app();
    let s = create(&app, json!({"matrix": [[0, -1, 0], [1, 0, -1], [0, 2, 0]], "history": ["2", "1", "3"]})).await;
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_gspecies")).args(["fg", "--matrix", "c3", "--seq", "2,1,3"]).output().unwrap();
    let cli: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["vertices"], cli["vertices"]);
}

#[tokio::test]
async fn mutate_then_undo_restores_initial_state() {
    let app = app();
    for k in [1, 2, 3] {
        let s = create(&app, json!({"species": "c3"})).await;
        let id = s["id"].as_str().unwrap();
        let (st, _) = call(&app, "POST", &format!("/api/sessions/{id}/mutate"), Some(json!({"k": k}))).await;
        assert_eq!(st, StatusCode::OK);
        let (st, back) = call(&app, "POST", &format!("/api/sessions/{id}/undo"), None).await;
        assert_eq!(st, StatusCode::OK);
        assert_eq!(back.to_string(), s.to_string());
        let (_, read) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
        assert_eq!(read.to_string(), s.to_string());
    }
}

#[tokio::test]
async fn replay_of_an_export_is_byte_identical() {
    let app = app();
    let s = create(&app, json!({"species": "rank2"})).await;
    let id = s["id"].as_str().unwrap().to_string();
    let mut state = s;
    for k in ["1", "2", "1", "2"] {
        state = call(&app, "POST", &format!("/api/sessions/{id}/mutate"), Some(json!({"k": k}))).await.1;
    }
    let (_, export) = call(&app, "GET", &format!("/api/sessions/{id}/export"), None).await;
    let mut replay = create(&app, export).await;
    assert_ne!(replay["id"], state["id"]);
    replay["id"] = state["id"].clone();
    assert_eq!(replay.to_string(), state.to_string());
}

#[tokio::test]
async fn degenerate_input_gives_400_with_witness() {
    let app = app();
    // oriented 3-cycle with zero potential: after μ_2 the arrows between 1 and 3 form a 2-cycle
    let sp = json!({
        "vertices": [{"id": "1", "group": []}, {"id": "2", "group": []}, {"id": "3", "group": []}],
        "bimodules": [{"from": "1", "to": "2", "mult": [[1]]}, {"from": "2", "to": "3", "mult": [[1]]}, {"from": "3", "to": "1", "mult": [[1]]}]
    });
    let s = create(&app, json!({"species": sp})).await;
    let id = s["id"].as_str().unwrap();
    let (st, v) = call(&app, "POST", &format!("/api/sessions/{id}/mutate"), Some(json!({"k": "2"}))).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["two_acyclic"], json!([false, true, false]));
    let (st, e) = call(&app, "POST", &format!("/api/sessions/{id}/mutate"), Some(json!({"k": "1"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "NotTwoAcyclicAtK");
    assert!(!e["witness"]["path"].as_array().unwrap().is_empty());
    let (_, after) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    assert_eq!(after, v);
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = app();
    let (st, e) = call(&app, "GET", "/api/sessions/s999", None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
    assert_eq!(e["error"], "UnknownSession");
    let (st, _) = call(&app, "POST", "/api/sessions/nope/mutate", Some(json!({"k": "1"}))).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_requests_are_400() {
    let app = app();
    let (st, _) = call(&app, "POST", "/api/sessions", Some(json!({"species": "/etc/passwd"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let s = create(&app, json!({"species": "c3"})).await;
    let id = s["id"].as_str().unwrap();
    let (st, e) = call(&app, "POST", &format!("/api/sessions/{id}/mutate"), Some(json!({"k": "9"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "IndexOutOfRange");
    let (st, _) = call(&app, "POST", &format!("/api/sessions/{id}/undo"), None).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = app();
    let a = create(&app, json!({"species": "c3"})).await;
    let b = create(&app, json!({"species": "c3"})).await;
    let (ida, idb) = (a["id"].as_str().unwrap(), b["id"].as_str().unwrap());
    let (ua, ub) = (format!("/api/sessions/{ida}/mutate"), format!("/api/sessions/{idb}/mutate"));
    let (f1, f2) = tokio::join!(call(&app, "POST", &ua, Some(json!({"k": "1"}))), call(&app, "POST", &ub, Some(json!({"k": "3"}))));
    assert_eq!(f1.1["history"], json!(["1"]));
    assert_eq!(f2.1["history"], json!(["3"]));
}
