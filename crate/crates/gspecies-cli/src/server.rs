//! In-memory mutation sessions over HTTP. A session's state is a function of its initial GSP
//! and its history, so replaying a history reproduces the state byte for byte.

use crate::commands::fg_cmd;
use crate::input::{gsp_of_matrix, load_gsp, parse_vertex, BUILTINS};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gspecies::fixtures::DEFAULT_TRUNC;
use gspecies::gsp::Gsp;
use gspecies::json::{gsp_from_json, gsp_to_json, matrix_from_json, matrix_to_json, species_to_json};
use gspecies::mutation::mutate;
use gspecies::{GspError, Result};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use tokio::sync::Mutex;

pub struct Session {
    /// `stack[0]` is the initial GSP; `stack[i]` follows `history[..i]`.
    stack: Vec<Gsp>,
    history: Vec<usize>,
}

impl Session {
    pub fn new(initial: Gsp) -> Self {
        Session { stack: vec![initial], history: vec![] }
    }

    pub fn initial(&self) -> &Gsp {
        &self.stack[0]
    }

    pub fn current(&self) -> &Gsp {
        self.stack.last().expect("stack is never empty")
    }

    pub fn mutate(&mut self, k: usize) -> Result<()> {
        let next = mutate(self.current(), k)?.reduced().clone();
        self.stack.push(next);
        self.history.push(k);
        Ok(())
    }

    pub fn undo(&mut self) -> Result<()> {
        if self.history.is_empty() {
            return Err(GspError::Invalid("nothing to undo".into()));
        }
        self.history.pop();
        self.stack.pop();
        Ok(())
    }

    pub fn state(&self, id: &str) -> Value {
        let g = self.current();
        let labels = &g.labels;
        let sp = g.species();
        let b = sp.exchange_matrix().ok();
        let fg = self.initial().species().exchange_matrix().ok().and_then(|b0| fg_cmd(&b0, &self.history, None, false).ok());
        let n = labels.len();
        let nodes: Vec<Value> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                let r = |x: f64| (x * 1000.0).round() / 1000.0;
                json!({"id": labels[i], "group": sp.groups[i].factors, "order": sp.groups[i].order(), "x": r(t.cos()), "y": r(t.sin())})
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let total: u32 = sp.mult[i][j].iter().flatten().sum();
                if total > 0 {
                    let val = b.as_ref().map(|b| json!([b.get(j, i).abs(), b.get(i, j).abs()]));
                    edges.push(json!({"from": labels[i], "to": labels[j], "mult": total, "valuation": val}));
                }
            }
        }
        json!({
            "id": id,
            "history": self.history.iter().map(|&k| labels[k].clone()).collect::<Vec<_>>(),
            "species": species_to_json(&sp),
            "b_matrix": b.as_ref().map(matrix_to_json),
            "two_acyclic": (0..n).map(|k| g.is_2_acyclic_at(k)).collect::<Vec<_>>(),
            "vertices": fg.map(|v| v["vertices"].clone()),
            "layout": {"nodes": nodes, "edges": edges},
        })
    }

    pub fn export(&self) -> Value {
        json!({
            "species": gsp_to_json(self.initial()),
            "history": self.history.iter().map(|&k| self.initial().labels[k].clone()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next: AtomicU64,
}

pub fn app() -> Router {
    Router::new()
        .route("/api/sessions", post(create))
        .route("/api/sessions/:id", get(read))
        .route("/api/sessions/:id/mutate", post(mutate_at))
        .route("/api/sessions/:id/undo", post(undo))
        .route("/api/sessions/:id/export", get(export))
        .with_state(Arc::new(AppState::default()))
}

pub async fn serve(host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    axum::serve(listener, app()).await
}

pub enum ApiError {
    Domain(GspError),
    UnknownSession(String),
}

impl From<GspError> for ApiError {
    fn from(e: GspError) -> Self {
        ApiError::Domain(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::Domain(e) => (StatusCode::BAD_REQUEST, Json(e.to_json())).into_response(),
            ApiError::UnknownSession(id) => (StatusCode::NOT_FOUND, Json(json!({"error": "UnknownSession", "witness": {"id": id}}))).into_response(),
        }
    }
}

/// Only built-in names are accepted as strings; the service never reads files.
fn initial_gsp(body: &Value) -> Result<Gsp> {
    let trunc = body.get("N").and_then(Value::as_u64).map(|n| n as usize);
    let named = |v: &Value| -> Option<Result<Gsp>> {
        let s = v.as_str()?;
        Some(if BUILTINS.contains(&s) { load_gsp(s, trunc) } else { Err(GspError::Invalid(format!("unknown example {s}"))) })
    };
    if let Some(sp) = body.get("species") {
        if let Some(g) = named(sp) {
            return g;
        }
        return gsp_from_json(sp, trunc.unwrap_or(DEFAULT_TRUNC));
    }
    if let Some(m) = body.get("matrix") {
        if let Some(g) = named(m) {
            return g;
        }
        let m = if m.is_array() { json!({"rows": m}) } else { m.clone() };
        return gsp_of_matrix(&matrix_from_json(&m)?, trunc.unwrap_or(DEFAULT_TRUNC));
    }
    Err(GspError::Invalid("body needs \"species\" or \"matrix\"".into()))
}

fn vertex_arg(v: &Value, labels: &[String]) -> Result<usize> {
    match v {
        Value::String(s) => parse_vertex(s, labels),
        Value::Number(n) => parse_vertex(&n.to_string(), labels),
        _ => Err(GspError::Invalid("\"k\" must be a vertex label".into())),
    }
}

fn lookup(state: &AppState, id: &str) -> std::result::Result<Arc<Mutex<Session>>, ApiError> {
    state.sessions.read().expect("session map lock").get(id).cloned().ok_or_else(|| ApiError::UnknownSession(id.to_string()))
}

async fn create(State(state): State<Arc<AppState>>, Json(body): Json<Value>) -> std::result::Result<Json<Value>, ApiError> {
    let mut s = Session::new(initial_gsp(&body)?);
    if let Some(h) = body.get("history") {
        let h = h.as_array().ok_or_else(|| GspError::Invalid("\"history\" must be an array".into()))?;
        for k in h {
            let k = vertex_arg(k, &s.current().labels)?;
            s.mutate(k)?;
        }
    }
    let id = format!("s{}", state.next.fetch_add(1, Ordering::SeqCst) + 1);
    let out = s.state(&id);
    state.sessions.write().expect("session map lock").insert(id, Arc::new(Mutex::new(s)));
    Ok(Json(out))
}

async fn read(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> std::result::Result<Json<Value>, ApiError> {
    let s = lookup(&state, &id)?;
    let s = s.lock().await;
    Ok(Json(s.state(&id)))
}

async fn mutate_at(State(state): State<Arc<AppState>>, Path(id): Path<String>, Json(body): Json<Value>) -> std::result::Result<Json<Value>, ApiError> {
    let s = lookup(&state, &id)?;
    let mut s = s.lock().await;
    let k = vertex_arg(body.get("k").unwrap_or(&Value::Null), &s.current().labels)?;
    s.mutate(k)?;
    Ok(Json(s.state(&id)))
}

async fn undo(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> std::result::Result<Json<Value>, ApiError> {
    let s = lookup(&state, &id)?;
    let mut s = s.lock().await;
    s.undo()?;
    Ok(Json(s.state(&id)))
}

async fn export(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> std::result::Result<Json<Value>, ApiError> {
    let s = lookup(&state, &id)?;
    let s = s.lock().await;
    Ok(Json(s.export()))
}
