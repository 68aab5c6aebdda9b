//! Headless front ends for the engine: script runner, stdin/stdout pipe and
//! the HTTP endpoint used by the browser UI.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::Value;
use sketchlab_core::session::protocol::Reply;
use sketchlab_core::session::{handle_json, Session};
use tower_http::services::ServeDir;

/// Run newline-delimited JSON requests against `s`. Blank lines and lines
/// starting with `#` are skipped. Returns the replies, stopping at the first
/// failure.
pub fn run_script(s: &mut Session, script: &str) -> Result<Vec<Reply>, (usize, Reply)> {
    let mut out = Vec::new();
    for (i, line) in script.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r = handle_json(s, line);
        if !r.ok {
            return Err((i + 1, r));
        }
        out.push(r);
    }
    Ok(out)
}

/// Answer each request line on `input` with one reply line on `output`.
pub fn pipe(s: &mut Session, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = handle_json(s, &line);
        serde_json::to_writer(&mut output, &r)?;
        writeln!(output)?;
        output.flush()?;
    }
    Ok(())
}

/// Independent sessions keyed by the request's `session` field.
#[derive(Clone)]
pub struct Sessions {
    seed: u64,
    map: Arc<Mutex<HashMap<String, Arc<Mutex<Session>>>>>,
}

impl Sessions {
    pub fn new(seed: u64) -> Self {
        Sessions { seed, map: Arc::default() }
    }

    fn get(&self, key: &str) -> Arc<Mutex<Session>> {
        let mut map = self.map.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key.to_string()).or_insert_with(|| Arc::new(Mutex::new(Session::new(self.seed)))).clone()
    }

    /// Route one raw message to its session.
    pub fn handle(&self, body: &Value) -> Reply {
        let key = body.get("session").and_then(Value::as_str).unwrap_or("default");
        let session = self.get(key);
        let mut s = session.lock().unwrap_or_else(|e| e.into_inner());
        handle_json(&mut s, &body.to_string())
    }
}

async fn rpc(State(sessions): State<Sessions>, Json(body): Json<Value>) -> Json<Reply> {
    Json(sessions.handle(&body))
}

/// `/rpc`, `/health`, and the UI's static files when `root` is given.
pub fn router(sessions: Sessions, root: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/rpc", post(rpc))
        .route("/health", get(|| async { "ok" }))
        .with_state(sessions);
    match root {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}
