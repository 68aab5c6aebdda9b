//! One editing session: program, canvas, selection and undo history, driven
//! by tool requests.

pub mod protocol;

use std::collections::VecDeque;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use thiserror::Error;

use crate::draw::{self, DrawError, DrawRequest};
use crate::eval::{evaluate, render_svg, Canvas, EvalError, RenderOptions};
use crate::features::{self, features_of};
use crate::group::{self, GroupError};
use crate::little::{parse, unparse, ParseError, Program};
use crate::livesync::{self, SyncError, Zone};
use crate::relate::{self, RelateError};
use protocol::{DragPayload, Envelope, Failure, Reply, Snapshot, ToolRequest};

pub const UNDO_LIMIT: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Relate(#[from] RelateError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Draw(#[from] DrawError),
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error("no feature named {0}")]
    UnknownFeature(String),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("bad request: {0}")]
    BadRequest(String),
}

impl SessionError {
    /// Short machine-readable name, e.g. `UnknownFeature` or `SolverFailed`.
    pub fn code(&self) -> String {
        let inner = match self {
            SessionError::Parse(_) => return "ParseError".into(),
            SessionError::Eval(e) => format!("{e:?}"),
            SessionError::Relate(RelateError::Eval(e)) => format!("{e:?}"),
            SessionError::Relate(e) => format!("{e:?}"),
            SessionError::Group(GroupError::Eval(e)) => format!("{e:?}"),
            SessionError::Group(e) => format!("{e:?}"),
            SessionError::Draw(e) => format!("{e:?}"),
            SessionError::Sync(SyncError::Eval(e)) => format!("{e:?}"),
            SessionError::Sync(e) => format!("{e:?}"),
            other => format!("{other:?}"),
        };
        inner.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
    }
}

/// Program and canvas at the start of the drag in progress.
#[derive(Clone, Debug)]
struct DragStart {
    node_path: Vec<usize>,
    zone: String,
    program: Program,
    canvas: Canvas,
}

#[derive(Clone, Debug)]
pub struct Session {
    program: Program,
    canvas: Canvas,
    selection: Vec<String>,
    undo: VecDeque<Program>,
    show_ghosts: bool,
    drag: Option<DragStart>,
    rng: StdRng,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(0)
    }
}

impl Session {
    /// An empty canvas; `seed` drives the colors of shapes drawn without one.
    pub fn new(seed: u64) -> Self {
        let program = parse("(blobs [])").expect("empty program parses");
        let canvas = evaluate(&program).expect("empty program evaluates");
        Session {
            program,
            canvas,
            selection: Vec::new(),
            undo: VecDeque::new(),
            show_ghosts: false,
            drag: None,
            rng: StdRng::seed_from_u64(seed),
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn canvas(&self) -> &Canvas {
        &self.canvas
    }

    pub fn code(&self) -> String {
        unparse(&self.program)
    }

    pub fn svg(&self) -> String {
        render_svg(&self.canvas, RenderOptions { show_ghosts: self.show_ghosts })
    }

    pub fn selection(&self) -> &[String] {
        &self.selection
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }

    fn snapshot(&self, info: Value) -> Snapshot {
        Snapshot {
            code: self.code(),
            svg: self.svg(),
            features: features_of(&self.canvas),
            lambdas: draw::list_lambda_tools(&self.program),
            selection: self.selection.clone(),
            show_ghosts: self.show_ghosts,
            info,
        }
    }

    fn remember(&mut self, prior: Program) {
        if self.undo.len() == UNDO_LIMIT {
            self.undo.pop_front();
        }
        self.undo.push_back(prior);
    }

    /// Install `next`, keeping the old program for undo. Nothing changes if
    /// `next` does not evaluate.
    fn commit(&mut self, next: Program, keep_selection: bool) -> Result<(), SessionError> {
        let canvas = evaluate(&next)?;
        let prior = std::mem::replace(&mut self.program, next);
        self.canvas = canvas;
        self.remember(prior);
        self.settle_selection(keep_selection);
        Ok(())
    }

    fn settle_selection(&mut self, keep: bool) {
        if keep {
            let all = features_of(&self.canvas);
            self.selection.retain(|id| features::find(&all, id).is_some());
        } else {
            self.selection.clear();
        }
    }

    fn drag(&mut self, d: &DragPayload) -> Result<Value, SessionError> {
        let zone: Zone = d.zone.parse()?;
        let same = self.drag.as_ref().is_some_and(|s| s.node_path == d.node_path && s.zone == d.zone);
        if !same {
            self.drag = Some(DragStart {
                node_path: d.node_path.clone(),
                zone: d.zone.clone(),
                program: self.program.clone(),
                canvas: self.canvas.clone(),
            });
            self.remember(self.program.clone());
        }
        let start = self.drag.as_ref().expect("drag in progress");
        let outcome = livesync::apply_drag(&start.program, &start.canvas, &d.node_path, d.dx, d.dy, zone);
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                if !same {
                    self.undo.pop_back();
                    self.drag = None;
                }
                return Err(e.into());
            }
        };
        self.canvas = evaluate(&outcome.program)?;
        self.program = outcome.program;
        if d.done {
            let start = self.drag.take().expect("drag in progress");
            if start.program == self.program {
                self.undo.pop_back();
            }
        }
        self.settle_selection(true);
        Ok(json!({ "failed": outcome.failed }))
    }

    fn draw_request(&mut self, d: &protocol::DrawPayload) -> DrawRequest {
        let color_seed = d.color_seed.unwrap_or_else(|| self.rng.gen_range(0..501));
        DrawRequest { tool: d.tool.clone(), geometry: d.geometry.clone(), color_seed }
    }

    /// Apply one request. On error the session is left as it was.
    pub fn handle(&mut self, req: &ToolRequest) -> Result<Snapshot, SessionError> {
        use ToolRequest::*;
        if !matches!(req, Drag(_)) {
            self.drag = None;
        }
        let info = match req {
            Load { source } => {
                let p = parse(source)?;
                self.commit(p, false)?;
                Value::Null
            }
            GetCode | GetSvg | ListLambdas | ListFeatures => Value::Null,
            Draw(d) => {
                let r = self.draw_request(d);
                let p = draw::draw_shape(&self.program, &r)?;
                self.commit(p, true)?;
                json!({ "colorSeed": r.color_seed })
            }
            Select { feature_id } => {
                if features::find(&features_of(&self.canvas), feature_id).is_none() {
                    return Err(SessionError::UnknownFeature(feature_id.clone()));
                }
                if !self.selection.contains(feature_id) {
                    self.selection.push(feature_id.clone());
                }
                Value::Null
            }
            Deselect { feature_id } => {
                self.selection.retain(|f| f != feature_id);
                Value::Null
            }
            ClearSelection => {
                self.selection.clear();
                Value::Null
            }
            DigHole => {
                let (p, record) = relate::dig_hole(&self.program, &self.selection)?;
                self.commit(p, false)?;
                serde_json::to_value(record).expect("hole record serializes")
            }
            MakeEqual => {
                let out = relate::make_equal(&self.program, &self.selection)?;
                self.commit(out.program, false)?;
                json!({ "failed": out.failed })
            }
            CleanUp => {
                let p = relate::clean_up(&self.program);
                self.commit(p, true)?;
                Value::Null
            }
            Group { blobs } => {
                let p = group::group(&self.program, blobs)?;
                self.commit(p, false)?;
                Value::Null
            }
            Abstract { blob } => {
                let a = group::abstract_blob(&self.program, *blob)?;
                self.commit(a.program, false)?;
                json!({ "hasBounds": a.has_bounds })
            }
            Duplicate { blob } => {
                let p = group::duplicate(&self.program, *blob)?;
                self.commit(p, false)?;
                Value::Null
            }
            Merge { blobs } => {
                let p = group::merge(&self.program, blobs)?;
                self.commit(p, false)?;
                Value::Null
            }
            Drag(d) => self.drag(d)?,
            SetAttr(edit) => {
                let p = livesync::apply_output_edit(&self.program, &self.canvas, edit)?;
                self.commit(p, true)?;
                Value::Null
            }
            ToggleGhosts => {
                self.show_ghosts = !self.show_ghosts;
                Value::Null
            }
            Undo => {
                let prior = self.undo.pop_back().ok_or(SessionError::NothingToUndo)?;
                match evaluate(&prior) {
                    Ok(c) => {
                        self.canvas = c;
                        self.program = prior;
                        self.settle_selection(false);
                    }
                    Err(e) => {
                        self.undo.push_back(prior);
                        return Err(e.into());
                    }
                }
                Value::Null
            }
        };
        Ok(self.snapshot(info))
    }

    /// Decode, apply and encode one message.
    pub fn handle_envelope(&mut self, env: &Envelope) -> Reply {
        let result = self.handle(&env.request);
        reply(env.id.clone(), result)
    }
}

fn failure(e: &SessionError) -> Failure {
    Failure { error: e.code(), message: e.to_string() }
}

fn reply(id: Value, result: Result<Snapshot, SessionError>) -> Reply {
    match result {
        Ok(s) => Reply { id, ok: true, payload: serde_json::to_value(s).expect("snapshot serializes") },
        Err(e) => Reply { id, ok: false, payload: serde_json::to_value(failure(&e)).expect("failure serializes") },
    }
}

/// Handle one JSON line; malformed input gets an error reply too.
pub fn handle_json(s: &mut Session, line: &str) -> Reply {
    match serde_json::from_str::<Envelope>(line) {
        Ok(env) => s.handle_envelope(&env),
        Err(e) => {
            let id = serde_json::from_str::<Value>(line).ok().and_then(|v| v.get("id").cloned()).unwrap_or(Value::Null);
            reply(id, Err(SessionError::BadRequest(e.to_string())))
        }
    }
}
