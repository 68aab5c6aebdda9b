//! JSON messages shared by the HTTP endpoint, pipe mode and scripts.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::draw::Tool;
use crate::features::Feature;
use crate::livesync::AttrEdit;

/// A drawing request as it arrives on the wire; the seed is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DrawPayload {
    #[serde(flatten)]
    pub tool: Tool,
    pub geometry: Vec<[f64; 2]>,
    #[serde(default)]
    pub color_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DragPayload {
    pub node_path: Vec<usize>,
    pub zone: String,
    pub dx: f64,
    pub dy: f64,
    /// Ends the drag; later drags start from the program as it is then.
    #[serde(default)]
    pub done: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "camelCase")]
pub enum ToolRequest {
    Load { source: String },
    GetCode,
    GetSvg,
    Draw(DrawPayload),
    ListLambdas,
    #[serde(rename_all = "camelCase")]
    Select { feature_id: String },
    #[serde(rename_all = "camelCase")]
    Deselect { feature_id: String },
    ClearSelection,
    DigHole,
    MakeEqual,
    CleanUp,
    Group { blobs: Vec<usize> },
    Abstract { blob: usize },
    Duplicate { blob: usize },
    Merge { blobs: Vec<usize> },
    Drag(DragPayload),
    SetAttr(AttrEdit),
    ToggleGhosts,
    Undo,
    ListFeatures,
}

impl ToolRequest {
    /// Every request kind, as spelled on the wire.
    pub const KINDS: &'static [&'static str] = &[
        "load",
        "getCode",
        "getSvg",
        "draw",
        "listLambdas",
        "select",
        "deselect",
        "clearSelection",
        "digHole",
        "makeEqual",
        "cleanUp",
        "group",
        "abstract",
        "duplicate",
        "merge",
        "drag",
        "setAttr",
        "toggleGhosts",
        "undo",
        "listFeatures",
    ];

    pub fn kind(&self) -> &'static str {
        use ToolRequest::*;
        let i = match self {
            Load { .. } => 0,
            GetCode => 1,
            GetSvg => 2,
            Draw(_) => 3,
            ListLambdas => 4,
            Select { .. } => 5,
            Deselect { .. } => 6,
            ClearSelection => 7,
            DigHole => 8,
            MakeEqual => 9,
            CleanUp => 10,
            Group { .. } => 11,
            Abstract { .. } => 12,
            Duplicate { .. } => 13,
            Merge { .. } => 14,
            Drag(_) => 15,
            SetAttr(_) => 16,
            ToggleGhosts => 17,
            Undo => 18,
            ListFeatures => 19,
        };
        Self::KINDS[i]
    }
}

/// `{id, session?, kind, payload}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(default)]
    pub id: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
    #[serde(flatten)]
    pub request: ToolRequest,
}

/// State reported after every successful request.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub code: String,
    pub svg: String,
    pub features: Vec<Feature>,
    pub lambdas: Vec<String>,
    pub selection: Vec<String>,
    pub show_ghosts: bool,
    /// Request-specific extras such as a hole record or failed attributes.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub info: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub error: String,
    pub message: String,
}

/// `{id, ok, payload}`.
#[derive(Clone, Debug, Serialize)]
pub struct Reply {
    pub id: Value,
    pub ok: bool,
    pub payload: Value,
}
