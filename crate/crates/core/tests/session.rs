mod common;

use common::corpus::CORPUS;
use common::norm::normalize;
use serde_json::{json, Value};
use sketchlab_core::little::{parse, unparse};
use sketchlab_core::session::protocol::{Envelope, ToolRequest};
use sketchlab_core::session::{handle_json, Session, UNDO_LIMIT};

const FIG1: &str = include_str!("corpus/logo_v1.little");
const FIG2: &str = include_str!("golden/fig2.little");

const OVERVIEW: &[(&str, &str)] = &[
    ("rect1/BR", "line2/p2"),
    ("rect1/TL", "line2/p1"),
    ("rect1/BL", "line3/p1"),
    ("rect1/boxC", "line3/p2"),
    ("line2/width", "line3/width"),
    ("line2/color", "line3/color"),
];

fn call(s: &mut Session, kind: &str, payload: Value) -> Value {
    let line = json!({ "id": 7, "kind": kind, "payload": payload }).to_string();
    serde_json::to_value(handle_json(s, &line)).unwrap()
}

fn ok(s: &mut Session, kind: &str, payload: Value) -> Value {
    let r = call(s, kind, payload);
    assert_eq!(r["ok"], true, "{kind}: {r}");
    r["payload"].clone()
}

fn loaded(src: &str) -> Session {
    let mut s = Session::new(1);
    ok(&mut s, "load", json!({ "source": src }));
    s
}

fn select(s: &mut Session, ids: &[&str]) {
    for id in ids {
        ok(s, "select", json!({ "featureId": id }));
    }
}

#[test]
fn load_then_svg_draws_three_shapes() {
    let mut s = loaded(FIG1);
    let svg = ok(&mut s, "getSvg", Value::Null)["svg"].as_str().unwrap().to_string();
    let elements = svg.lines().filter(|l| l.trim_start().starts_with('<') && !l.contains("svg")).count();
    assert_eq!(elements, 3, "{svg}");
    assert_eq!(ok(&mut s, "getCode", Value::Null)["code"], FIG1);
}

#[test]
fn overview_relations_reach_fig2_and_undo_steps_back() {
    let mut s = loaded(FIG1);
    let mut history = vec![s.code()];
    for (a, b) in OVERVIEW {
        select(&mut s, &[a, b]);
        let r = ok(&mut s, "makeEqual", Value::Null);
        assert_eq!(r["selection"], json!([]));
        history.push(s.code());
    }
    assert_eq!(normalize(&s.code()), normalize(FIG2));
    while let Some(expected) = history.pop() {
        assert_eq!(s.code(), expected);
        if history.is_empty() {
            break;
        }
        ok(&mut s, "undo", Value::Null);
    }
}

#[test]
fn failed_requests_leave_the_session_alone() {
    let mut s = loaded(FIG1);
    select(&mut s, &["rect1/TL"]);
    let before = (s.code(), s.undo_depth(), s.selection().to_vec());
    let r = call(&mut s, "makeEqual", Value::Null);
    assert_eq!(r["ok"], false);
    assert_eq!(r["id"], 7);
    assert_eq!(r["payload"]["error"], "TooFewFeatures");
    assert_eq!((s.code(), s.undo_depth(), s.selection().to_vec()), before);

    let r = call(&mut s, "load", json!({ "source": "(def x" }));
    assert_eq!(r["payload"]["error"], "ParseError");
    let r = call(&mut s, "select", json!({ "featureId": "nope/left" }));
    assert_eq!(r["payload"]["error"], "UnknownFeature");
    let r = call(&mut s, "group", json!({ "blobs": [0, 9] }));
    assert_eq!(r["payload"]["error"], "UnknownBlob");
    let r = call(&mut s, "drag", json!({ "nodePath": [0], "zone": "middle", "dx": 1, "dy": 1 }));
    assert_eq!(r["payload"]["error"], "BadZone");
    assert_eq!((s.code(), s.undo_depth()), (before.0, before.1));
}

#[test]
fn malformed_messages_get_error_replies() {
    let mut s = Session::default();
    let r = serde_json::to_value(handle_json(&mut s, r#"{"id": 3, "kind": "fly"}"#)).unwrap();
    assert_eq!((r["id"].clone(), r["ok"].clone()), (json!(3), json!(false)));
    assert_eq!(r["payload"]["error"], "BadRequest");
    let r = serde_json::to_value(handle_json(&mut s, "not json")).unwrap();
    assert_eq!(r["ok"], false);
}

#[test]
fn selection_is_ordered_and_unique() {
    let mut s = loaded(FIG1);
    select(&mut s, &["line2/p1", "rect1/TL", "line2/p1"]);
    assert_eq!(s.selection(), ["line2/p1", "rect1/TL"]);
    ok(&mut s, "deselect", json!({ "featureId": "line2/p1" }));
    assert_eq!(s.selection(), ["rect1/TL"]);
    ok(&mut s, "clearSelection", Value::Null);
    assert!(s.selection().is_empty());
}

#[test]
fn dig_hole_reports_its_record() {
    let mut s = loaded(FIG1);
    select(&mut s, &["rect1/TL", "line2/p1"]);
    let r = ok(&mut s, "digHole", Value::Null);
    assert_eq!(r["info"]["primed_names"][0], "rect1_left'");
    ok(&mut s, "cleanUp", Value::Null);
}

#[test]
fn drags_start_from_the_program_at_drag_start() {
    let mut s = loaded(FIG1);
    for dx in [3.0, 6.0, 10.0] {
        ok(&mut s, "drag", json!({ "nodePath": [0], "zone": "edge:left", "dx": dx, "dy": 0 }));
    }
    assert!(s.code().contains("[41 100 216 269]"), "{}", s.code());
    ok(&mut s, "drag", json!({ "nodePath": [0], "zone": "edge:left", "dx": 10, "dy": 0, "done": true }));
    assert_eq!(s.undo_depth(), 2);
    // A new drag builds on the committed one.
    ok(&mut s, "drag", json!({ "nodePath": [0], "zone": "edge:left", "dx": 1, "dy": 0, "done": true }));
    assert!(s.code().contains("[42 100 216 269]"));
    ok(&mut s, "undo", Value::Null);
    ok(&mut s, "undo", Value::Null);
    assert_eq!(s.code(), FIG1);
}

#[test]
fn empty_drag_leaves_no_undo_entry() {
    let mut s = loaded(FIG1);
    let depth = s.undo_depth();
    ok(&mut s, "drag", json!({ "nodePath": [1], "zone": "interior", "dx": 0, "dy": 0, "done": true }));
    assert_eq!(s.undo_depth(), depth);
}

#[test]
fn set_attr_and_ghost_toggle() {
    let mut s = loaded(include_str!("corpus/shapes.little"));
    let hidden = ok(&mut s, "getSvg", Value::Null)["svg"].as_str().unwrap().to_string();
    let shown = ok(&mut s, "toggleGhosts", Value::Null);
    assert_eq!(shown["showGhosts"], true);
    assert_ne!(shown["svg"].as_str().unwrap(), hidden);
    let r = ok(&mut s, "setAttr", json!({ "nodePath": [0], "attrName": "left", "newValue": 45 }));
    assert!(r["code"].as_str().unwrap().contains("[45 40 140 100]"));
}

#[test]
fn draw_list_lambdas_and_stamp() {
    let mut s = Session::new(5);
    let r = ok(&mut s, "draw", json!({ "tool": "rect", "geometry": [[31, 100], [216, 269]], "colorSeed": 33 }));
    assert_eq!(r["info"]["colorSeed"], 33);
    ok(&mut s, "draw", json!({ "tool": "line", "geometry": [[81, 76], [190, 241]] }));
    ok(&mut s, "draw", json!({ "tool": "line", "geometry": [[56, 258], [101, 199]] }));
    assert_eq!(s.program().blobs().unwrap().len(), 3);
    ok(&mut s, "group", json!({ "blobs": [0, 1, 2] }));
    let r = ok(&mut s, "abstract", json!({ "blob": 0 }));
    assert_eq!(r["info"]["hasBounds"], true);
    let f = r["lambdas"][0].as_str().unwrap().to_string();
    assert_eq!(ok(&mut s, "listLambdas", Value::Null)["lambdas"], json!([f]));
    ok(&mut s, "draw", json!({ "tool": "lambda", "fnName": f, "geometry": [[0, 0], [50, 60]] }));
    assert_eq!(s.program().blobs().unwrap().len(), 2);
    ok(&mut s, "duplicate", json!({ "blob": 1 }));
    assert_eq!(s.program().blobs().unwrap().len(), 3);
}

#[test]
fn seeded_sessions_draw_the_same_colors() {
    let run = |seed| {
        let mut s = Session::new(seed);
        for _ in 0..3 {
            ok(&mut s, "draw", json!({ "tool": "oval", "geometry": [[0, 0], [9, 9]] }));
        }
        s.code()
    };
    assert_eq!(run(11), run(11));
    assert_ne!(run(11), run(12));
}

#[test]
fn merge_and_features() {
    let mut s = loaded(include_str!("corpus/mug.little"));
    let r = ok(&mut s, "listFeatures", Value::Null);
    let ids: Vec<&str> = r["features"].as_array().unwrap().iter().map(|f| f["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"body/left"), "{ids:?}");
    ok(&mut s, "merge", json!({ "blobs": [3, 4, 5] }));
    assert!(s.code().contains("(merged1 140)"));
}

#[test]
fn undo_history_is_bounded() {
    let mut s = loaded(FIG1);
    for i in 0..UNDO_LIMIT + 20 {
        ok(&mut s, "setAttr", json!({ "nodePath": [0], "attrName": "top", "newValue": 100 + i % 2 + 1 }));
    }
    assert_eq!(s.undo_depth(), UNDO_LIMIT);
    let r = call(&mut Session::default(), "undo", Value::Null);
    assert_eq!(r["payload"]["error"], "NothingToUndo");
}

/// A request of each kind reaches the engine and gets a well-formed reply.
#[test]
fn every_request_kind_is_reachable() {
    let samples = [
        json!({ "kind": "load", "payload": { "source": FIG1 } }),
        json!({ "kind": "getCode" }),
        json!({ "kind": "getSvg" }),
        json!({ "kind": "draw", "payload": { "tool": "line", "geometry": [[0, 0], [5, 5]] } }),
        json!({ "kind": "listLambdas" }),
        json!({ "kind": "select", "payload": { "featureId": "rect1/TL" } }),
        json!({ "kind": "deselect", "payload": { "featureId": "rect1/TL" } }),
        json!({ "kind": "clearSelection" }),
        json!({ "kind": "digHole" }),
        json!({ "kind": "makeEqual" }),
        json!({ "kind": "cleanUp" }),
        json!({ "kind": "group", "payload": { "blobs": [0, 1] } }),
        json!({ "kind": "abstract", "payload": { "blob": 0 } }),
        json!({ "kind": "duplicate", "payload": { "blob": 0 } }),
        json!({ "kind": "merge", "payload": { "blobs": [0, 1] } }),
        json!({ "kind": "drag", "payload": { "nodePath": [0], "zone": "interior", "dx": 1, "dy": 1 } }),
        json!({ "kind": "setAttr", "payload": { "nodePath": [0], "attrName": "x1", "newValue": 3 } }),
        json!({ "kind": "toggleGhosts" }),
        json!({ "kind": "undo" }),
        json!({ "kind": "listFeatures" }),
    ];
    let kinds: Vec<String> = samples.iter().map(|v| v["kind"].as_str().unwrap().to_string()).collect();
    assert_eq!(kinds, ToolRequest::KINDS);
    let mut s = Session::default();
    for v in samples {
        let env: Envelope = serde_json::from_value(v.clone()).unwrap_or_else(|e| panic!("{v}: {e}"));
        assert_eq!(env.request.kind(), v["kind"]);
        let back = serde_json::to_value(&env).unwrap();
        assert_eq!(serde_json::from_value::<Envelope>(back).unwrap(), env);
        let r = serde_json::to_value(handle_json(&mut s, &v.to_string())).unwrap();
        let payload = &r["payload"];
        assert!(payload.get("code").is_some() || payload.get("error").is_some(), "{v}: {r}");
        assert_ne!(payload["error"], "BadRequest", "{v}: {r}");
    }
}

#[test]
fn every_corpus_program_loads() {
    for (name, src) in CORPUS {
        let mut s = Session::default();
        let r = ok(&mut s, "load", json!({ "source": src }));
        let code = r["code"].as_str().unwrap();
        assert_eq!(parse(code).unwrap(), parse(src).unwrap(), "{name}");
        assert_eq!(code, unparse(&parse(src).unwrap()), "{name}");
    }
}
