//! Stencils for newly drawn shapes, and user functions as drawing tools.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::little::names::all_names;
use crate::little::{format_number, parse_expr, Annotation, Def, Expr, ExprKind, NumLit, Pattern, Program};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DrawError {
    #[error("a {tool} needs {need} points, got {got}")]
    BadGeometry { tool: String, need: &'static str, got: usize },
    #[error("`{0}` is not a function taking a bounding box")]
    UnknownLambda(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "tool", content = "fnName")]
pub enum Tool {
    Line,
    Rect,
    Oval,
    Polygon,
    Path,
    Lambda(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DrawRequest {
    #[serde(flatten)]
    pub tool: Tool,
    pub geometry: Vec<[f64; 2]>,
    #[serde(default)]
    pub color_seed: u64,
}

/// Deterministic stand-in for a random color in 0..=500.
pub fn color_from_seed(seed: u64) -> u64 {
    seed.wrapping_mul(17) % 501
}

fn n(v: f64) -> String {
    format_number(v)
}

/// Corners of the drag, ordered and at least one unit wide and tall.
fn bounds_of(pts: &[[f64; 2]]) -> [f64; 4] {
    let xs = pts.iter().map(|p| p[0].round());
    let ys = pts.iter().map(|p| p[1].round());
    let l = xs.clone().fold(f64::INFINITY, f64::min);
    let r = xs.fold(f64::NEG_INFINITY, f64::max).max(l + 1.0);
    let t = ys.clone().fold(f64::INFINITY, f64::min);
    let b = ys.fold(f64::NEG_INFINITY, f64::max).max(t + 1.0);
    [l, t, r, b]
}

fn bounds_text(b: [f64; 4]) -> String {
    format!("[{} {} {} {}]", n(b[0]), n(b[1]), n(b[2]), n(b[3]))
}

/// A coordinate as a fraction of its range: two decimals, thawed unless it
/// sits on the box.
fn pct(v: f64, lo: f64, hi: f64) -> String {
    let p = ((v.round() - lo) / (hi - lo) * 100.0).round() / 100.0;
    if p == 0.0 || p == 1.0 {
        n(p)
    } else {
        format!("{p:.2}?")
    }
}

fn pcts(pts: &[[f64; 2]], b: [f64; 4]) -> Vec<String> {
    pts.iter()
        .map(|p| format!("{} {}", pct(p[0], b[0], b[2]), pct(p[1], b[1], b[3])))
        .collect()
}

fn need(tool: &str, pts: &[[f64; 2]], ok: bool, need: &'static str) -> Result<(), DrawError> {
    if ok {
        Ok(())
    } else {
        Err(DrawError::BadGeometry { tool: tool.into(), need, got: pts.len() })
    }
}

/// Source of the stencil expression and the stem of its name.
fn stencil(req: &DrawRequest) -> Result<(String, &'static str), DrawError> {
    let pts = &req.geometry;
    let color = color_from_seed(req.color_seed);
    let boxed = |kind: &'static str, draw: &str| -> Result<(String, &'static str), DrawError> {
        need(kind, pts, pts.len() == 2, "exactly 2")?;
        let body = format!(
            "(let [left top right bot] {}\n(let bounds [left top right bot]\n(let color {color}\n[ ({draw}) ])))",
            bounds_text(bounds_of(pts))
        );
        Ok((body, kind))
    };
    match &req.tool {
        Tool::Rect => boxed("rect", "rectangle color 'black' '0' 0 bounds"),
        Tool::Oval => boxed("oval", "oval color 'black' '0' bounds"),
        Tool::Line => {
            need("line", pts, pts.len() == 2, "exactly 2")?;
            let [a, b] = [pts[0], pts[1]].map(|p| p.map(f64::round));
            let body = format!(
                "(let [x1 y1 x2 y2] [{} {} {} {}]\n(let [color width] [{color} 5]\n[ (line color width x1 y1 x2 y2) ]))",
                n(a[0]),
                n(a[1]),
                n(b[0]),
                n(b[1])
            );
            Ok((body, "line"))
        }
        Tool::Polygon | Tool::Path => {
            let (kind, func, list) = match req.tool {
                Tool::Polygon => ("polygon", "stretchyPolygon", "pcts"),
                _ => ("path", "stretchyPath", "cmds"),
            };
            need(kind, pts, pts.len() >= 3, "at least 3")?;
            let b = bounds_of(pts);
            let items: Vec<String> = pcts(pts, b)
                .into_iter()
                .enumerate()
                .map(|(i, xy)| match req.tool {
                    Tool::Polygon => format!("[{xy}]"),
                    _ => format!("['{}' [{xy}]]", if i == 0 { "M" } else { "L" }),
                })
                .collect();
            let body = format!(
                "(let [left top right bot] {}\n(let bounds [left top right bot]\n(let [color stroke width] [{color} 'black' 2]\n(let {list} [{}]\n[ ({func} bounds color stroke width {list}) ]))))",
                bounds_text(b),
                items.join(" ")
            );
            Ok((body, kind))
        }
        Tool::Lambda(f) => Err(DrawError::UnknownLambda(f.clone())),
    }
}

/// `{stem}{k}` for the first free k, counting from the next shape number.
fn shape_name(p: &Program, stem: &str) -> String {
    let taken = all_names(p);
    let start = p.blobs().map_or(p.defs.len(), <[Expr]>::len) + 1;
    (start..).map(|k| format!("{stem}{k}")).find(|c| !taken.contains(c)).expect("unbounded search")
}

/// Put a new shape on top: as a def plus blobs entry, or by wrapping the
/// whole program when it is not in that form.
fn add_shape(p: &Program, name: &str, shape: Expr, as_def: bool) -> Program {
    let mut q = p.clone();
    match q.blobs_mut() {
        Some(list) if as_def => {
            list.push(Expr::var(name));
            q.defs.push(Def::new(Pattern::var(name), shape));
        }
        Some(list) => list.push(shape),
        None => {
            let main = std::mem::replace(&mut q.main, Expr::num(0.0));
            let body = Expr::call("addShapeToCanvas", vec![main, Expr::var(name)]);
            q.main = Expr::let_(Pattern::var(name), shape, body);
        }
    }
    q.renumber();
    q
}

/// Add a shape drawn with one of the built-in tools or a lambda tool.
pub fn draw_shape(p: &Program, req: &DrawRequest) -> Result<Program, DrawError> {
    if let Tool::Lambda(f) = &req.tool {
        need("lambda", &req.geometry, req.geometry.len() == 2, "exactly 2")?;
        return draw_lambda(p, f, bounds_of(&req.geometry));
    }
    let (src, stem) = stencil(req)?;
    let name = shape_name(p, stem);
    Ok(add_shape(p, &name, parse_expr(&src).expect("generated code parses"), true))
}

fn lambda_params<'a>(d: &'a Def) -> Option<&'a [Pattern]> {
    match &d.bound.kind {
        ExprKind::Lambda(ps, _) if ps.last().is_some_and(Pattern::is_bounds_pattern) => Some(ps),
        _ => None,
    }
}

/// Top-level functions whose last parameter is a bounding box.
pub fn list_lambda_tools(p: &Program) -> Vec<String> {
    p.defs
        .iter()
        .filter(|d| lambda_params(d).is_some())
        .filter_map(|d| d.pat.as_var().map(String::from))
        .collect()
}

/// Leading arguments of a blobs entry calling `f`.
fn call_args<'a>(e: &'a Expr, f: &str) -> Option<&'a [Expr]> {
    let ExprKind::App(head, outer) = &e.kind else { return None };
    if head.as_var() == Some(f) && outer.len() == 1 {
        return Some(&[]);
    }
    match &head.kind {
        ExprKind::App(g, args) if g.as_var() == Some(f) && outer.len() == 1 => Some(args),
        _ => None,
    }
}

/// Call `f` on a freshly drawn bounding box, copying the arguments of its
/// latest call or, failing that, the defaults recorded when it was made.
pub fn draw_lambda(p: &Program, f: &str, bounds: [f64; 4]) -> Result<Program, DrawError> {
    let unknown = || DrawError::UnknownLambda(f.to_string());
    let def = p.defs.iter().rev().find(|d| d.pat.as_var() == Some(f)).ok_or_else(unknown)?;
    let params = lambda_params(def).ok_or_else(unknown)?;
    let k = params.len() - 1;
    let latest = p.blobs().and_then(|bs| bs.iter().rev().find_map(|e| call_args(e, f)));
    let args: Vec<Expr> = match latest {
        Some(a) if a.len() == k => a.to_vec(),
        _ => match p.lambda_defaults.get(f) {
            Some(d) if d.len() == k => d.clone(),
            _ => vec![Expr::num(0.0); k],
        },
    };
    let [l, t, r, b] = bounds_of(&[[bounds[0], bounds[1]], [bounds[2], bounds[3]]]);
    let bounds = Expr::list([l, t, r, b].map(|v| Expr::lit(NumLit::new(v, Annotation::Plain))).to_vec());
    let head = if k == 0 { Expr::var(f) } else { Expr::app(Expr::var(f), args) };
    let call = Expr::app(head, vec![bounds]);
    let name = shape_name(p, f);
    Ok(add_shape(p, &name, call, false))
}
