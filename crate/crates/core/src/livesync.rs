//! Output edits mapped back to a change of a single program constant.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{evaluate, Canvas, EvalError, NumVal, SvgNode};
use crate::little::{Annotation, ExprKind, LocId, NumLit, Program};
use crate::solver::{rank, solve_for_loc, Equation};

/// Accepted distance between the requested and the re-evaluated value.
pub const FIDELITY: f64 = 0.5;
/// Rounding of the new constant may cost at most this much.
pub const ROUNDING: f64 = 0.25;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SyncError {
    #[error("no single constant can be changed to give `{0}` that value")]
    NoSolution(String),
    #[error("no shape at {0:?}")]
    NoSuchNode(Vec<usize>),
    #[error("the shape has no numeric attribute `{0}`")]
    NoSuchAttr(String),
    #[error("unknown drag zone `{0}`")]
    BadZone(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttrEdit {
    pub node_path: Vec<usize>,
    pub attr_name: String,
    pub new_value: f64,
}

/// Where on a shape a drag started.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Zone {
    Interior,
    Edge(Side),
    Corner(Side, Side),
    /// 1-based vertex.
    Point(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Side {
    Left,
    Right,
    Top,
    Bot,
}

impl FromStr for Zone {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SyncError::BadZone(s.to_string());
        let side = |c: &str| match c {
            "left" | "l" => Some(Side::Left),
            "right" | "r" => Some(Side::Right),
            "top" | "t" => Some(Side::Top),
            "bot" | "b" => Some(Side::Bot),
            _ => None,
        };
        match s.split_once(':') {
            None if s == "interior" => Ok(Zone::Interior),
            Some(("edge", e)) => side(e).map(Zone::Edge).ok_or_else(bad),
            Some(("corner", c)) if c.len() == 2 => {
                let (v, h) = c.split_at(1);
                match (side(v), side(h)) {
                    (Some(v @ (Side::Top | Side::Bot)), Some(h @ (Side::Left | Side::Right))) => Ok(Zone::Corner(h, v)),
                    _ => Err(bad()),
                }
            }
            Some(("point", i)) => i.parse().ok().filter(|i| *i > 0).map(Zone::Point).ok_or_else(bad),
            _ => Err(bad()),
        }
    }
}

fn node<'c>(c: &'c Canvas, path: &[usize]) -> Result<&'c SvgNode, SyncError> {
    c.node(path).ok_or_else(|| SyncError::NoSuchNode(path.to_vec()))
}

/// Line endpoints count as vertices 1 and 2.
fn attr_of_point(n: &SvgNode, i: usize) -> Option<(String, String)> {
    if n.tag == "line" && (i == 1 || i == 2) {
        return Some((format!("x{i}"), format!("y{i}")));
    }
    (i <= n.vertices().len()).then(|| (format!("point:{i}:x"), format!("point:{i}:y")))
}

fn value_of(n: &SvgNode, attr: &str) -> Result<NumVal, SyncError> {
    n.scalar(attr).cloned().ok_or_else(|| SyncError::NoSuchAttr(attr.to_string()))
}

/// Shortest decimal near `v` that keeps the attribute within `ROUNDING`.
fn tidy(v: f64, attr_at: impl Fn(f64) -> Option<f64>, target: f64) -> f64 {
    (0..=10)
        .map(|d| {
            let s = 10f64.powi(d);
            (v * s).round() / s
        })
        .find(|r| attr_at(*r).is_some_and(|a| (a - target).abs() <= ROUNDING))
        .unwrap_or(v)
}

fn set_literal(p: &Program, loc: LocId, value: f64) -> Program {
    let mut q = p.clone();
    if let Some(site) = q.find_literal_mut(loc) {
        if let ExprKind::Num(n) = &mut site.kind {
            let mut lit = NumLit::new(value, n.annot);
            lit.loc = n.loc;
            *n = lit;
        }
    }
    q
}

fn edit_with(p: &Program, c: &Canvas, edit: &AttrEdit, thawed_only: bool) -> Result<Program, SyncError> {
    let n = node(c, &edit.node_path)?;
    let cur = value_of(n, &edit.attr_name)?;
    // Already close enough that any rounded constant would be the old one.
    if (cur.value - edit.new_value).abs() <= ROUNDING {
        return Ok(p.clone());
    }
    let no = || SyncError::NoSolution(edit.attr_name.clone());
    let eq = Equation::new(cur.trace.clone(), crate::eval::Trace::Opaque(edit.new_value), c.store.clone());
    let mut candidates = rank(cur.trace.locs_ordered().into_iter(), &eq.env);
    let thawed: Vec<LocId> = candidates
        .iter()
        .copied()
        .filter(|l| eq.env.get(l).is_some_and(|(_, a)| *a == Annotation::Thawed))
        .collect();
    if thawed_only && !thawed.is_empty() {
        candidates = thawed;
    }
    let look = |l: LocId| c.store.get(&l).map(|(v, _)| *v);
    for t in candidates {
        let Ok(sol) = solve_for_loc(&eq, t) else { continue };
        let Some(v) = sol.eval(&look) else { continue };
        let attr_at = |x: f64| cur.trace.eval(&|l| if l == t { Some(x) } else { look(l) });
        let v = tidy(v, attr_at, edit.new_value);
        if attr_at(v).is_some_and(|a| (a - edit.new_value).abs() <= FIDELITY) {
            return Ok(set_literal(p, t, v));
        }
    }
    Err(no())
}

/// Change the one constant that makes the edited attribute take its new value.
pub fn apply_output_edit(p: &Program, c: &Canvas, edit: &AttrEdit) -> Result<Program, SyncError> {
    edit_with(p, c, edit, false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DragOutcome {
    pub program: Program,
    /// Attributes that could not follow the drag.
    pub failed: Vec<String>,
}

/// The attribute moves a drag in `zone` asks for.
pub fn drag_edits(n: &SvgNode, zone: Zone, dx: f64, dy: f64) -> Result<Vec<(String, f64)>, SyncError> {
    let side = |s: Side| -> (String, f64) {
        match s {
            Side::Left => ("left".into(), dx),
            Side::Right => ("right".into(), dx),
            Side::Top => ("top".into(), dy),
            Side::Bot => ("bot".into(), dy),
        }
    };
    let bad = |z: &str| SyncError::BadZone(z.to_string());
    Ok(match zone {
        Zone::Edge(s) if n.is_boxy() => vec![side(s)],
        Zone::Corner(h, v) if n.is_boxy() => vec![side(h), side(v)],
        Zone::Interior if n.is_boxy() => [Side::Left, Side::Top, Side::Right, Side::Bot].map(side).to_vec(),
        Zone::Interior if n.tag == "line" => {
            vec![("x1".into(), dx), ("y1".into(), dy), ("x2".into(), dx), ("y2".into(), dy)]
        }
        Zone::Interior if !n.vertices().is_empty() => (1..=n.vertices().len())
            .flat_map(|i| [(format!("point:{i}:x"), dx), (format!("point:{i}:y"), dy)])
            .collect(),
        Zone::Point(i) => {
            let (x, y) = attr_of_point(n, i).ok_or_else(|| bad(&format!("point:{i}")))?;
            vec![(x, dx), (y, dy)]
        }
        _ => return Err(bad(&format!("{zone:?}"))),
    })
}

/// Apply a drag as a sequence of single-constant edits, each aimed at the
/// attribute's value at drag start plus the offset.
pub fn apply_drag(p: &Program, c: &Canvas, path: &[usize], dx: f64, dy: f64, zone: Zone) -> Result<DragOutcome, SyncError> {
    let n = node(c, path)?;
    let moves = drag_edits(n, zone, dx, dy)?;
    let thawed_only = matches!(zone, Zone::Point(_));
    let mut cur = p.clone();
    let mut canvas = c.clone();
    let mut failed = Vec::new();
    for (attr, delta) in moves {
        if delta == 0.0 {
            continue;
        }
        let start = value_of(n, &attr)?.value;
        let edit = AttrEdit { node_path: path.to_vec(), attr_name: attr.clone(), new_value: start + delta };
        match edit_with(&cur, &canvas, &edit, thawed_only) {
            Ok(q) => {
                canvas = evaluate(&q)?;
                cur = q;
            }
            Err(SyncError::NoSolution(a)) => failed.push(a),
            Err(e) => return Err(e),
        }
    }
    Ok(DragOutcome { program: cur, failed })
}
