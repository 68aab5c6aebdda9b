//! Selectable output quantities of a canvas and their widget geometry.

use serde::Serialize;

use crate::eval::{Canvas, NumVal, SvgNode, Trace};
use crate::little::OpName;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Scalar,
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FeatureKind {
    Primitive,
    Derived,
}

/// One scalar quantity of a feature. A point feature has an x and a y
/// component; every other feature has exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    /// Name of the scalar feature this component is, e.g. `left` or `boxCX`.
    pub name: String,
    pub axis: Axis,
    pub kind: FeatureKind,
    pub value: f64,
    /// Equation used for solving.
    pub trace: Trace,
    /// Equation as written into programs, e.g. `(/ (+ l r) 2!)`.
    pub display: Trace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Geometry {
    Crosshair { x: f64, y: f64 },
    Segment { x1: f64, y1: f64, x2: f64, y2: f64 },
    SliderZone { left: f64, top: f64, right: f64, bot: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feature {
    pub shape: String,
    pub name: String,
    pub kind: FeatureKind,
    pub node_path: Vec<usize>,
    pub parts: Vec<Component>,
    widget: Widget,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Widget {
    None,
    Crosshair,
    /// Span between two points given as (x, y) component pairs of the shape.
    Segment([f64; 4]),
    Slider([f64; 4]),
}

impl Feature {
    pub fn id(&self) -> String {
        format!("{}/{}", self.shape, self.name)
    }

    pub fn axis(&self) -> Axis {
        if self.parts.len() == 2 {
            Axis::Point
        } else {
            self.parts[0].axis
        }
    }

    /// Scalar value; for point features the x coordinate.
    pub fn value(&self) -> f64 {
        self.parts[0].value
    }

    pub fn trace(&self) -> &Trace {
        &self.parts[0].trace
    }

    /// Widget the canvas draws for this feature, if any.
    pub fn geometry(&self) -> Option<Geometry> {
        match self.widget {
            Widget::None => None,
            Widget::Crosshair => Some(Geometry::Crosshair { x: self.parts[0].value, y: self.parts[1].value }),
            Widget::Segment([x1, y1, x2, y2]) => Some(Geometry::Segment { x1, y1, x2, y2 }),
            Widget::Slider([left, top, right, bot]) => Some(Geometry::SliderZone { left, top, right, bot }),
        }
    }
}

#[derive(Serialize)]
struct FeatureView {
    id: String,
    shape: String,
    name: String,
    kind: FeatureKind,
    axis: Axis,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    equation: String,
    #[serde(rename = "nodePath")]
    node_path: Vec<usize>,
    geometry: Option<Geometry>,
}

impl Serialize for Feature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let equation = if self.parts.len() == 2 {
            format!("[{} {}]", self.parts[0].trace, self.parts[1].trace)
        } else {
            self.parts[0].trace.to_string()
        };
        FeatureView {
            id: self.id(),
            shape: self.shape.clone(),
            name: self.name.clone(),
            kind: self.kind,
            axis: self.axis(),
            value: self.value(),
            y: self.parts.get(1).map(|p| p.value),
            equation,
            node_path: self.node_path.clone(),
            geometry: self.geometry(),
        }
        .serialize(s)
    }
}

/// Look a feature up by its `shape/name` id.
pub fn find<'f>(features: &'f [Feature], id: &str) -> Option<&'f Feature> {
    features.iter().find(|f| f.id() == id)
}

/// Every feature of every node on the canvas, in node pre-order.
pub fn features_of(c: &Canvas) -> Vec<Feature> {
    let mut out: Vec<Feature> = Vec::new();
    for (base, group) in shape_groups(c) {
        // Ghosts share the name of the next visible node when that is safe.
        let mut names: Vec<Option<String>> = vec![None; group.len()];
        let mut visible = 0;
        for (i, (_, n)) in group.iter().enumerate() {
            if !n.ghost {
                visible += 1;
                names[i] = Some(if visible == 1 { base.clone() } else { format!("{base}_{visible}") });
            }
        }
        let mut pending: Vec<Feature> = Vec::new();
        for (i, (path, n)) in group.iter().enumerate() {
            let fs = node_features(n, path);
            match &names[i] {
                Some(name) => {
                    let own: Vec<String> = fs.iter().map(|f| f.name.clone()).collect();
                    let clash = pending.iter().any(|f| own.contains(&f.name));
                    let ghost_name = if clash { format!("{name}_ghost") } else { name.clone() };
                    out.extend(pending.drain(..).map(|f| Feature { shape: ghost_name.clone(), ..f }));
                    out.extend(fs.into_iter().map(|f| Feature { shape: name.clone(), ..f }));
                }
                None => {
                    if !pending.is_empty() {
                        let n = out.len();
                        let tag = format!("{base}_ghost{n}");
                        out.extend(pending.drain(..).map(|f| Feature { shape: tag.clone(), ..f }));
                    }
                    pending = fs;
                }
            }
        }
        if !pending.is_empty() {
            let tag = format!("{base}_ghost");
            out.extend(pending.into_iter().map(|f| Feature { shape: tag.clone(), ..f }));
        }
    }
    out
}

/// Nodes of the canvas grouped by the shape name they are reported under.
fn shape_groups(c: &Canvas) -> Vec<(String, Vec<(Vec<usize>, &SvgNode)>)> {
    let nodes = c.all_nodes();
    let root_name = |r: usize| match c.blob_of_root(r) {
        Some(span) => span.name.clone().unwrap_or_else(|| format!("blob{}", span.index)),
        None => format!("shape{r}"),
    };
    let mut out: Vec<(String, Vec<(Vec<usize>, &SvgNode)>)> = Vec::new();
    for (path, n) in nodes {
        let name = root_name(path[0]);
        match out.last_mut() {
            Some((last, g)) if *last == name => g.push((path, n)),
            _ => out.push((name, vec![(path, n)])),
        }
    }
    out
}

fn prim(name: &str, axis: Axis, v: &NumVal) -> Component {
    Component {
        name: name.to_string(),
        axis,
        kind: FeatureKind::Primitive,
        value: v.value,
        trace: v.trace.clone(),
        display: v.trace.clone(),
    }
}

fn derived(name: &str, axis: Axis, value: f64, trace: Trace, display: Trace) -> Component {
    Component { name: name.to_string(), axis, kind: FeatureKind::Derived, value, trace, display }
}

/// `(a + b) / 2`, solved as `0.5 * (a + b)` and written as `(a + b) / 2`.
fn midpoint(name: &str, axis: Axis, a: &Component, b: &Component) -> Component {
    let sum = Trace::op(OpName::Add, a.trace.clone(), b.trace.clone());
    let shown = Trace::op(OpName::Add, a.display.clone(), b.display.clone());
    derived(
        name,
        axis,
        0.5 * (a.value + b.value),
        Trace::op(OpName::Mul, Trace::Opaque(0.5), sum),
        Trace::op(OpName::Div, shown, Trace::Opaque(2.0)),
    )
}

fn span(name: &str, hi: &Component, lo: &Component, half: bool) -> Component {
    let diff = Trace::op(OpName::Sub, hi.trace.clone(), lo.trace.clone());
    let shown = Trace::op(OpName::Sub, hi.display.clone(), lo.display.clone());
    if half {
        derived(
            name,
            Axis::Scalar,
            0.5 * (hi.value - lo.value),
            Trace::op(OpName::Mul, Trace::Opaque(0.5), diff),
            Trace::op(OpName::Div, shown, Trace::Opaque(2.0)),
        )
    } else {
        derived(name, Axis::Scalar, hi.value - lo.value, diff, shown)
    }
}

fn scalar(c: Component, path: &[usize], widget: Widget) -> Feature {
    Feature {
        shape: String::new(),
        name: c.name.clone(),
        kind: c.kind,
        node_path: path.to_vec(),
        parts: vec![c],
        widget,
    }
}

fn point(name: &str, x: &Component, y: &Component, path: &[usize]) -> Feature {
    Feature {
        shape: String::new(),
        name: name.to_string(),
        kind: FeatureKind::Derived,
        node_path: path.to_vec(),
        parts: vec![x.clone(), y.clone()],
        widget: Widget::Crosshair,
    }
}

fn axis_of(attr: &str) -> Axis {
    match attr {
        "left" | "right" | "x1" | "x2" => Axis::X,
        "top" | "bot" | "y1" | "y2" => Axis::Y,
        _ => Axis::Scalar,
    }
}

fn is_slider(tag: &str, attr: &str) -> bool {
    matches!(attr, "color" | "strokeWidth") || (tag == "line" && attr == "width")
}

/// Catalog of features for one node; shape names are filled in by the caller.
fn node_features(n: &SvgNode, path: &[usize]) -> Vec<Feature> {
    let mut out = Vec::new();
    let top = n.extent().map(|e| (e[0], e[1])).unwrap_or((0.0, 0.0));
    let mut sliders = 0;
    let mut comps: Vec<Component> = Vec::new();
    for (k, v) in &n.attrs {
        let Some(v) = v.as_num() else { continue };
        let c = prim(k, axis_of(k), v);
        let widget = if is_slider(&n.tag, k) {
            let (x, y) = top;
            let y0 = y - 20.0 - 15.0 * sliders as f64;
            sliders += 1;
            Widget::Slider([x, y0, x + 100.0, y0 + 10.0])
        } else {
            Widget::None
        };
        comps.push(c.clone());
        out.push(scalar(c, path, widget));
    }
    let get = |k: &str| comps.iter().find(|c| c.name == k).cloned();

    if n.is_boxy() {
        let (l, t, r, b) = (get("left").unwrap(), get("top").unwrap(), get("right").unwrap(), get("bot").unwrap());
        let cx = midpoint("boxCX", Axis::X, &l, &r);
        let cy = midpoint("boxCY", Axis::Y, &t, &b);
        if n.tag == "ellipse" {
            out.push(scalar(span("rx", &r, &l, true), path, Widget::Segment([cx.value, cy.value, r.value, cy.value])));
            out.push(scalar(span("ry", &b, &t, true), path, Widget::Segment([cx.value, cy.value, cx.value, b.value])));
        } else {
            out.push(scalar(span("width", &r, &l, false), path, Widget::Segment([l.value, cy.value, r.value, cy.value])));
            out.push(scalar(span("height", &b, &t, false), path, Widget::Segment([cx.value, t.value, cx.value, b.value])));
        }
        out.push(scalar(cx.clone(), path, Widget::None));
        out.push(scalar(cy.clone(), path, Widget::None));
        if n.tag == "ellipse" {
            out.push(point("boxC", &cx, &cy, path));
        } else {
            for (name, x, y) in [
                ("TL", &l, &t),
                ("TC", &cx, &t),
                ("TR", &r, &t),
                ("ML", &l, &cy),
                ("boxC", &cx, &cy),
                ("MR", &r, &cy),
                ("BL", &l, &b),
                ("BC", &cx, &b),
                ("BR", &r, &b),
            ] {
                out.push(point(name, x, y, path));
            }
        }
    } else if n.tag == "line" {
        if let (Some(x1), Some(y1), Some(x2), Some(y2)) = (get("x1"), get("y1"), get("x2"), get("y2")) {
            let mx = midpoint("midX", Axis::X, &x1, &x2);
            let my = midpoint("midY", Axis::Y, &y1, &y2);
            out.push(scalar(mx.clone(), path, Widget::None));
            out.push(scalar(my.clone(), path, Widget::None));
            out.push(point("p1", &x1, &y1, path));
            out.push(point("p2", &x2, &y2, path));
            out.push(point("mid", &mx, &my, path));
        }
    }

    let verts = n.vertices();
    for (i, p) in verts.iter().enumerate() {
        let x = prim(&format!("point:{}:x", i + 1), Axis::X, &p.x);
        let y = prim(&format!("point:{}:y", i + 1), Axis::Y, &p.y);
        out.push(scalar(x.clone(), path, Widget::None));
        out.push(scalar(y.clone(), path, Widget::None));
        out.push(point(&format!("point:{}", i + 1), &x, &y, path));
    }
    out
}
