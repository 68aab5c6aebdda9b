use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use super::trace::NumVal;
use crate::little::{Annotation, LocId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: NumVal,
    pub y: NumVal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathCmd {
    pub verb: String,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AttrVal {
    Num(NumVal),
    Str(String),
    Points(Vec<Point>),
    Path(Vec<PathCmd>),
}

impl AttrVal {
    pub fn as_num(&self) -> Option<&NumVal> {
        match self {
            AttrVal::Num(n) => Some(n),
            _ => None,
        }
    }
}

/// One output shape. Tags are the SVG element names plus `BOX`, the
/// bounds-based rectangle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvgNode {
    pub tag: String,
    pub attrs: Vec<(String, AttrVal)>,
    pub children: Vec<SvgNode>,
    pub ghost: bool,
}

impl SvgNode {
    pub fn attr(&self, name: &str) -> Option<&AttrVal> {
        self.attrs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn num(&self, name: &str) -> Option<&NumVal> {
        self.attr(name).and_then(AttrVal::as_num)
    }

    pub fn attr_mut(&mut self, name: &str) -> Option<&mut AttrVal> {
        self.attrs.iter_mut().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Vertices of a polygon or path, in order.
    pub fn vertices(&self) -> Vec<&Point> {
        if let Some(ps) = self.points() {
            ps.iter().collect()
        } else if let Some(cmds) = self.path() {
            cmds.iter().flat_map(|c| c.points.iter()).collect()
        } else {
            Vec::new()
        }
    }

    /// A numeric attribute by name; vertex coordinates are `point:i:x` and
    /// `point:i:y`, counting from 1.
    pub fn scalar(&self, name: &str) -> Option<&NumVal> {
        if let Some(rest) = name.strip_prefix("point:") {
            let (i, axis) = rest.split_once(':')?;
            let i: usize = i.parse().ok()?;
            let p = *self.vertices().get(i.checked_sub(1)?)?;
            return match axis {
                "x" => Some(&p.x),
                "y" => Some(&p.y),
                _ => None,
            };
        }
        self.num(name)
    }

    /// Names accepted by [`SvgNode::scalar`], attributes first.
    pub fn scalar_names(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .attrs
            .iter()
            .filter(|(_, v)| matches!(v, AttrVal::Num(_)))
            .map(|(k, _)| k.clone())
            .collect();
        for i in 1..=self.vertices().len() {
            out.push(format!("point:{i}:x"));
            out.push(format!("point:{i}:y"));
        }
        out
    }

    /// Has numeric `left`/`top`/`right`/`bot` attributes.
    pub fn is_boxy(&self) -> bool {
        ["left", "top", "right", "bot"].iter().all(|k| self.num(k).is_some())
    }

    pub fn points(&self) -> Option<&[Point]> {
        match self.attr("points") {
            Some(AttrVal::Points(p)) => Some(p),
            _ => None,
        }
    }

    pub fn path(&self) -> Option<&[PathCmd]> {
        match self.attr("d") {
            Some(AttrVal::Path(p)) => Some(p),
            _ => None,
        }
    }

    /// Axis-aligned extent `[left top right bot]` of this node's geometry.
    pub fn extent(&self) -> Option<[f64; 4]> {
        let mut acc: Option<[f64; 4]> = None;
        let mut add = |x: f64, y: f64| {
            acc = Some(match acc {
                None => [x, y, x, y],
                Some([l, t, r, b]) => [l.min(x), t.min(y), r.max(x), b.max(y)],
            });
        };
        if self.is_boxy() {
            let v = |k: &str| self.num(k).map(|n| n.value).unwrap_or(0.0);
            add(v("left"), v("top"));
            add(v("right"), v("bot"));
        } else if self.tag == "line" {
            let v = |k: &str| self.num(k).map(|n| n.value).unwrap_or(0.0);
            add(v("x1"), v("y1"));
            add(v("x2"), v("y2"));
        } else if let Some(ps) = self.points() {
            ps.iter().for_each(|p| add(p.x.value, p.y.value));
        } else if let Some(cmds) = self.path() {
            cmds.iter()
                .flat_map(|c| c.points.iter())
                .for_each(|p| add(p.x.value, p.y.value));
        }
        for c in &self.children {
            if let Some([l, t, r, b]) = c.extent() {
                add(l, t);
                add(r, b);
            }
        }
        acc
    }

    /// Every numeric value in this subtree.
    pub fn for_each_num(&self, f: &mut impl FnMut(&NumVal)) {
        for (_, v) in &self.attrs {
            match v {
                AttrVal::Num(n) => f(n),
                AttrVal::Points(ps) => ps.iter().for_each(|p| {
                    f(&p.x);
                    f(&p.y)
                }),
                AttrVal::Path(cs) => cs.iter().flat_map(|c| c.points.iter()).for_each(|p| {
                    f(&p.x);
                    f(&p.y)
                }),
                AttrVal::Str(_) => {}
            }
        }
        for c in &self.children {
            c.for_each_num(f);
        }
    }
}

/// The span of root nodes produced by one entry of the `blobs` list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlobSpan {
    pub index: usize,
    /// The def name when the entry is a plain variable.
    pub name: Option<String>,
    pub nodes: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Canvas {
    /// Root shapes in z-order: later ones draw on top.
    pub roots: Vec<SvgNode>,
    /// Current value and annotation of every literal in the program.
    pub store: BTreeMap<LocId, (f64, Annotation)>,
    /// Present when the program has the simple `(blobs [ ... ])` shape.
    pub blobs: Option<Vec<BlobSpan>>,
}

impl Canvas {
    pub fn value_of(&self, loc: LocId) -> Option<f64> {
        self.store.get(&loc).map(|(v, _)| *v)
    }

    pub fn annot_of(&self, loc: LocId) -> Option<Annotation> {
        self.store.get(&loc).map(|(_, a)| *a)
    }

    /// Node addressed by an index path: first index into `roots`, the rest
    /// into `children`.
    pub fn node(&self, path: &[usize]) -> Option<&SvgNode> {
        let (first, rest) = path.split_first()?;
        let mut n = self.roots.get(*first)?;
        for i in rest {
            n = n.children.get(*i)?;
        }
        Some(n)
    }

    /// All nodes with their index paths, pre-order.
    pub fn all_nodes(&self) -> Vec<(Vec<usize>, &SvgNode)> {
        fn go<'c>(n: &'c SvgNode, path: Vec<usize>, out: &mut Vec<(Vec<usize>, &'c SvgNode)>) {
            out.push((path.clone(), n));
            for (i, c) in n.children.iter().enumerate() {
                let mut p = path.clone();
                p.push(i);
                go(c, p, out);
            }
        }
        let mut out = Vec::new();
        for (i, r) in self.roots.iter().enumerate() {
            go(r, vec![i], &mut out);
        }
        out
    }

    pub fn blob_of_root(&self, root: usize) -> Option<&BlobSpan> {
        self.blobs.as_ref()?.iter().find(|b| b.nodes.contains(&root))
    }
}
