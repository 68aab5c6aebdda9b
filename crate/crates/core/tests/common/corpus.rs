//! The example programs and helpers for comparing their output.

use sketchlab_core::eval::{evaluate, render_svg, AttrVal, Canvas, RenderOptions};
use sketchlab_core::little::{parse, Program};

pub const CORPUS: &[(&str, &str)] = &[
    ("logo_v1", include_str!("../corpus/logo_v1.little")),
    ("logo_v3", include_str!("../corpus/logo_v3.little")),
    ("logo_v4", include_str!("../corpus/logo_v4.little")),
    ("polygon", include_str!("../corpus/polygon.little")),
    ("snip", include_str!("../corpus/snip.little")),
    ("sticky", include_str!("../corpus/sticky.little")),
    ("mug", include_str!("../corpus/mug.little")),
    ("garden", include_str!("../corpus/garden.little")),
    ("shapes", include_str!("../corpus/shapes.little")),
    ("stamps", include_str!("../corpus/stamps.little")),
];

pub fn program(name: &str) -> Program {
    let (_, src) = CORPUS.iter().find(|(n, _)| *n == name).expect("corpus entry");
    parse(src).unwrap()
}

pub fn svg(p: &Program) -> String {
    render_svg(&evaluate(p).unwrap(), RenderOptions::default())
}

/// Every number drawn, in document order, with group nodes looked through.
pub fn drawn_numbers(c: &Canvas) -> Vec<f64> {
    let mut out = Vec::new();
    for (_, n) in c.all_nodes() {
        if n.tag == "g" {
            continue;
        }
        for (_, v) in &n.attrs {
            match v {
                AttrVal::Num(x) => out.push(x.value),
                AttrVal::Points(ps) => ps.iter().for_each(|p| out.extend([p.x.value, p.y.value])),
                AttrVal::Path(cs) => cs
                    .iter()
                    .flat_map(|c| c.points.iter())
                    .for_each(|p| out.extend([p.x.value, p.y.value])),
                AttrVal::Str(_) => {}
            }
        }
    }
    out
}

pub fn same_geometry(a: &Program, b: &Program, tol: f64) -> bool {
    let (x, y) = (drawn_numbers(&evaluate(a).unwrap()), drawn_numbers(&evaluate(b).unwrap()));
    x.len() == y.len() && x.iter().zip(&y).all(|(u, v)| (u - v).abs() <= tol)
}
