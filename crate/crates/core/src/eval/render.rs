use std::fmt::Write as _;

use super::svg::{AttrVal, Canvas, Point, SvgNode};

#[derive(Clone, Copy, Debug, Default)]
pub struct RenderOptions {
    pub show_ghosts: bool,
}

/// Standalone SVG document, one element per line.
pub fn render_svg(c: &Canvas, opts: RenderOptions) -> String {
    const OPEN: &str = r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1""#;
    if c.roots.is_empty() {
        return format!("{OPEN}/>\n");
    }
    let mut out = format!("{OPEN}>\n");
    for n in &c.roots {
        node(&mut out, n, opts);
    }
    out.push_str("</svg>\n");
    out
}

/// Numbers with at most three decimals and no trailing zeros.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Colors are numbers 0..=500: hues up to 360, then a gray ramp.
pub fn color_css(v: &AttrVal) -> String {
    match v {
        AttrVal::Str(s) => s.clone(),
        AttrVal::Num(n) => {
            let c = n.value.clamp(0.0, 500.0);
            if c <= 360.0 {
                format!("hsl({},100%,50%)", fmt_num(c))
            } else {
                format!("hsl(0,0%,{}%)", fmt_num((c - 361.0).max(0.0) / 139.0 * 100.0))
            }
        }
        _ => "none".to_string(),
    }
}

fn scalar(v: &AttrVal) -> String {
    match v {
        AttrVal::Num(n) => fmt_num(n.value),
        AttrVal::Str(s) => s.clone(),
        AttrVal::Points(ps) => points(ps),
        AttrVal::Path(_) => String::new(),
    }
}

fn points(ps: &[Point]) -> String {
    ps.iter()
        .map(|p| format!("{},{}", fmt_num(p.x.value), fmt_num(p.y.value)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn push_attr(out: &mut String, name: &str, value: &str) {
    let escaped = value.replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;");
    let _ = write!(out, " {name}=\"{escaped}\"");
}

fn paint(out: &mut String, n: &SvgNode, fill_key: &str) {
    if let Some(c) = n.attr(fill_key) {
        push_attr(out, "fill", &color_css(c));
    }
    if let Some(s) = n.attr("stroke") {
        push_attr(out, "stroke", &scalar(s));
    }
    if let Some(w) = n.attr("strokeWidth") {
        push_attr(out, "stroke-width", &scalar(w));
    }
}

fn num(n: &SvgNode, k: &str) -> f64 {
    n.num(k).map(|v| v.value).unwrap_or(0.0)
}

fn node(out: &mut String, n: &SvgNode, opts: RenderOptions) {
    let hidden = n.ghost && !opts.show_ghosts;
    let (l, t, r, b) = (num(n, "left"), num(n, "top"), num(n, "right"), num(n, "bot"));
    match n.tag.as_str() {
        "BOX" => {
            out.push_str("<rect");
            push_attr(out, "x", &fmt_num(l));
            push_attr(out, "y", &fmt_num(t));
            push_attr(out, "width", &fmt_num(r - l));
            push_attr(out, "height", &fmt_num(b - t));
            if n.attr("color").is_some() {
                paint(out, n, "color");
            } else {
                push_attr(out, "fill", "none");
                push_attr(out, "stroke", "gray");
                push_attr(out, "stroke-dasharray", "4 2");
            }
            rotation(out, n, (l + r) / 2.0, (t + b) / 2.0);
        }
        "ellipse" => {
            out.push_str("<ellipse");
            push_attr(out, "cx", &fmt_num((l + r) / 2.0));
            push_attr(out, "cy", &fmt_num((t + b) / 2.0));
            push_attr(out, "rx", &fmt_num((r - l) / 2.0));
            push_attr(out, "ry", &fmt_num((b - t) / 2.0));
            paint(out, n, "color");
        }
        "line" => {
            out.push_str("<line");
            for k in ["x1", "y1", "x2", "y2"] {
                push_attr(out, k, &fmt_num(num(n, k)));
            }
            if let Some(c) = n.attr("color") {
                push_attr(out, "stroke", &color_css(c));
            }
            if let Some(w) = n.attr("width") {
                push_attr(out, "stroke-width", &scalar(w));
            }
        }
        "polygon" => {
            out.push_str("<polygon");
            push_attr(out, "points", &n.points().map(points).unwrap_or_default());
            paint(out, n, "color");
        }
        "path" => {
            out.push_str("<path");
            let d = n
                .path()
                .unwrap_or_default()
                .iter()
                .map(|c| {
                    let mut s = c.verb.clone();
                    for p in &c.points {
                        let _ = write!(s, " {} {}", fmt_num(p.x.value), fmt_num(p.y.value));
                    }
                    s
                })
                .collect::<Vec<_>>()
                .join(" ");
            push_attr(out, "d", &d);
            paint(out, n, "color");
        }
        "g" => {
            // A bare <g> draws nothing itself, so visible groups are
            // flattened and grouping leaves the document unchanged.
            if hidden {
                out.push_str("<g display=\"none\">\n");
            }
            for c in &n.children {
                node(out, c, opts);
            }
            if hidden {
                out.push_str("</g>\n");
            }
            return;
        }
        other => {
            let _ = write!(out, "<{other}");
            for (k, v) in &n.attrs {
                push_attr(out, k, &scalar(v));
            }
        }
    }
    if hidden {
        push_attr(out, "display", "none");
    }
    out.push_str("/>\n");
    // Leaf shapes have no SVG children; any nested shapes follow as siblings.
    for c in &n.children {
        node(out, c, opts);
    }
}

fn rotation(out: &mut String, n: &SvgNode, cx: f64, cy: f64) {
    if let Some(AttrVal::Num(rot)) = n.attr("rot") {
        if rot.value != 0.0 {
            push_attr(
                out,
                "transform",
                &format!("rotate({} {} {})", fmt_num(rot.value), fmt_num(cx), fmt_num(cy)),
            );
        }
    }
}
