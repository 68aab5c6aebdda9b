use std::collections::{BTreeMap, BTreeSet};

use super::{binders_above, blobs, classify, Blob, GroupError};
use crate::eval::{evaluate, AttrVal, SvgNode, Trace};
use crate::little::names::{all_names, count_free, fresh_name, fresh_name_in, free_vars};
use crate::little::{Annotation, Def, Expr, LocId, NumLit, Pattern, Program};
use crate::relate::clean_up;

#[derive(Clone, Copy, PartialEq)]
enum Dim {
    X,
    Y,
}

const X_ATTRS: &[&str] = &["left", "right", "x1", "x2", "cx", "x"];
const Y_ATTRS: &[&str] = &["top", "bot", "y1", "y2", "cy", "y"];

fn note(trace: &Trace, dim: Dim, out: &mut BTreeMap<LocId, Option<Dim>>) {
    if let Some(l) = trace.as_loc() {
        out.entry(l)
            .and_modify(|d| {
                if *d != Some(dim) {
                    *d = None;
                }
            })
            .or_insert(Some(dim));
    }
}

/// Literals that directly give a coordinate of some shape under `n`.
fn coordinate_literals(n: &SvgNode, out: &mut BTreeMap<LocId, Option<Dim>>) {
    for (k, v) in &n.attrs {
        match v {
            AttrVal::Num(v) if X_ATTRS.contains(&k.as_str()) => note(&v.trace, Dim::X, out),
            AttrVal::Num(v) if Y_ATTRS.contains(&k.as_str()) => note(&v.trace, Dim::Y, out),
            AttrVal::Points(ps) => ps.iter().for_each(|p| {
                note(&p.x.trace, Dim::X, out);
                note(&p.y.trace, Dim::Y, out);
            }),
            AttrVal::Path(cmds) => cmds.iter().flat_map(|c| c.points.iter()).for_each(|p| {
                note(&p.x.trace, Dim::X, out);
                note(&p.y.trace, Dim::Y, out);
            }),
            _ => {}
        }
    }
    for c in &n.children {
        coordinate_literals(c, out);
    }
}

/// `v` as a fraction of `lo..hi`, with as few decimals (at least two) as
/// still land within 1e-7 of `v`.
fn percentage(v: f64, lo: f64, hi: f64) -> f64 {
    let pct = (v - lo) / (hi - lo);
    (2..=15)
        .map(|d| {
            let scale = 10f64.powi(d);
            (pct * scale).round() / scale
        })
        .find(|r| (lo + r * (hi - lo) - v).abs() <= 1e-7)
        .unwrap_or(pct)
}

fn rewrite(v: f64, lo: f64, hi: f64, lo_name: &str, hi_name: &str) -> Expr {
    if v == lo || hi == lo {
        return Expr::var(lo_name);
    }
    if v == hi {
        return Expr::var(hi_name);
    }
    let pct = Expr::lit(NumLit::new(percentage(v, lo, hi), Annotation::Thawed));
    Expr::call("scaleBetween", vec![Expr::var(lo_name), Expr::var(hi_name), pct])
}

/// Top-level defs that travel with the selection: the selected ones plus
/// constant defs used by nothing else.
fn moved_defs(p: &Program, sel: &[usize]) -> Result<BTreeSet<usize>, GroupError> {
    let entries = blobs(p)?;
    let mut moved = BTreeSet::new();
    for &i in sel {
        if let Blob::Def(d) = classify(p, i)? {
            moved.insert(d);
        }
    }
    let outside = |moved: &BTreeSet<usize>, name: &str| -> bool {
        let in_defs = p
            .defs
            .iter()
            .enumerate()
            .any(|(j, d)| !moved.contains(&j) && count_free(&d.bound, name) > 0);
        let in_blobs = entries
            .iter()
            .enumerate()
            .any(|(i, e)| !sel.contains(&i) && count_free(e, name) > 0);
        in_defs || in_blobs
    };
    for &d in &moved {
        for x in p.defs[d].pat.binders() {
            if outside(&moved, x) {
                return Err(GroupError::SharedDefinition(x.to_string()));
            }
        }
    }
    loop {
        let last = *moved.iter().next_back().unwrap_or(&0);
        let inside = |x: &str, moved: &BTreeSet<usize>| {
            moved.iter().any(|&j| count_free(&p.defs[j].bound, x) > 0)
                || sel.iter().any(|&i| count_free(&entries[i], x) > 0)
        };
        let next = (0..last).find(|j| {
            let d = &p.defs[*j];
            !moved.contains(j)
                && !d.rec
                && !d.pat.binders().is_empty()
                && d.pat.binders().iter().all(|x| !outside(&moved, x))
                && d.pat.binders().iter().any(|x| inside(x, &moved))
        });
        match next {
            Some(j) => {
                moved.insert(j);
            }
            None => return Ok(moved),
        }
    }
}

/// Gather the selected blobs into one definition whose shapes are laid out
/// relative to a shared bounding box.
pub fn group(p: &Program, sel: &[usize]) -> Result<Program, GroupError> {
    let entries = blobs(p)?;
    let mut sel = sel.to_vec();
    sel.sort_unstable();
    sel.dedup();
    if let Some(&i) = sel.iter().find(|&&i| i >= entries.len()) {
        return Err(GroupError::UnknownBlob(i));
    }
    if sel.len() < 2 {
        return Err(GroupError::EmptySelection);
    }
    let moved = moved_defs(p, &sel)?;

    let canvas = evaluate(p)?;
    let spans = canvas.blobs.as_ref().ok_or(GroupError::NotSimple)?;
    let mut ext: Option<[f64; 4]> = None;
    let mut coords = BTreeMap::new();
    for span in spans.iter().filter(|s| sel.contains(&s.index)) {
        for n in &canvas.roots[span.nodes.clone()] {
            coordinate_literals(n, &mut coords);
            if let Some([l, t, r, b]) = n.extent() {
                ext = Some(match ext {
                    None => [l, t, r, b],
                    Some([l0, t0, r0, b0]) => [l0.min(l), t0.min(t), r0.max(r), b0.max(b)],
                });
            }
        }
    }
    let [gl, gt, gr, gb] = ext.unwrap_or([0.0; 4]);

    // The group's own names, unless moved code already means something else by them.
    let mut moved_code: Vec<&Expr> = moved.iter().map(|&d| &p.defs[d].bound).collect();
    moved_code.extend(sel.iter().filter(|&&i| classify(p, i) == Ok(Blob::Expr)).map(|&i| &entries[i]));
    let free: BTreeSet<String> = moved_code.iter().flat_map(|e| free_vars(e)).collect();
    let mut taken = all_names(p);
    let mut pick = |base: &str| {
        let name = if free.contains(base) { fresh_name_in(&taken, base) } else { base.to_string() };
        taken.insert(name.clone());
        name
    };
    let [l, t, r, b, bounds] = ["left", "top", "right", "bot", "bounds"].map(&mut pick);
    let group_names = [l.clone(), t.clone(), r.clone(), b.clone(), bounds.clone()];

    let mut q = p.clone();
    let main = p.defs.len();
    let within = |loc: LocId| -> Option<usize> {
        match p.def_index_of(loc) {
            Some(d) if moved.contains(&d) => Some(d),
            Some(_) => None,
            None => sel.iter().any(|&i| entries[i].contains_loc(loc)).then_some(main),
        }
    };
    for (loc, dim) in coords {
        let (Some(dim), Some(at)) = (dim, within(loc)) else { continue };
        let lit = match p.literal(loc) {
            Some(n) if n.annot != Annotation::Frozen => n.value,
            _ => continue,
        };
        // Earlier moved defs and enclosing binders must not hide the group names.
        let mut hidden: BTreeSet<String> = moved
            .iter()
            .filter(|&&d| d < at || (d == at && p.defs[d].rec))
            .flat_map(|&d| p.defs[d].pat.binders().into_iter().map(String::from))
            .collect();
        let root = if at == main { &p.main } else { &p.defs[at].bound };
        hidden.extend(binders_above(root, loc));
        if group_names.iter().any(|n| hidden.contains(n)) {
            continue;
        }
        let with = match dim {
            Dim::X => rewrite(lit, gl, gr, &l, &r),
            Dim::Y => rewrite(lit, gt, gb, &t, &b),
        };
        if let Some(site) = q.find_literal_mut(loc) {
            let comments = std::mem::take(&mut site.comments);
            *site = with;
            site.comments = comments;
        }
    }

    let q_entries = q.blobs().expect("still simple").to_vec();
    let items: Vec<Expr> = sel.iter().map(|&i| q_entries[i].clone()).collect();
    let mut body = Expr::list(vec![Expr::call(
        "group",
        vec![Expr::var(&bounds), Expr::call("concat", vec![Expr::list(items)])],
    )]);
    for &d in moved.iter().rev() {
        let def = &q.defs[d];
        let mut node = Expr::def_in(def.pat.clone(), def.bound.clone(), body);
        node.comments = def.comments.clone();
        body = node;
    }
    let bounds_list = |names: &[&String]| Expr::list(names.iter().map(|n| Expr::var(n.as_str())).collect());
    body = Expr::def_in(Pattern::var(&bounds), bounds_list(&[&l, &t, &r, &b]), body);
    let corners = [gl, gt, gr, gb].iter().map(|&v| Expr::lit(NumLit::new(v, Annotation::Plain))).collect();
    body = Expr::def_in(Pattern::List([&l, &t, &r, &b].map(Pattern::var).to_vec()), Expr::list(corners), body);

    let name = fresh_name(p, "newGroup");
    let last = *moved.iter().next_back().unwrap_or(&0);
    let at = (0..last).filter(|d| !moved.contains(d)).count();
    let at = if moved.is_empty() { q.defs.len() } else { at };
    let kept: Vec<Def> = q
        .defs
        .iter()
        .enumerate()
        .filter(|(d, _)| !moved.contains(d))
        .map(|(_, d)| d.clone())
        .collect();
    q.defs = kept;
    q.defs.insert(at, Def::new(Pattern::var(&name), body));
    let list = q.blobs_mut().expect("still simple");
    for &i in sel.iter().rev() {
        list.remove(i);
    }
    list.insert(sel[0], Expr::var(&name));
    q.renumber();
    Ok(clean_up(&q))
}
