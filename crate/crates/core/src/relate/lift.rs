//! Hoisting constants into named bindings followed by a hole binding.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::eval::prelude_names;
use crate::solver::Sym;
use crate::little::names::{all_names, count_free, fresh_name_in, primed_name, rename_free};
use crate::little::{Def, Expr, ExprKind, LetStyle, LocId, NumLit, Pattern, Program};

/// Where the lifted and hole bindings were placed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Scope {
    /// New top-level defs at these indices.
    TopLevel { lifted_def: usize, hole_def: usize },
    /// Nested lets inside one top-level def, or inside main when `None`.
    Inside { container: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoleRecord {
    pub scope: Scope,
    pub names: Vec<String>,
    pub primed_names: Vec<String>,
    pub derived_defs: Vec<String>,
}

/// One constant to lift.
#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub loc: LocId,
    pub name: String,
    pub primed: String,
    lit: NumLit,
    /// Index of the top-level constant def the literal is moved out of.
    moved_from: Option<usize>,
}

/// A derived quantity to name after the hole, written over lifted locations.
pub(crate) struct Derived {
    pub base: String,
    pub sym: Sym,
}

fn container_of(p: &Program, loc: LocId) -> usize {
    p.def_index_of(loc).unwrap_or(p.defs.len())
}

/// Binder names from the container root down to the literal, and whether
/// the innermost one binds the literal itself.
fn binder_path(e: &Expr, loc: LocId, out: &mut Vec<String>) -> bool {
    match &e.kind {
        ExprKind::Let { pat, bound, body, .. } => {
            if bound.contains_loc(loc) {
                match_pattern(pat, bound, loc, out)
            } else {
                binder_path(body, loc, out)
            }
        }
        _ => match e.children().into_iter().find(|c| c.contains_loc(loc)) {
            Some(c) => binder_path(c, loc, out),
            None => false,
        },
    }
}

fn match_pattern(pat: &Pattern, e: &Expr, loc: LocId, out: &mut Vec<String>) -> bool {
    match (pat, &e.kind) {
        (Pattern::Var(x), ExprKind::Num(n)) if n.loc == loc => {
            out.push(x.clone());
            true
        }
        (Pattern::Var(x), _) => {
            out.push(x.clone());
            binder_path(e, loc, out)
        }
        (Pattern::List(ps), ExprKind::List(es)) if ps.len() == es.len() => {
            let i = es.iter().position(|c| c.contains_loc(loc)).expect("literal is in this list");
            match_pattern(&ps[i], &es[i], loc, out)
        }
        _ => binder_path(e, loc, out),
    }
}

/// Position of a literal directly bound by a top-level def, when the def
/// can give it up: `(def x n)` or element `i` of `(def [.. x ..] [.. n ..])`.
fn top_level_slot(d: &Def, loc: LocId) -> Option<Option<usize>> {
    match (&d.pat, &d.bound.kind) {
        (Pattern::Var(_), ExprKind::Num(n)) if n.loc == loc => Some(None),
        (Pattern::List(ps), ExprKind::List(es)) if ps.len() == es.len() => {
            let i = es.iter().position(|c| matches!(&c.kind, ExprKind::Num(n) if n.loc == loc))?;
            ps[i].as_var().map(|_| Some(i))
        }
        _ => None,
    }
}

pub(crate) struct Lifting {
    pub entries: Vec<Entry>,
    scope_at: Placement,
    taken: BTreeSet<String>,
}

#[derive(Clone, Copy)]
enum Placement {
    Top(usize),
    Inside(usize),
}

/// Decide names and placement for lifting `locs` out of `p`.
pub(crate) fn plan(p: &Program, locs: &[LocId]) -> Lifting {
    let mut locs = locs.to_vec();
    locs.sort();
    locs.dedup();
    let mut taken = all_names(p);
    taken.extend(prelude_names());
    let containers: BTreeSet<usize> = locs.iter().map(|l| container_of(p, *l)).collect();
    let first = *containers.iter().next().expect("at least one location");

    let slot = |l: LocId| -> Option<(usize, String)> {
        let c = container_of(p, l);
        let d = p.defs.get(c)?;
        top_level_slot(d, l)?;
        let mut path = Vec::new();
        match_pattern(&d.pat, &d.bound, l, &mut path);
        let name = path.pop()?;
        // The moved binding must be the only top-level one of its name, and
        // no def it passes over may refer to that name.
        let defs_binding = p.defs.iter().filter(|d| d.pat.binds(&name)).count();
        let passes = p.defs[first..c].iter().any(|d| count_free(&d.bound, &name) > 0);
        (defs_binding == 1 && !passes).then_some((c, name))
    };

    let all_movable = locs.iter().all(|l| slot(*l).is_some());
    let scope_at = if containers.len() == 1 && !all_movable {
        Placement::Inside(first)
    } else {
        Placement::Top(first)
    };

    let mut entries = Vec::new();
    for &l in &locs {
        let lit = p.literal(l).expect("location names a literal").clone();
        let moved = match scope_at {
            Placement::Top(_) => slot(l),
            Placement::Inside(_) => None,
        };
        let name = match &moved {
            Some((_, n)) => n.clone(),
            None => {
                let mut path = Vec::new();
                let c = container_of(p, l);
                let direct = match p.defs.get(c) {
                    Some(d) => match_pattern(&d.pat, &d.bound, l, &mut path),
                    None => binder_path(&p.main, l, &mut path),
                };
                let base = if direct { path.join("_") } else { String::new() };
                if base.is_empty() || taken.contains(&base) {
                    fresh_name_in(&taken, if base.is_empty() { "k" } else { &base })
                } else {
                    base
                }
            }
        };
        taken.insert(name.clone());
        let primed = primed_name(&taken, &name);
        taken.insert(primed.clone());
        entries.push(Entry { loc: l, name, primed, lit, moved_from: moved.map(|(c, _)| c) });
    }
    Lifting { entries, scope_at, taken }
}

fn pattern_of(names: &[String]) -> Pattern {
    if names.len() == 1 {
        Pattern::var(&names[0])
    } else {
        Pattern::List(names.iter().map(Pattern::var).collect())
    }
}

fn bound_of(mut items: Vec<Expr>) -> Expr {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Expr::list(items)
    }
}

impl Lifting {
    pub fn name_of(&self, loc: LocId) -> Option<&str> {
        self.entries.iter().find(|e| e.loc == loc).map(|e| e.name.as_str())
    }

    /// Rewrite `p`: lifted bindings, then the hole binding whose items are
    /// given by `fill` (default: the unprimed variable). Derived defs go in between.
    pub fn apply(
        &self,
        p: &Program,
        fill: &BTreeMap<LocId, Expr>,
        derived: &[Derived],
    ) -> (Program, HoleRecord) {
        let mut q = p.clone();
        let var_of = |l: LocId| Expr::var(self.name_of(l).expect("solution uses lifted locations only"));

        // Use sites reference the primed names.
        let mut emptied = Vec::new();
        for e in &self.entries {
            match e.moved_from {
                Some(c) => {
                    let d = &mut q.defs[c];
                    let slot = top_level_slot(d, e.loc).expect("slot checked when planning");
                    match slot {
                        None => emptied.push(c),
                        Some(i) => {
                            if let (Pattern::List(ps), ExprKind::List(es)) = (&mut d.pat, &mut d.bound.kind) {
                                ps.remove(i);
                                es.remove(i);
                                if ps.is_empty() {
                                    emptied.push(c);
                                }
                            }
                        }
                    }
                    for d in &mut q.defs[c + 1..] {
                        rename_free(&mut d.bound, &e.name, &e.primed).expect("primed names are fresh");
                    }
                    rename_free(&mut q.main, &e.name, &e.primed).expect("primed names are fresh");
                }
                None => {
                    let site = q.find_literal_mut(e.loc).expect("literal present");
                    let comments = std::mem::take(&mut site.comments);
                    *site = Expr::var(&e.primed);
                    site.comments = comments;
                }
            }
        }

        let names: Vec<String> = self.entries.iter().map(|e| e.name.clone()).collect();
        let primed: Vec<String> = self.entries.iter().map(|e| e.primed.clone()).collect();
        let lifted = (pattern_of(&names), bound_of(self.entries.iter().map(|e| Expr::lit(e.lit.clone())).collect()));
        let hole_items = self
            .entries
            .iter()
            .map(|e| fill.get(&e.loc).cloned().unwrap_or_else(|| Expr::var(&e.name)))
            .collect();
        let hole = (pattern_of(&primed), bound_of(hole_items));
        let mut taken = self.taken.clone();
        // Derived names sit between the constants and the hole so a fill can use them.
        let mut bindings = vec![lifted];
        let mut derived_names = Vec::new();
        for d in derived {
            let name = if taken.contains(&d.base) { fresh_name_in(&taken, &d.base) } else { d.base.clone() };
            taken.insert(name.clone());
            bindings.push((Pattern::var(&name), d.sym.to_expr(&var_of)));
            derived_names.push(name);
        }
        let hole_at = bindings.len();
        bindings.push(hole);

        let scope = match self.scope_at {
            Placement::Top(at) => {
                emptied.dedup();
                for c in emptied.into_iter().rev() {
                    q.defs.remove(c);
                }
                for (k, (pat, bound)) in bindings.into_iter().enumerate() {
                    q.defs.insert(at + k, Def::new(pat, bound));
                }
                Scope::TopLevel { lifted_def: at, hole_def: at + hole_at }
            }
            Placement::Inside(c) => {
                let root = match q.defs.get_mut(c) {
                    Some(d) => &mut d.bound,
                    None => &mut q.main,
                };
                wrap(placement_node(root, &primed), bindings);
                Scope::Inside { container: (c < p.defs.len()).then_some(c) }
            }
        };
        q.renumber();
        let record = HoleRecord { scope, names, primed_names: primed, derived_defs: derived_names };
        (q, record)
    }
}

fn mentions(e: &Expr, primed: &[String]) -> bool {
    primed.iter().any(|x| count_free(e, x) > 0)
}

/// Innermost node that still encloses every use site: descend through
/// let bodies and lambda bodies while they contain all of them.
fn placement_node<'e>(e: &'e mut Expr, primed: &[String]) -> &'e mut Expr {
    let descend = match &e.kind {
        ExprKind::Let { bound, .. } => !mentions(bound, primed),
        ExprKind::Lambda(..) => true,
        _ => false,
    };
    if !descend {
        return e;
    }
    match &mut e.kind {
        ExprKind::Let { body, .. } | ExprKind::Lambda(_, body) => placement_node(body, primed),
        _ => unreachable!(),
    }
}

fn wrap(node: &mut Expr, bindings: Vec<(Pattern, Expr)>) {
    let style = match &node.kind {
        ExprKind::Let { style, .. } => *style,
        _ => LetStyle::Let,
    };
    let comments = std::mem::take(&mut node.comments);
    let mut inner = std::mem::replace(node, Expr::num(0.0));
    for (pat, bound) in bindings.into_iter().rev() {
        let mut l = Expr::let_(pat, bound, inner);
        if let ExprKind::Let { style: s, .. } = &mut l.kind {
            *s = style;
        }
        inner = l;
    }
    inner.comments = comments;
    *node = inner;
}
