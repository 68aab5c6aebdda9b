//! Removes the scaffolding left behind by hole digging and filling.

use std::collections::BTreeSet;

use super::chain::{from_chain, to_chain};
use crate::eval::prelude_names;
use crate::little::names::{count_free, free_vars, rename_free, substitute};
use crate::little::{Expr, ExprKind, Pattern, Program};

/// Rewrite to a fixpoint. Output of evaluation is unchanged.
pub fn clean_up(p: &Program) -> Program {
    let mut e = to_chain(p);
    loop {
        // Library names count as taken so a rename never shadows them.
        let mut taken: BTreeSet<String> = prelude_names().into_iter().collect();
        collect(&e, &mut taken);
        if !pass(&mut e, &mut taken) {
            break;
        }
    }
    let out = from_chain(e, p);
    if out == *p {
        p.clone()
    } else {
        out
    }
}

fn collect(e: &Expr, out: &mut BTreeSet<String>) {
    e.walk(&mut |n| match &n.kind {
        ExprKind::Var(v) => {
            out.insert(v.clone());
        }
        ExprKind::Let { pat, .. } => out.extend(pat.binders().into_iter().map(String::from)),
        ExprKind::Lambda(ps, _) => {
            for p in ps {
                out.extend(p.binders().into_iter().map(String::from));
            }
        }
        _ => {}
    });
}

fn pass(e: &mut Expr, taken: &mut BTreeSet<String>) -> bool {
    // Outer bindings first: a primed hole variable is inlined into its named
    // use site before that site is itself seen as an alias.
    let mut changed = false;
    if matches!(e.kind, ExprKind::Let { .. }) {
        changed |= rewrite_let(e, taken);
    }
    for c in e.children_mut() {
        changed |= pass(c, taken);
    }
    changed
}

/// Replace a let node by its body, keeping the node's comments.
fn splice_body(e: &mut Expr) {
    let ExprKind::Let { body, .. } = &mut e.kind else { return };
    let mut body = std::mem::replace(&mut **body, Expr::num(0.0));
    let mut comments = std::mem::take(&mut e.comments);
    comments.append(&mut body.comments);
    body.comments = comments;
    *e = body;
}

fn is_primed(name: &str) -> bool {
    name.ends_with('\'')
}

fn rewrite_let(e: &mut Expr, taken: &mut BTreeSet<String>) -> bool {
    let ExprKind::Let { rec, style, pat, bound, body } = &mut e.kind else {
        return false;
    };
    let rec = *rec;

    // Whole-pattern rules.
    let all_unused = pat.binders().iter().all(|x| count_free(body, x) == 0 && !(rec && count_free(bound, x) > 0));
    if all_unused {
        splice_body(e);
        return true;
    }
    if let Pattern::Var(x) = pat {
        if !rec {
            if let Some(y) = bound.as_var().filter(|y| !is_primed(y)) {
                let y = y.to_string();
                if substitute(body, x, &Expr::var(&y)).is_ok() {
                    splice_body(e);
                    return true;
                }
            }
            if is_primed(x) && count_free(body, x) == 1 && used_at_named_site(body, x) {
                let with = (**bound).clone();
                if substitute(body, x, &with).is_ok() {
                    splice_body(e);
                    return true;
                }
            }
        }
        if is_primed(x) {
            let base = x.trim_end_matches('\'').to_string();
            if !base.is_empty() && !taken.contains(&base) && rename_free(body, x, &base).is_ok() {
                if rec {
                    let _ = rename_free(bound, x, &base);
                }
                taken.insert(base.clone());
                *x = base;
                return true;
            }
        }
        return false;
    }

    let Pattern::List(ps) = pat else { return false };
    let ExprKind::List(items) = &mut bound.kind else { return false };
    if ps.len() != items.len() || rec {
        return false;
    }
    if ps.len() == 1 {
        let p0 = ps.pop().unwrap();
        let b0 = items.pop().unwrap();
        *pat = p0;
        **bound = b0;
        return true;
    }

    // Element-wise rules.
    let mut changed = false;
    let mut i = 0;
    while i < ps.len() {
        let Pattern::Var(x) = &ps[i] else {
            i += 1;
            continue;
        };
        let x = x.clone();
        if count_free(body, &x) == 0 {
            ps.remove(i);
            items.remove(i);
            changed = true;
            continue;
        }
        // Aliases of hole variables wait until the hole variable is settled.
        if let Some(y) = items[i].as_var().filter(|y| !is_primed(y)) {
            let y = y.to_string();
            let bound_here = ps.iter().any(|p| p.binds(&y)) && y != x;
            if !bound_here && substitute(body, &x, &Expr::var(&y)).is_ok() {
                ps.remove(i);
                items.remove(i);
                changed = true;
                continue;
            }
        }
        if is_primed(&x) {
            let base = x.trim_end_matches('\'').to_string();
            if !base.is_empty() && !taken.contains(&base) && rename_free(body, &x, &base).is_ok() {
                taken.insert(base.clone());
                ps[i] = Pattern::Var(base);
                changed = true;
            }
        }
        i += 1;
    }
    if changed {
        if ps.is_empty() {
            splice_body(e);
        }
        return true;
    }

    // Split into sequential lets when some element is compound and no
    // element can see the names being bound.
    let names: Vec<String> = ps.iter().filter_map(|p| p.as_var().map(String::from)).collect();
    let distinct: BTreeSet<&String> = names.iter().collect();
    if names.len() != ps.len() || distinct.len() != names.len() {
        return false;
    }
    if items.iter().all(|it| it.is_atomic()) {
        return false;
    }
    if items.iter().any(|it| free_vars(it).iter().any(|v| names.contains(v))) {
        return false;
    }
    let style = *style;
    let mut rest = std::mem::replace(&mut **body, Expr::num(0.0));
    for (x, item) in names.iter().zip(items.drain(..)).rev() {
        let mut node = Expr::let_(Pattern::var(x), item, rest);
        if let ExprKind::Let { style: s, .. } = &mut node.kind {
            *s = style;
        }
        rest = node;
    }
    rest.comments.splice(0..0, std::mem::take(&mut e.comments));
    *e = rest;
    true
}

/// The single free use of `x` in `e` is the whole value bound to a variable
/// pattern, so inlining keeps the value named.
fn used_at_named_site(e: &Expr, x: &str) -> bool {
    let mut found = false;
    named_sites(e, x, &mut found);
    found
}

fn named_sites(e: &Expr, x: &str, found: &mut bool) {
    match &e.kind {
        ExprKind::Lambda(ps, body) => {
            if !ps.iter().any(|p| p.binds(x)) {
                named_sites(body, x, found);
            }
        }
        ExprKind::Let { rec, pat, bound, body, .. } => {
            if bound_by_var(pat, bound, x) && !(*rec && pat.binds(x)) {
                *found = true;
            }
            if !(*rec && pat.binds(x)) {
                named_sites(bound, x, found);
            }
            if !pat.binds(x) {
                named_sites(body, x, found);
            }
        }
        _ => e.children().into_iter().for_each(|c| named_sites(c, x, found)),
    }
}

fn bound_by_var(pat: &Pattern, bound: &Expr, x: &str) -> bool {
    match (pat, &bound.kind) {
        (Pattern::Var(_), ExprKind::Var(v)) => v == x,
        (Pattern::List(ps), ExprKind::List(items)) if ps.len() == items.len() => {
            ps.iter().zip(items).any(|(p, b)| bound_by_var(p, b, x))
        }
        _ => false,
    }
}
