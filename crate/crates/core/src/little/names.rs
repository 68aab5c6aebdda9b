//! Variable bookkeeping: free variables, fresh names, capture-aware
//! substitution.

use std::collections::BTreeSet;

use super::ast::*;

/// Every identifier bound or referenced anywhere in the program.
pub fn all_names(p: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for d in &p.defs {
        out.extend(d.pat.binders().into_iter().map(String::from));
    }
    for e in p.exprs() {
        collect_names(e, &mut out);
    }
    out
}

fn collect_names(e: &Expr, out: &mut BTreeSet<String>) {
    e.walk(&mut |n| match &n.kind {
        ExprKind::Var(v) => {
            out.insert(v.clone());
        }
        ExprKind::Lambda(ps, _) => {
            for p in ps {
                out.extend(p.binders().into_iter().map(String::from));
            }
        }
        ExprKind::Let { pat, .. } => out.extend(pat.binders().into_iter().map(String::from)),
        _ => {}
    });
}

/// `base` followed by the smallest positive integer giving an unused name.
pub fn fresh_name(p: &Program, base: &str) -> String {
    fresh_name_in(&all_names(p), base)
}

pub fn fresh_name_in(taken: &BTreeSet<String>, base: &str) -> String {
    (1..)
        .map(|n| format!("{base}{n}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded search")
}

/// `name` itself when free, otherwise the first free `name'`, `name''`, ...
pub fn primed_name(taken: &BTreeSet<String>, name: &str) -> String {
    let mut cand = format!("{name}'");
    while taken.contains(&cand) {
        cand.push('\'');
    }
    cand
}

pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    free_into(e, &mut Vec::new(), &mut out);
    out
}

fn free_into(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Var(v) => {
            if !bound.iter().any(|b| b == v) {
                out.insert(v.clone());
            }
        }
        ExprKind::Lambda(ps, body) => {
            let n = bound.len();
            for p in ps {
                bound.extend(p.binders().into_iter().map(String::from));
            }
            free_into(body, bound, out);
            bound.truncate(n);
        }
        ExprKind::Let {
            rec, pat, bound: b, body, ..
        } => {
            let n = bound.len();
            let names: Vec<String> = pat.binders().into_iter().map(String::from).collect();
            if *rec {
                bound.extend(names.iter().cloned());
                free_into(b, bound, out);
            } else {
                free_into(b, bound, out);
                bound.extend(names.iter().cloned());
            }
            free_into(body, bound, out);
            bound.truncate(n);
        }
        _ => {
            for c in e.children() {
                free_into(c, bound, out);
            }
        }
    }
}

/// Number of free occurrences of `name` in `e`.
pub fn count_free(e: &Expr, name: &str) -> usize {
    match &e.kind {
        ExprKind::Var(v) => usize::from(v == name),
        ExprKind::Lambda(ps, body) => {
            if ps.iter().any(|p| p.binds(name)) {
                0
            } else {
                count_free(body, name)
            }
        }
        ExprKind::Let {
            rec, pat, bound, body, ..
        } => {
            if pat.binds(name) {
                if *rec {
                    0
                } else {
                    count_free(bound, name)
                }
            } else {
                count_free(bound, name) + count_free(body, name)
            }
        }
        _ => e.children().into_iter().map(|c| count_free(c, name)).sum(),
    }
}

pub fn count_free_program(p: &Program, name: &str) -> usize {
    let mut total = 0;
    for d in &p.defs {
        total += count_free(&d.bound, name);
        if d.pat.binds(name) {
            return total;
        }
    }
    total + count_free(&p.main, name)
}

/// Replace free occurrences of `name` with `with`. Fails without touching
/// anything when a binder on the way would capture a free variable of
/// `with`.
pub fn substitute(e: &mut Expr, name: &str, with: &Expr) -> Result<(), Capture> {
    let fv = free_vars(with);
    if !can_substitute(e, name, &fv) {
        return Err(Capture);
    }
    subst_unchecked(e, name, with);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capture;

fn can_substitute(e: &Expr, name: &str, fv: &BTreeSet<String>) -> bool {
    let captures = |pats: &[&Pattern]| pats.iter().any(|p| p.binders().iter().any(|b| fv.contains(*b)));
    match &e.kind {
        ExprKind::Lambda(ps, body) => {
            if ps.iter().any(|p| p.binds(name)) || count_free(body, name) == 0 {
                return true;
            }
            !captures(&ps.iter().collect::<Vec<_>>()) && can_substitute(body, name, fv)
        }
        ExprKind::Let {
            rec, pat, bound, body, ..
        } => {
            let shadows = pat.binds(name);
            let bound_ok = if *rec {
                shadows
                    || count_free(bound, name) == 0
                    || !captures(&[pat]) && can_substitute(bound, name, fv)
            } else {
                can_substitute(bound, name, fv)
            };
            let body_ok = shadows
                || count_free(body, name) == 0
                || !captures(&[pat]) && can_substitute(body, name, fv);
            bound_ok && body_ok
        }
        _ => e.children().into_iter().all(|c| can_substitute(c, name, fv)),
    }
}

fn subst_unchecked(e: &mut Expr, name: &str, with: &Expr) {
    match &mut e.kind {
        ExprKind::Var(v) if v == name => {
            let comments = std::mem::take(&mut e.comments);
            let pos = e.pos;
            *e = with.clone();
            e.comments.splice(0..0, comments);
            e.pos = pos;
        }
        ExprKind::Lambda(ps, body) => {
            if !ps.iter().any(|p| p.binds(name)) {
                subst_unchecked(body, name, with);
            }
        }
        ExprKind::Let {
            rec, pat, bound, body, ..
        } => {
            let shadows = pat.binds(name);
            if !(shadows && *rec) {
                subst_unchecked(bound, name, with);
            }
            if !shadows {
                subst_unchecked(body, name, with);
            }
        }
        _ => {
            for c in e.children_mut() {
                subst_unchecked(c, name, with);
            }
        }
    }
}

/// Rename free occurrences of `from` to `to`.
pub fn rename_free(e: &mut Expr, from: &str, to: &str) -> Result<(), Capture> {
    substitute(e, from, &Expr::var(to))
}
