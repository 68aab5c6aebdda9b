//! Group, Abstract, Duplicate and Merge over the top-level blobs of a
//! simple program.

mod abstraction;
mod bounds;
mod duplicate;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::eval::EvalError;
use crate::little::names::rename_free;
use crate::little::{Expr, ExprKind, LocId, Pattern, Program};

pub use abstraction::{abstract_blob, merge, Abstraction};
pub use bounds::group;
pub use duplicate::duplicate;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("program is not a list of definitions followed by (blobs [...])")]
    NotSimple,
    #[error("select at least two different blobs")]
    EmptySelection,
    #[error("no blob at index {0}")]
    UnknownBlob(usize),
    #[error("blob {0} is not the name of a top-level definition")]
    NotADefinition(usize),
    #[error("`{0}` is also used outside the selection")]
    SharedDefinition(String),
    #[error("definitions differ in structure at {0}")]
    NotStructurallyEquivalent(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// What a `blobs` entry stands for.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Blob {
    /// Index of the top-level def the entry names.
    Def(usize),
    /// Any other expression, typically a call to a top-level function.
    Expr,
}

pub(crate) fn blobs(p: &Program) -> Result<&[Expr], GroupError> {
    p.blobs().ok_or(GroupError::NotSimple)
}

pub(crate) fn classify(p: &Program, i: usize) -> Result<Blob, GroupError> {
    let e = blobs(p)?.get(i).ok_or(GroupError::UnknownBlob(i))?;
    Ok(match e.as_var().and_then(|x| p.def_index(x)) {
        Some(d) => Blob::Def(d),
        None => Blob::Expr,
    })
}

/// Names bound on the way from `e` down to the literal `loc`, innermost last.
pub(crate) fn binders_above(e: &Expr, loc: LocId) -> Vec<String> {
    fn go(e: &Expr, loc: LocId, out: &mut Vec<String>) -> bool {
        if matches!(&e.kind, ExprKind::Num(n) if n.loc == loc) {
            return true;
        }
        match &e.kind {
            ExprKind::Let { rec, pat, bound, body, .. } => {
                if bound.contains_loc(loc) {
                    if *rec {
                        out.extend(pat.binders().into_iter().map(String::from));
                    }
                    return go(bound, loc, out);
                }
                out.extend(pat.binders().into_iter().map(String::from));
                go(body, loc, out)
            }
            ExprKind::Lambda(ps, body) => {
                out.extend(ps.iter().flat_map(|p| p.binders()).map(String::from));
                go(body, loc, out)
            }
            _ => e.children().into_iter().any(|c| c.contains_loc(loc) && go(c, loc, out)),
        }
    }
    let mut out = Vec::new();
    go(e, loc, &mut out);
    out
}

/// The variable a literal is directly bound to by a non-recursive let, as in
/// `(let x 5 ..)` or `(let [a x] [1 5] ..)`.
pub(crate) fn direct_binder(e: &Expr, loc: LocId) -> Option<String> {
    let mut found = None;
    e.walk(&mut |n| {
        if let ExprKind::Let { rec: false, pat, bound, .. } = &n.kind {
            if let Some(x) = slot(pat, bound, loc) {
                found = Some(x.to_string());
            }
        }
    });
    found
}

fn slot<'a>(pat: &'a Pattern, bound: &Expr, loc: LocId) -> Option<&'a str> {
    match (pat, &bound.kind) {
        (Pattern::Var(x), ExprKind::Num(n)) if n.loc == loc => Some(x),
        (Pattern::List(ps), ExprKind::List(es)) if ps.len() == es.len() => ps
            .iter()
            .zip(es)
            .find(|(_, e)| matches!(&e.kind, ExprKind::Num(n) if n.loc == loc))
            .and_then(|(p, _)| p.as_var()),
        _ => None,
    }
}

/// Make the literal `loc` refer to `name` instead. A literal bound directly
/// to a variable loses its binding and the variable's uses are renamed;
/// anything else is replaced in place.
pub(crate) fn parameterize(e: &mut Expr, loc: LocId, name: &str) {
    if !unbind(e, loc, name) {
        if let Some(site) = e.find_literal_mut(loc) {
            let comments = std::mem::take(&mut site.comments);
            *site = Expr::var(name);
            site.comments = comments;
        }
    }
}

fn unbind(e: &mut Expr, loc: LocId, name: &str) -> bool {
    if let ExprKind::Let { rec: false, pat, bound, body, .. } = &mut e.kind {
        if let Some(x) = slot(pat, bound, loc).map(String::from) {
            let mut renamed = (**body).clone();
            if x != name && rename_free(&mut renamed, &x, name).is_err() {
                return false;
            }
            **body = renamed;
            let emptied = match (&mut *pat, &mut bound.kind) {
                (Pattern::List(ps), ExprKind::List(es)) => {
                    let i = es
                        .iter()
                        .position(|c| matches!(&c.kind, ExprKind::Num(n) if n.loc == loc))
                        .expect("slot found above");
                    ps.remove(i);
                    es.remove(i);
                    ps.is_empty()
                }
                _ => true,
            };
            if !emptied {
                if let (Pattern::List(ps), ExprKind::List(es)) = (&mut *pat, &mut bound.kind) {
                    if ps.len() == 1 {
                        let (p0, b0) = (ps.pop().unwrap(), es.pop().unwrap());
                        *pat = p0;
                        **bound = b0;
                    }
                }
                return true;
            }
            // Nothing left to bind.
            let ExprKind::Let { body, .. } = &mut e.kind else { unreachable!() };
            let mut inner = std::mem::replace(&mut **body, Expr::num(0.0));
            let mut comments = std::mem::take(&mut e.comments);
            comments.append(&mut inner.comments);
            inner.comments = comments;
            *e = inner;
            return true;
        }
    }
    e.children_mut().into_iter().any(|c| c.contains_loc(loc) && unbind(c, loc, name))
}

/// Every name bound or referenced anywhere in `e`.
pub(crate) fn names_in(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| match &n.kind {
        ExprKind::Var(v) => {
            out.insert(v.clone());
        }
        ExprKind::Let { pat, .. } => out.extend(pat.binders().into_iter().map(String::from)),
        ExprKind::Lambda(ps, _) => out.extend(ps.iter().flat_map(|p| p.binders()).map(String::from)),
        _ => {}
    });
    out
}
