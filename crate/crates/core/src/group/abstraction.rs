use std::collections::BTreeSet;

use super::{binders_above, blobs, classify, direct_binder, names_in, parameterize, Blob, GroupError};
use crate::little::names::{all_names, count_free, fresh_name_in, free_vars};
use crate::little::{Annotation, Def, Expr, ExprKind, LocId, Pattern, Program};

#[derive(Clone, Debug, PartialEq)]
pub struct Abstraction {
    pub program: Program,
    /// False when no `[left top right bot]` binding was found; the function
    /// then takes no bounds and is not offered as a drawing tool.
    pub has_bounds: bool,
}

const BOUNDS: [&str; 4] = ["left", "top", "right", "bot"];

fn is_bounds(pat: &Pattern) -> bool {
    matches!(pat, Pattern::List(ps) if ps.len() == 4 && ps.iter().zip(BOUNDS).all(|(p, b)| p.as_var() == Some(b)))
}

/// Let nodes along the body chain, then every other let in pre-order.
fn lets_spine_first(e: &Expr) -> Vec<&Expr> {
    let mut spine = Vec::new();
    let mut cur = e;
    while let ExprKind::Let { body, .. } = &cur.kind {
        spine.push(cur);
        cur = body;
    }
    let mut rest = Vec::new();
    e.walk(&mut |n| {
        if matches!(n.kind, ExprKind::Let { .. }) && !spine.iter().any(|s| std::ptr::eq(*s, n)) {
            rest.push(n);
        }
    });
    spine.extend(rest);
    spine
}

/// Literals bound straight to a variable, with that variable.
fn named_constants(e: &Expr) -> Vec<(LocId, String)> {
    let mut out = Vec::new();
    let mut push = |pe: (&Pattern, &Expr)| {
        if let (Pattern::Var(x), ExprKind::Num(n)) = (pe.0, &pe.1.kind) {
            if n.annot != Annotation::Frozen {
                out.push((n.loc, x.clone()));
            }
        }
    };
    for n in lets_spine_first(e) {
        let ExprKind::Let { rec: false, pat, bound, .. } = &n.kind else { continue };
        if is_bounds(pat) {
            continue;
        }
        match (pat, &bound.kind) {
            (Pattern::List(ps), ExprKind::List(es)) if ps.len() == es.len() => ps.iter().zip(es).for_each(&mut push),
            _ => push((pat, bound)),
        }
    }
    out
}

/// The first `(let [left top right bot] [n n n n] ..)`, if moving it to a
/// parameter captures nothing.
fn bounds_binding(e: &Expr) -> Option<Vec<LocId>> {
    let node = lets_spine_first(e).into_iter().find(|n| match &n.kind {
        ExprKind::Let { rec: false, pat, bound, .. } => {
            is_bounds(pat) && bound.as_list().is_some_and(|xs| xs.len() == 4 && xs.iter().all(|x| x.as_num().is_some()))
        }
        _ => false,
    })?;
    let ExprKind::Let { bound, .. } = &node.kind else { unreachable!() };
    let locs: Vec<LocId> = bound.as_list()?.iter().map(|x| x.as_num().unwrap().loc).collect();
    // Uses of the four names not under this binding would be captured.
    let free = free_vars(e);
    let above = binders_above(e, locs[0]);
    let clash = BOUNDS.iter().any(|b| free.contains(*b) || above.iter().any(|a| a == b));
    (!clash).then_some(locs)
}

/// Remove the bounds binding, keeping its body.
fn drop_bounds(e: &mut Expr, first: LocId) -> bool {
    if let ExprKind::Let { pat, bound, body, .. } = &mut e.kind {
        if is_bounds(pat) && bound.as_list().and_then(|xs| xs.first()).and_then(|x| x.as_num()).is_some_and(|n| n.loc == first) {
            let mut inner = std::mem::replace(&mut **body, Expr::num(0.0));
            let mut comments = std::mem::take(&mut e.comments);
            comments.append(&mut inner.comments);
            inner.comments = comments;
            *e = inner;
            return true;
        }
    }
    e.children_mut().into_iter().any(|c| c.contains_loc(first) && drop_bounds(c, first))
}

/// Pick unique parameter names that nothing in `body` can capture or hide.
fn param_names(body: &Expr, wanted: &[(LocId, String)], reserved: &BTreeSet<String>) -> Vec<String> {
    let free = free_vars(body);
    let mut taken: BTreeSet<String> = names_in(body);
    taken.extend(reserved.iter().cloned());
    let mut used: BTreeSet<String> = reserved.clone();
    wanted
        .iter()
        .map(|(loc, x)| {
            let above = binders_above(body, *loc);
            let ok = !used.contains(x) && !free.contains(x) && !above.iter().any(|a| a == x);
            let name = if ok { x.clone() } else { fresh_name_in(&taken, x) };
            taken.insert(name.clone());
            used.insert(name.clone());
            name
        })
        .collect()
}

fn call(f: &str, args: Vec<Expr>, bounds: Option<Expr>) -> Expr {
    let head = if args.is_empty() && bounds.is_some() {
        Expr::var(f)
    } else {
        Expr::app(Expr::var(f), args)
    };
    match bounds {
        Some(b) => Expr::app(head, vec![b]),
        None => head,
    }
}

/// Turn the definition named by a blob into a function of its named,
/// unfrozen constants and (last) its bounding box; the blob becomes a call.
pub fn abstract_blob(p: &Program, blob: usize) -> Result<Abstraction, GroupError> {
    let Blob::Def(d) = classify(p, blob)? else {
        return Err(GroupError::NotADefinition(blob));
    };
    let def = &p.defs[d];
    let name = def.name().expect("blob names a def").to_string();
    let mut body = def.bound.clone();

    let bounds = bounds_binding(&body);
    let reserved: BTreeSet<String> = match bounds {
        Some(_) => BOUNDS.iter().map(|s| s.to_string()).collect(),
        None => BTreeSet::new(),
    };
    let wanted = named_constants(&body);
    let names = param_names(&body, &wanted, &reserved);

    let lit = |l: LocId| Expr::lit(p.literal(l).expect("literal in def").clone());
    let args: Vec<Expr> = wanted.iter().map(|(l, _)| lit(*l)).collect();
    let bounds_arg = bounds.as_ref().map(|ls| Expr::list(ls.iter().map(|l| lit(*l)).collect()));

    for ((loc, _), x) in wanted.iter().zip(&names) {
        parameterize(&mut body, *loc, x);
    }
    let mut params: Vec<Pattern> = names.iter().map(Pattern::var).collect();
    if let Some(ls) = &bounds {
        drop_bounds(&mut body, ls[0]);
        params.push(Pattern::vars(&BOUNDS));
    }

    let mut q = p.clone();
    let mut new_def = Def::new(Pattern::var(&name), Expr::lambda(params, body));
    new_def.comments = def.comments.clone();
    q.defs[d] = new_def;
    q.blobs_mut().expect("simple")[blob] = call(&name, args.clone(), bounds_arg);
    q.lambda_defaults.insert(name, args);
    q.renumber();
    Ok(Abstraction { program: q, has_bounds: bounds.is_some() })
}

/// Pre-order literal positions, or the first place the shapes differ.
fn align<'a>(a: &'a Expr, b: &'a Expr, path: &mut Vec<usize>, out: &mut Vec<(&'a Expr, &'a Expr)>) -> Result<(), String> {
    let same = match (&a.kind, &b.kind) {
        (ExprKind::Num(_), ExprKind::Num(_)) => {
            out.push((a, b));
            return Ok(());
        }
        (ExprKind::Str(x), ExprKind::Str(y)) => x == y,
        (ExprKind::Bool(x), ExprKind::Bool(y)) => x == y,
        (ExprKind::Var(x), ExprKind::Var(y)) => x == y,
        (ExprKind::List(x), ExprKind::List(y)) => x.len() == y.len(),
        (ExprKind::Op(o, x), ExprKind::Op(p, y)) => o == p && x.len() == y.len(),
        (ExprKind::App(_, x), ExprKind::App(_, y)) => x.len() == y.len(),
        (ExprKind::If(..), ExprKind::If(..)) => true,
        (ExprKind::Lambda(x, _), ExprKind::Lambda(y, _)) => x == y,
        (ExprKind::Let { rec: r, pat: x, .. }, ExprKind::Let { rec: s, pat: y, .. }) => r == s && x == y,
        _ => false,
    };
    if !same {
        let at: Vec<String> = path.iter().map(|i| i.to_string()).collect();
        return Err(format!("[{}]", at.join(".")));
    }
    for (i, (x, y)) in a.children().into_iter().zip(b.children()).enumerate() {
        path.push(i);
        align(x, y, path, out)?;
        path.pop();
    }
    Ok(())
}

/// Replace definitions that differ only in numbers by one function over the
/// positions where they disagree; each blob becomes a call.
pub fn merge(p: &Program, sel: &[usize]) -> Result<Program, GroupError> {
    let entries = blobs(p)?;
    let mut sel = sel.to_vec();
    sel.dedup();
    if let Some(&i) = sel.iter().find(|&&i| i >= entries.len()) {
        return Err(GroupError::UnknownBlob(i));
    }
    let mut uniq = sel.clone();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() < 2 {
        return Err(GroupError::EmptySelection);
    }
    let mut defs = Vec::new();
    for &i in &sel {
        match classify(p, i)? {
            Blob::Def(d) => defs.push(d),
            Blob::Expr => return Err(GroupError::NotADefinition(i)),
        }
    }
    for &d in &defs {
        let x = p.defs[d].name().expect("blob names a def");
        let elsewhere = p.defs.iter().any(|o| count_free(&o.bound, x) > 0)
            || entries.iter().enumerate().any(|(i, e)| !sel.contains(&i) && count_free(e, x) > 0);
        if elsewhere {
            return Err(GroupError::SharedDefinition(x.to_string()));
        }
    }
    let first = &p.defs[defs[0]].bound;
    let mut columns: Vec<Vec<&Expr>> = Vec::new();
    for &d in &defs[1..] {
        let mut pairs = Vec::new();
        align(first, &p.defs[d].bound, &mut Vec::new(), &mut pairs).map_err(GroupError::NotStructurallyEquivalent)?;
        if columns.is_empty() {
            columns = pairs.iter().map(|(a, _)| vec![*a]).collect();
        }
        for (c, (_, b)) in columns.iter_mut().zip(pairs) {
            c.push(b);
        }
    }
    let value = |e: &Expr| e.as_num().expect("aligned numbers").value;
    let varying: Vec<&Vec<&Expr>> = columns.iter().filter(|c| c.iter().any(|e| value(e) != value(c[0]))).collect();

    let mut body = first.clone();
    let wanted: Vec<(LocId, String)> = varying
        .iter()
        .map(|c| {
            let loc = c[0].as_num().unwrap().loc;
            (loc, direct_binder(first, loc).unwrap_or_else(|| "k".to_string()))
        })
        .collect();
    let mut names = param_names(&body, &wanted, &BTreeSet::new());
    // k-names always carry a number, like other generated names.
    let mut taken = names_in(&body);
    taken.extend(names.iter().cloned());
    for (n, (_, w)) in names.iter_mut().zip(&wanted) {
        if w == "k" && n == "k" {
            *n = fresh_name_in(&taken, "k");
            taken.insert(n.clone());
        }
    }
    for ((loc, _), x) in wanted.iter().zip(&names) {
        parameterize(&mut body, *loc, x);
    }

    let mut global = all_names(p);
    let f = fresh_name_in(&global, "merged");
    global.insert(f.clone());
    let params: Vec<Pattern> = names.iter().map(Pattern::var).collect();

    let mut q = p.clone();
    let calls: Vec<Expr> = (0..sel.len())
        .map(|k| {
            let args = varying.iter().map(|c| Expr::lit(c[k].as_num().unwrap().clone())).collect();
            Expr::app(Expr::var(&f), args)
        })
        .collect();
    let at = *defs.iter().min().unwrap();
    let list = q.blobs_mut().expect("simple");
    for (&i, c) in sel.iter().zip(calls) {
        list[i] = c;
    }
    let mut removed: Vec<usize> = defs.clone();
    removed.sort_unstable();
    removed.dedup();
    for &d in removed.iter().rev() {
        q.defs.remove(d);
    }
    q.defs.insert(at, Def::new(Pattern::var(&f), Expr::lambda(params, body)));
    q.renumber();
    Ok(q)
}
