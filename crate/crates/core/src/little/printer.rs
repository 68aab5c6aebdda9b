//! Canonical, readable rendering of `little` programs.
//!
//! Let-chains are aligned at one indentation level with the final body two
//! columns further in; top-level definitions are separated by blank lines.

use super::ast::*;

const WIDTH: usize = 80;

pub fn unparse(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.defs {
        push_comments(&mut out, &d.comments, 0);
        out.push_str(&def_form(&d.pat, &d.bound, 0));
        out.push_str("\n\n");
    }
    push_comments(&mut out, &p.main.comments, 0);
    out.push_str(&pp_body(&p.main, 0));
    for c in &p.trailing {
        out.push('\n');
        out.push_str(&comment_line(c));
    }
    out.push('\n');
    out
}

pub fn unparse_expr(e: &Expr) -> String {
    pp(e, 0)
}

pub fn pattern_text(p: &Pattern) -> String {
    match p {
        Pattern::Var(v) => v.clone(),
        Pattern::List(ps) => format!("[{}]", ps.iter().map(pattern_text).collect::<Vec<_>>().join(" ")),
    }
}

pub fn literal_text(n: &NumLit) -> String {
    format!("{}{}", n.text, n.annot.suffix())
}

fn comment_line(c: &str) -> String {
    if c.is_empty() {
        ";".to_string()
    } else {
        format!("; {c}")
    }
}

fn push_comments(out: &mut String, cs: &[String], ind: usize) {
    for c in cs {
        out.push_str(&comment_line(c));
        out.push('\n');
        out.push_str(&" ".repeat(ind));
    }
}

/// Dangling comments before a closing bracket, ending on a fresh line.
fn closing(trailing: &[String], ind: usize) -> String {
    let mut s = String::new();
    for c in trailing {
        s.push('\n');
        s.push_str(&" ".repeat(ind + 2));
        s.push_str(&comment_line(c));
    }
    if !trailing.is_empty() {
        s.push('\n');
        s.push_str(&" ".repeat(ind));
    }
    s
}

/// Single-line rendering, if the expression has one.
fn flat(e: &Expr) -> Option<String> {
    if !e.comments.is_empty() || !e.trailing.is_empty() {
        return None;
    }
    Some(match &e.kind {
        ExprKind::Num(n) => literal_text(n),
        ExprKind::Str(s) => format!("'{s}'"),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Var(v) => v.clone(),
        ExprKind::List(items) => {
            let parts = items.iter().map(flat).collect::<Option<Vec<_>>>()?;
            if items.is_empty() {
                "[]".to_string()
            } else if spaced_list(items) {
                format!("[ {} ]", parts.join(" "))
            } else {
                format!("[{}]", parts.join(" "))
            }
        }
        ExprKind::Op(op, args) => {
            let parts = args.iter().map(flat).collect::<Option<Vec<_>>>()?;
            format!("({} {})", op.symbol(), parts.join(" "))
        }
        ExprKind::App(f, args) => {
            let mut parts = vec![flat(f)?];
            let wide = matches!(f.as_var(), Some("blobs" | "concat"));
            for a in args {
                match (&a.kind, wide) {
                    (ExprKind::List(items), true) if !items.is_empty() && a.comments.is_empty() && a.trailing.is_empty() => {
                        let inner = items.iter().map(flat).collect::<Option<Vec<_>>>()?;
                        parts.push(format!("[ {} ]", inner.join(" ")));
                    }
                    _ => parts.push(flat(a)?),
                }
            }
            format!("({})", parts.join(" "))
        }
        ExprKind::Lambda(params, body) => {
            if matches!(body.kind, ExprKind::Let { .. }) {
                return None;
            }
            format!("(λ {} {})", params_text(params), flat(body)?)
        }
        ExprKind::If(c, a, b) => format!("(if {} {} {})", flat(c)?, flat(a)?, flat(b)?),
        ExprKind::Let { .. } => return None,
    })
}

fn params_text(params: &[Pattern]) -> String {
    format!("({})", params.iter().map(pattern_text).collect::<Vec<_>>().join(" "))
}

/// Lists holding calls or other compound forms get inner padding; lists of
/// atoms and lists of lists stay tight.
fn spaced_list(items: &[Expr]) -> bool {
    items.iter().any(|i| !i.is_atomic() && !matches!(i.kind, ExprKind::List(_)))
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn fits(ind: usize, s: &str) -> bool {
    ind + width(s) <= WIDTH
}

/// Render `e` starting at column `ind`; continuation lines are indented
/// absolutely.
fn pp(e: &Expr, ind: usize) -> String {
    let mut out = String::new();
    push_comments(&mut out, &e.comments, ind);
    out.push_str(&pp_bare(e, ind));
    out
}

fn pp_bare(e: &Expr, ind: usize) -> String {
    let plain = Expr {
        comments: Vec::new(),
        ..e.clone()
    };
    if let Some(f) = flat(&plain) {
        if fits(ind, &f) {
            return f;
        }
    }
    let pad = |n: usize| " ".repeat(n);
    match &e.kind {
        ExprKind::Num(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Var(_) => {
            let Expr { trailing, .. } = e;
            let text = flat(&Expr {
                trailing: Vec::new(),
                comments: Vec::new(),
                ..e.clone()
            })
            .unwrap_or_default();
            format!("{text}{}", closing(trailing, ind.saturating_sub(2)))
        }
        ExprKind::List(items) => {
            if items.len() == 1 && e.trailing.is_empty() {
                return format!("[ {} ]", pp(&items[0], ind + 2));
            }
            if let Some(packed) = packed_list(items, ind).filter(|_| e.trailing.is_empty()) {
                return packed;
            }
            let mut s = "[".to_string();
            for it in items {
                s.push('\n');
                s.push_str(&pad(ind + 2));
                s.push_str(&pp(it, ind + 2));
            }
            for c in &e.trailing {
                s.push('\n');
                s.push_str(&pad(ind + 2));
                s.push_str(&comment_line(c));
            }
            s.push('\n');
            s.push_str(&pad(ind));
            s.push(']');
            s
        }
        ExprKind::Op(op, args) => application(op.symbol().to_string(), args, &e.trailing, ind),
        ExprKind::App(f, args) => {
            let head = pp(f, ind + 1);
            application(head, args, &e.trailing, ind)
        }
        ExprKind::Lambda(params, body) => {
            let head = format!("(λ {}", params_text(params));
            let mut s = head;
            if matches!(body.kind, ExprKind::Let { style: LetStyle::Def, .. }) {
                s.push_str(&block(body, ind + 2));
            } else {
                s.push('\n');
                s.push_str(&pad(ind + 2));
                s.push_str(&pp(body, ind + 2));
            }
            s.push_str(&closing(&e.trailing, ind));
            s.push(')');
            s
        }
        ExprKind::If(c, a, b) => {
            let mut s = format!("(if {}", pp(c, ind + 4));
            for branch in [a, b] {
                s.push('\n');
                s.push_str(&pad(ind + 2));
                s.push_str(&pp(branch, ind + 2));
            }
            s.push_str(&closing(&e.trailing, ind));
            s.push(')');
            s
        }
        ExprKind::Let {
            style: LetStyle::Def, ..
        } => {
            // A bare block outside a def/λ: render the items, no parens.
            block(e, ind).trim_start().to_string()
        }
        ExprKind::Let {
            rec, pat, bound, body, ..
        } => {
            let kw = if *rec { "letrec" } else { "let" };
            let head = format!("({kw} {} ", pattern_text(pat));
            let mut s = head.clone();
            s.push_str(&pp(bound, ind + width(&head)));
            s.push('\n');
            let chained = matches!(body.kind, ExprKind::Let { style: LetStyle::Let, .. }) && body.comments.is_empty();
            let body_ind = if chained { ind } else { ind + 2 };
            s.push_str(&pad(body_ind));
            s.push_str(&pp(body, body_ind));
            s.push_str(&closing(&e.trailing, ind));
            s.push(')');
            s
        }
    }
}

/// Single-line items filled greedily, continuation lines aligned under the
/// first item.
fn packed_list(items: &[Expr], ind: usize) -> Option<String> {
    let spaced = spaced_list(items);
    let (open, close) = if spaced { ("[ ", " ]") } else { ("[", "]") };
    let col = ind + open.len();
    let texts: Vec<String> = items.iter().map(|it| pp(it, col)).collect();
    if texts.iter().any(|t| t.contains('\n')) {
        return None;
    }
    let mut s = open.to_string();
    let mut at = col;
    for (i, t) in texts.iter().enumerate() {
        let last = i + 1 == texts.len();
        let need = width(t) + if last { close.len() } else { 0 };
        if i > 0 {
            if at + 1 + need > WIDTH {
                s.push('\n');
                s.push_str(&" ".repeat(col));
                at = col;
            } else {
                s.push(' ');
                at += 1;
            }
        }
        s.push_str(t);
        at += width(t);
    }
    s.push_str(close);
    Some(s)
}

fn application(head: String, args: &[Expr], trailing: &[String], ind: usize) -> String {
    let mut s = format!("({head}");
    let col_of = |s: &str| match s.rsplit_once('\n') {
        Some((_, last)) => width(last),
        None => ind + width(s),
    };
    let natural = col_of(&s) + 1;
    let arg_col = if head.contains('\n') || natural > WIDTH / 2 { ind + 2 } else { natural };
    for a in args {
        let text = pp(a, arg_col);
        let first_line = text.lines().next().unwrap_or("");
        let col = col_of(&s) + 1;
        let same_line = if text.contains('\n') {
            col == arg_col && col + width(first_line) <= WIDTH
        } else {
            col + width(&text) <= WIDTH
        };
        if same_line {
            s.push(' ');
        } else {
            s.push('\n');
            s.push_str(&" ".repeat(arg_col));
        }
        s.push_str(&text);
    }
    s.push_str(&closing(trailing, ind));
    s.push(')');
    s
}

/// Items of a def block, each on its own paragraph at column `ind`. The
/// returned text starts with the line break before the first item.
fn block(e: &Expr, ind: usize) -> String {
    let pad = " ".repeat(ind);
    let mut s = String::new();
    let mut cur = e;
    loop {
        match &cur.kind {
            ExprKind::Let {
                style: LetStyle::Def,
                pat,
                bound,
                body,
                ..
            } => {
                s.push_str("\n\n");
                s.push_str(&pad);
                push_comments(&mut s, &cur.comments, ind);
                let mut b = (**bound).clone();
                b.trailing.extend(cur.trailing.iter().cloned());
                s.push_str(&def_form(pat, &b, ind));
                cur = body;
            }
            _ => {
                s.push_str("\n\n");
                s.push_str(&pad);
                s.push_str(&pp(cur, ind));
                return s;
            }
        }
    }
}

fn def_form(pat: &Pattern, bound: &Expr, ind: usize) -> String {
    let head = format!("(def {}", pattern_text(pat));
    if matches!(bound.kind, ExprKind::Let { style: LetStyle::Def, .. }) && bound.comments.is_empty() {
        return format!("{head}{})", block(bound, ind + 2));
    }
    let one_line = !contains_binding_form(bound) && bound.comments.is_empty();
    if one_line {
        if let Some(f) = flat(bound) {
            let line = format!("{head} {f})");
            if fits(ind, &line) {
                return line;
            }
        }
    }
    format!("{head}\n{}{})", " ".repeat(ind + 2), pp_body(bound, ind + 2))
}

fn pp_body(e: &Expr, ind: usize) -> String {
    pp_bare(e, ind)
}

fn contains_binding_form(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |n| {
        if matches!(n.kind, ExprKind::Let { .. } | ExprKind::Lambda(..)) {
            found = true;
        }
    });
    found
}
