//! Top-level definitions viewed as one nested `def` expression, so the
//! rewrites in this module treat top-level and inner bindings alike.

use crate::little::{Def, Expr, ExprKind, LetStyle, Program};

pub fn to_chain(p: &Program) -> Expr {
    let mut e = p.main.clone();
    for d in p.defs.iter().rev() {
        let mut node = Expr::def_in(d.pat.clone(), d.bound.clone(), e);
        if let ExprKind::Let { rec, .. } = &mut node.kind {
            *rec = d.rec;
        }
        node.comments = d.comments.clone();
        e = node;
    }
    e
}

/// Inverse of [`to_chain`]; trailing comments and recorded defaults are
/// taken from `like`.
pub fn from_chain(mut e: Expr, like: &Program) -> Program {
    let mut defs = Vec::new();
    loop {
        match e.kind {
            ExprKind::Let { rec, style: LetStyle::Def, pat, bound, body } => {
                defs.push(Def { pat, bound: *bound, rec, comments: e.comments });
                e = *body;
            }
            kind => {
                e = Expr { kind, ..e };
                break;
            }
        }
    }
    let mut p = Program {
        defs,
        main: e,
        trailing: like.trailing.clone(),
        lambda_defaults: like.lambda_defaults.clone(),
    };
    p.renumber();
    p
}
