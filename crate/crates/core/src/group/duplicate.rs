use super::{blobs, classify, Blob, GroupError};
use crate::little::names::{all_names, fresh_name_in};
use crate::little::{Def, Expr, Pattern, Program};

/// `rect1` -> `rect`, so copies are numbered like drawn shapes.
fn stem(name: &str) -> &str {
    let s = name.trim_end_matches(|c: char| c.is_ascii_digit());
    if s.is_empty() {
        name
    } else {
        s
    }
}

/// Append a verbatim copy of a blob. A def is copied under fresh names;
/// literals get new locations, so the copies change independently.
pub fn duplicate(p: &Program, blob: usize) -> Result<Program, GroupError> {
    let entry = blobs(p)?.get(blob).ok_or(GroupError::UnknownBlob(blob))?.clone();
    let mut q = p.clone();
    let copy = match classify(p, blob)? {
        Blob::Def(d) => {
            let def = &p.defs[d];
            let mut taken = all_names(p);
            let mut fresh = |x: &str| {
                let n = fresh_name_in(&taken, stem(x));
                taken.insert(n.clone());
                n
            };
            let pat = rename_pattern(&def.pat, &mut fresh);
            let mut bound = def.bound.clone();
            if def.rec {
                for (old, new) in def.pat.binders().into_iter().zip(pat.binders()) {
                    let _ = crate::little::names::rename_free(&mut bound, old, new);
                }
            }
            let name = pat.as_var().expect("blob defs bind one name").to_string();
            let mut new_def = Def::new(pat, bound);
            new_def.comments = def.comments.clone();
            q.defs.push(new_def);
            Expr::var(&name)
        }
        Blob::Expr => entry,
    };
    q.blobs_mut().expect("simple").push(copy);
    q.renumber();
    Ok(q)
}

fn rename_pattern(p: &Pattern, fresh: &mut impl FnMut(&str) -> String) -> Pattern {
    match p {
        Pattern::Var(x) => Pattern::var(fresh(x)),
        Pattern::List(ps) => Pattern::List(ps.iter().map(|q| rename_pattern(q, fresh)).collect()),
    }
}
