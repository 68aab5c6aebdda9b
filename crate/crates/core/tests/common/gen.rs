//! Random generators shared by the property suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;
use sketchlab_core::eval::Trace;
use sketchlab_core::little::{Annotation, LocId, OpName};
use sketchlab_core::solver::Env;

pub const TARGET: LocId = LocId(0);
const OTHERS: u32 = 6;

fn op(o: OpName, a: Trace, b: Trace) -> Trace {
    Trace::Op(o, Arc::new(vec![a, b]))
}

/// A trace not mentioning the target.
pub fn free(rng: &mut StdRng, depth: u32) -> Trace {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.7) {
            Trace::Loc(LocId(rng.gen_range(1..=OTHERS)))
        } else {
            Trace::Opaque(rng.gen_range(1..=9) as f64 / 2.0)
        };
    }
    let o = [OpName::Add, OpName::Sub, OpName::Mul][rng.gen_range(0..3)];
    op(o, free(rng, depth - 1), free(rng, depth - 1))
}

/// A trace linear in the target (which may or may not occur).
pub fn linear(rng: &mut StdRng, depth: u32) -> Trace {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) { Trace::Loc(TARGET) } else { free(rng, 1) };
    }
    match rng.gen_range(0..5) {
        0 => op(OpName::Add, linear(rng, depth - 1), linear(rng, depth - 1)),
        1 => op(OpName::Sub, linear(rng, depth - 1), linear(rng, depth - 1)),
        2 => op(OpName::Mul, linear(rng, depth - 1), free(rng, 1)),
        3 => op(OpName::Mul, free(rng, 1), linear(rng, depth - 1)),
        _ => op(OpName::Div, linear(rng, depth - 1), free_nonzero(rng)),
    }
}

/// Divisors stay away from zero: a positive location plus a constant.
fn free_nonzero(rng: &mut StdRng) -> Trace {
    op(
        OpName::Add,
        Trace::Loc(LocId(rng.gen_range(1..=OTHERS))),
        Trace::Opaque(rng.gen_range(1..=4) as f64),
    )
}

pub fn env(rng: &mut StdRng) -> Env {
    let mut env = BTreeMap::new();
    for i in 0..=OTHERS {
        let v = rng.gen_range(1.0..20.0f64);
        env.insert(LocId(i), ((v * 100.0).round() / 100.0, Annotation::Plain));
    }
    env
}

/// Same annotations, non-target values redrawn.
pub fn perturb(rng: &mut StdRng, env: &Env) -> Env {
    env.iter()
        .map(|(l, (v, a))| {
            let nv = if *l == TARGET { *v } else { rng.gen_range(1.0..20.0f64) };
            (*l, (nv, *a))
        })
        .collect()
}

const NAMES: &[&str] = &["a", "b", "x1", "left", "rect1", "k2", "color", "bounds", "line2_width", "n'"];

fn name(rng: &mut StdRng) -> String {
    NAMES[rng.gen_range(0..NAMES.len())].to_string()
}

fn number(rng: &mut StdRng) -> String {
    let v = match rng.gen_range(0..4) {
        0 => rng.gen_range(0..500).to_string(),
        1 => format!("{:.2}", rng.gen_range(0.0..1.0f64)),
        2 => format!("-{}", rng.gen_range(1..90)),
        _ => format!("{:.1}", rng.gen_range(0.0..300.0f64)),
    };
    let annot = ["", "", "!", "?"][rng.gen_range(0..4)];
    format!("{v}{annot}")
}

fn pattern(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.6) {
        return name(rng);
    }
    let n = rng.gen_range(1..4);
    let ps: Vec<String> = (0..n).map(|_| pattern(rng, depth - 1)).collect();
    format!("[{}]", ps.join(" "))
}

fn maybe_comment(rng: &mut StdRng) -> String {
    if rng.gen_bool(0.1) {
        format!("; note {}\n", rng.gen_range(0..100))
    } else {
        String::new()
    }
}

/// Source text of a random expression; it parses but need not evaluate.
pub fn expr_text(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..5) {
            0 | 1 => number(rng),
            2 => name(rng),
            3 => format!("'{}'", ["black", "none", "0", ""][rng.gen_range(0..4)]),
            _ => ["true", "false"][rng.gen_range(0..2)].to_string(),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => {
            let n = rng.gen_range(0..5);
            let items: Vec<String> = (0..n).map(|_| expr_text(rng, d)).collect();
            format!("[{}]", items.join(" "))
        }
        1 => {
            let op = ["+", "-", "*", "/", "<", "=", ">="][rng.gen_range(0..7)];
            format!("({op} {} {})", expr_text(rng, d), expr_text(rng, d))
        }
        2 => {
            let n = rng.gen_range(1..3);
            let ps: Vec<String> = (0..n).map(|_| pattern(rng, 1)).collect();
            format!("(λ ({}) {})", ps.join(" "), expr_text(rng, d))
        }
        3 => {
            let n = rng.gen_range(1..4);
            let args: Vec<String> = (0..n).map(|_| expr_text(rng, d)).collect();
            format!("({} {})", name(rng), args.join(" "))
        }
        4 => {
            let kw = ["let", "letrec"][rng.gen_range(0..2)];
            format!(
                "({kw} {} {}\n{}{})",
                pattern(rng, 1),
                expr_text(rng, d),
                maybe_comment(rng),
                expr_text(rng, d)
            )
        }
        5 => format!("(if {} {} {})", expr_text(rng, d), expr_text(rng, d), expr_text(rng, d)),
        _ => format!("(scaleBetween {} {} {})", name(rng), name(rng), number(rng)),
    }
}

/// Source text of a random program: some defs, then a blobs list or a
/// plain expression.
pub fn program_text(rng: &mut StdRng) -> String {
    let mut out = maybe_comment(rng);
    for _ in 0..rng.gen_range(0..5) {
        out.push_str(&maybe_comment(rng));
        out.push_str(&format!("(def {} {})\n\n", pattern(rng, 1), expr_text(rng, 3)));
    }
    if rng.gen_bool(0.7) {
        let n = rng.gen_range(0..4);
        let items: Vec<String> = (0..n).map(|_| expr_text(rng, 1)).collect();
        out.push_str(&format!("(blobs [ {} ])\n", items.join(" ")));
    } else {
        out.push_str(&expr_text(rng, 3));
        out.push('\n');
    }
    out.push_str(&maybe_comment(rng));
    out
}
