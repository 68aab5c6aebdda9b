use std::fmt;

use crate::eval::Trace;
use crate::little::{format_number, Annotation, Expr, LocId, NumLit, OpName};

/// Arithmetic over literal locations and constants.
#[derive(Clone, Debug, PartialEq)]
pub enum Sym {
    Lit(f64),
    Loc(LocId),
    Bin(OpName, Box<Sym>, Box<Sym>),
}

impl Sym {
    pub fn bin(op: OpName, a: Sym, b: Sym) -> Sym {
        Sym::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn from_trace(t: &Trace) -> Sym {
        match t {
            Trace::Loc(l) => Sym::Loc(*l),
            Trace::Opaque(v) => Sym::Lit(*v),
            Trace::Op(op, args) => Sym::bin(*op, Sym::from_trace(&args[0]), Sym::from_trace(&args[1])),
        }
    }

    pub fn eval(&self, env: &impl Fn(LocId) -> Option<f64>) -> Option<f64> {
        match self {
            Sym::Lit(v) => Some(*v),
            Sym::Loc(l) => env(*l),
            Sym::Bin(op, a, b) => Some(crate::eval::trace::apply_arith(*op, a.eval(env)?, b.eval(env)?)),
        }
    }

    pub fn count(&self, loc: LocId) -> usize {
        match self {
            Sym::Lit(_) => 0,
            Sym::Loc(l) => usize::from(*l == loc),
            Sym::Bin(_, a, b) => a.count(loc) + b.count(loc),
        }
    }

    pub fn locs(&self) -> Vec<LocId> {
        let mut out = Vec::new();
        self.visit(&mut |l| {
            if !out.contains(&l) {
                out.push(l)
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(LocId)) {
        match self {
            Sym::Lit(_) => {}
            Sym::Loc(l) => f(*l),
            Sym::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn as_lit(&self) -> Option<f64> {
        match self {
            Sym::Lit(v) => Some(*v),
            _ => None,
        }
    }

    /// Program text for this expression; constants become frozen literals.
    pub fn to_expr(&self, var: &impl Fn(LocId) -> Expr) -> Expr {
        match self {
            Sym::Lit(v) => Expr::lit(NumLit::new(*v, Annotation::Frozen)),
            Sym::Loc(l) => var(*l),
            Sym::Bin(op, a, b) => Expr::op(*op, a.to_expr(var), b.to_expr(var)),
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Lit(v) => write!(f, "{}!", format_number(*v)),
            Sym::Loc(l) => write!(f, "{l}"),
            Sym::Bin(op, a, b) => write!(f, "({} {a} {b})", op.symbol()),
        }
    }
}

fn is(s: &Sym, v: f64) -> bool {
    s.as_lit() == Some(v)
}

/// Local rewrites applied bottom-up until nothing changes.
pub fn simplify(s: &Sym) -> Sym {
    let mut cur = s.clone();
    loop {
        let next = step(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn step(s: &Sym) -> Sym {
    let Sym::Bin(op, a, b) = s else {
        return s.clone();
    };
    let (a, b) = (step(a), step(b));
    use OpName::*;
    match (op, &a, &b) {
        (Div, _, Sym::Lit(y)) if *y == 0.0 => Sym::bin(*op, a, b),
        (_, Sym::Lit(x), Sym::Lit(y)) => Sym::Lit(crate::eval::trace::apply_arith(*op, *x, *y)),
        (Add, _, _) if is(&b, 0.0) => a,
        (Add, _, _) if is(&a, 0.0) => b,
        (Sub, _, _) if is(&b, 0.0) => a,
        (Sub, _, _) if a == b => Sym::Lit(0.0),
        // (a + x) - a and (x + a) - a
        (Sub, Sym::Bin(Add, x, y), _) if **x == b => (**y).clone(),
        (Sub, Sym::Bin(Add, x, y), _) if **y == b => (**x).clone(),
        // 0 - (0 - x)
        (Sub, Sym::Lit(z), Sym::Bin(Sub, z2, x)) if *z == 0.0 && is(z2, 0.0) => (**x).clone(),
        (Mul, _, _) if is(&a, 0.0) || is(&b, 0.0) => Sym::Lit(0.0),
        (Mul, _, _) if is(&b, 1.0) => a,
        (Mul, _, _) if is(&a, 1.0) => b,
        (Div, _, _) if is(&b, 1.0) => a,
        (Div, _, _) if a == b => Sym::Lit(1.0),
        _ => Sym::bin(*op, a, b),
    }
}
