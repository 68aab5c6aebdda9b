use std::collections::BTreeMap;

use thiserror::Error;

use super::sym::{simplify, Sym};
use crate::eval::Trace;
use crate::little::{Annotation, LocId, OpName};

pub type Env = BTreeMap<LocId, (f64, Annotation)>;

#[derive(Clone, Debug)]
pub struct Equation {
    pub lhs: Trace,
    pub rhs: Trace,
    pub env: Env,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no unfrozen constant contributes to the equation")]
    NoDegreesOfFreedom,
    #[error("cannot solve for {0}: it occurs non-linearly or cancels out")]
    Unsolvable(LocId),
}

const VERIFY_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;

impl Equation {
    pub fn new(lhs: Trace, rhs: Trace, env: Env) -> Self {
        Equation { lhs, rhs, env }
    }

    fn lookup(&self) -> impl Fn(LocId) -> Option<f64> + '_ {
        |l| self.env.get(&l).map(|(v, _)| *v)
    }

    /// Solver candidates in preference order: thawed before plain, then by
    /// location. Frozen literals never appear in traces as locations, but
    /// are filtered here too for callers building traces by hand.
    pub fn candidates(&self) -> Vec<LocId> {
        let mut locs = self.lhs.locs();
        locs.extend(self.rhs.locs());
        rank(locs.into_iter(), &self.env)
    }
}

pub fn rank(locs: impl Iterator<Item = LocId>, env: &Env) -> Vec<LocId> {
    let mut out: Vec<(u8, LocId)> = locs
        .filter_map(|l| match env.get(&l).map(|(_, a)| *a) {
            Some(Annotation::Thawed) => Some((0, l)),
            Some(Annotation::Plain) => Some((1, l)),
            _ => None,
        })
        .collect();
    out.sort();
    out.dedup();
    out.into_iter().map(|(_, l)| l).collect()
}

pub fn choose_loc(eq: &Equation) -> Result<LocId, SolveError> {
    eq.candidates().first().copied().ok_or(SolveError::NoDegreesOfFreedom)
}

/// Express `target` in terms of the other locations so the equation holds.
pub fn solve_for_loc(eq: &Equation, target: LocId) -> Result<Sym, SolveError> {
    let unsolvable = SolveError::Unsolvable(target);
    let (l, r) = (Sym::from_trace(&eq.lhs), Sym::from_trace(&eq.rhs));
    let raw = match (l.count(target), r.count(target)) {
        (0, 0) => return Err(unsolvable),
        (1, 0) => isolate(&l, r, target),
        (0, 1) => isolate(&r, l, target),
        _ => linear(&l, &r, target, &eq.lookup()),
    }
    .ok_or(unsolvable.clone())?;
    let sol = simplify(&raw);
    if sol.count(target) > 0 || !verify(eq, target, &sol) {
        return Err(unsolvable);
    }
    Ok(sol)
}

/// `lhs = rhs` holds after replacing `target` by the solution's value.
pub fn verify(eq: &Equation, target: LocId, sol: &Sym) -> bool {
    let look = eq.lookup();
    let Some(v) = sol.eval(&look) else {
        return false;
    };
    if !v.is_finite() {
        return false;
    }
    let with = |l: LocId| if l == target { Some(v) } else { look(l) };
    match (eq.lhs.eval(&with), eq.rhs.eval(&with)) {
        (Some(a), Some(b)) => (a - b).abs() <= VERIFY_TOL * a.abs().max(b.abs()).max(1.0),
        _ => false,
    }
}

/// Invert the operators around the single occurrence of `target`.
fn isolate(side: &Sym, other: Sym, target: LocId) -> Option<Sym> {
    use OpName::*;
    match side {
        Sym::Loc(l) if *l == target => Some(other),
        Sym::Bin(op, a, b) => {
            let in_a = a.count(target) > 0;
            let (inner, rest) = if in_a { (a, (**b).clone()) } else { (b, (**a).clone()) };
            let acc = match (op, in_a) {
                (Add, _) => Sym::bin(Sub, other, rest),
                (Sub, true) => Sym::bin(Add, other, rest),
                (Sub, false) => Sym::bin(Sub, rest, other),
                (Mul, _) => Sym::bin(Div, other, rest),
                (Div, true) => Sym::bin(Mul, other, rest),
                (Div, false) => Sym::bin(Div, rest, other),
                _ => return None,
            };
            isolate(inner, acc, target)
        }
        _ => None,
    }
}

/// `e = coeff * target + constant`, with both parts free of `target`.
fn linear_form(e: &Sym, target: LocId) -> Option<(Option<Sym>, Sym)> {
    use OpName::*;
    match e {
        Sym::Loc(l) if *l == target => Some((Some(Sym::Lit(1.0)), Sym::Lit(0.0))),
        Sym::Lit(_) | Sym::Loc(_) => Some((None, e.clone())),
        Sym::Bin(op, a, b) => {
            let (ca, ka) = linear_form(a, target)?;
            let (cb, kb) = linear_form(b, target)?;
            let add = |x: Option<Sym>, y: Option<Sym>, op| match (x, y) {
                (None, None) => None,
                (Some(x), None) => Some(x),
                (None, Some(y)) => Some(if op == Sub { Sym::bin(Sub, Sym::Lit(0.0), y) } else { y }),
                (Some(x), Some(y)) => Some(Sym::bin(op, x, y)),
            };
            match op {
                Add | Sub => Some((add(ca, cb, *op), Sym::bin(*op, ka, kb))),
                Mul => match (ca, cb) {
                    (Some(_), Some(_)) => None,
                    (Some(c), None) => Some((Some(Sym::bin(Mul, c, kb.clone())), Sym::bin(Mul, ka, kb))),
                    (None, Some(c)) => Some((Some(Sym::bin(Mul, ka.clone(), c)), Sym::bin(Mul, ka, kb))),
                    (None, None) => Some((None, e.clone())),
                },
                Div => match cb {
                    Some(_) => None,
                    None => Some((ca.map(|c| Sym::bin(Div, c, kb.clone())), Sym::bin(Div, ka, kb))),
                },
                _ => None,
            }
        }
    }
}

fn linear(l: &Sym, r: &Sym, target: LocId, look: &impl Fn(LocId) -> Option<f64>) -> Option<Sym> {
    use OpName::*;
    let (a, b) = linear_form(l, target)?;
    let (c, d) = linear_form(r, target)?;
    let a = a.unwrap_or(Sym::Lit(0.0));
    let c = c.unwrap_or(Sym::Lit(0.0));
    let denom = Sym::bin(Sub, a, c);
    if denom.eval(look)?.abs() < ZERO_TOL {
        return None;
    }
    Some(Sym::bin(Div, Sym::bin(Sub, d, b), denom))
}
