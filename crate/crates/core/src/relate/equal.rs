use std::collections::BTreeMap;

use super::cleanup::clean_up;
use super::{lift, resolve, RelateError};
use crate::features::{Axis, Component};
use crate::little::{Expr, Program};
use crate::solver::{rank, solve_for_loc, Equation, Sym};

const EQUAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct EqualOutcome {
    pub program: Program,
    /// Axis groups that could not be solved and were left untouched.
    pub failed: Vec<String>,
}

fn axis_label(a: Axis) -> &'static str {
    match a {
        Axis::X => "x",
        Axis::Y => "y",
        Axis::Scalar => "scalar",
        Axis::Point => "point",
    }
}

/// Component `part` of the feature `id` in the current program.
fn component(p: &Program, id: &str, part: usize) -> Result<(Component, crate::eval::Canvas), RelateError> {
    let (c, fs) = resolve(p, &[id.to_string()])?;
    Ok((fs[0].parts[part].clone(), c))
}

/// Make the selected features equal, one axis at a time. Within an axis the
/// first selected feature is kept and each later one is solved toward it.
pub fn make_equal(p: &Program, selection: &[String]) -> Result<EqualOutcome, RelateError> {
    if selection.len() < 2 {
        return Err(RelateError::TooFewFeatures);
    }
    let (_, fs) = resolve(p, selection)?;
    let mut groups: Vec<(Axis, Vec<(String, usize)>)> = Vec::new();
    for f in &fs {
        for (i, part) in f.parts.iter().enumerate() {
            let member = (f.id(), i);
            match groups.iter_mut().find(|(a, _)| *a == part.axis) {
                Some((_, g)) => g.push(member),
                None => groups.push((part.axis, vec![member])),
            }
        }
    }
    if let Some((a, _)) = groups.iter().find(|(_, g)| g.len() < 2) {
        return Err(RelateError::UnmatchedAxis(axis_label(*a).to_string()));
    }

    let mut cur = p.clone();
    let mut failed = Vec::new();
    for (axis, members) in &groups {
        match equate_group(&cur, members) {
            Some(next) => cur = next,
            None => failed.push(axis_label(*axis).to_string()),
        }
    }
    if failed.len() == groups.len() {
        return Err(RelateError::SolverFailed(failed.join(", ")));
    }
    Ok(EqualOutcome { program: cur, failed })
}

fn equate_group(p: &Program, members: &[(String, usize)]) -> Option<Program> {
    let mut cur = p.clone();
    let (first_id, first_part) = &members[0];
    for (id, part) in &members[1..] {
        let (keep, _) = component(&cur, first_id, *first_part).ok()?;
        let (move_, canvas) = component(&cur, id, *part).ok()?;
        if keep.trace == move_.trace {
            continue;
        }
        let eq = Equation::new(move_.trace.clone(), keep.trace.clone(), canvas.store.clone());
        let solved = rank(move_.trace.locs_ordered().into_iter(), &eq.env)
            .into_iter()
            .find_map(|t| solve_for_loc(&eq, t).ok().map(|s| (t, s)));
        match solved {
            Some((t, s)) => cur = fill_equation(&cur, t, &s),
            // Already related through some other path: nothing to do.
            None if (keep.value - move_.value).abs() <= EQUAL_TOL => {}
            None => return None,
        }
    }
    let values: Vec<f64> = members
        .iter()
        .map(|(id, part)| component(&cur, id, *part).map(|(c, _)| c.value))
        .collect::<Result<_, _>>()
        .ok()?;
    values.iter().all(|v| (v - values[0]).abs() <= EQUAL_TOL).then_some(cur)
}

/// Dig a hole around the eliminated constant and the constants its
/// solution mentions, fill the eliminated slot, then clean up.
fn fill_equation(p: &Program, target: crate::little::LocId, sol: &Sym) -> Program {
    let mut locs = vec![target];
    locs.extend(sol.locs());
    let plan = lift::plan(p, &locs);
    let expr = sol.to_expr(&|l| Expr::var(plan.name_of(l).expect("lifted")));
    let fill = BTreeMap::from([(target, expr)]);
    let (q, _) = plan.apply(p, &fill, &[]);
    clean_up(&q)
}
