//! Relating output features: digging a hole, filling it with an equality,
//! and cleaning up afterwards.

mod chain;
mod cleanup;
mod equal;
mod lift;

use thiserror::Error;

pub use cleanup::clean_up;
pub use equal::{make_equal, EqualOutcome};
pub use lift::{HoleRecord, Scope};

use crate::eval::{evaluate, Canvas, EvalError};
use crate::features::{features_of, Feature, FeatureKind};
use crate::little::{LocId, Program};
use crate::solver::Sym;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelateError {
    #[error("select at least two features")]
    TooFewFeatures,
    #[error("no feature named {0}")]
    UnknownFeature(String),
    #[error("every constant behind the selection is frozen")]
    NothingToLift,
    #[error("the {0} features have nothing to be made equal to")]
    UnmatchedAxis(String),
    #[error("could not make the {0} features equal")]
    SolverFailed(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evaluate and look up the selected features, in selection order.
pub(crate) fn resolve(p: &Program, ids: &[String]) -> Result<(Canvas, Vec<Feature>), RelateError> {
    let c = evaluate(p)?;
    let all = features_of(&c);
    let mut out = Vec::new();
    for id in ids {
        let f = crate::features::find(&all, id).ok_or_else(|| RelateError::UnknownFeature(id.clone()))?;
        out.push(f.clone());
    }
    Ok((c, out))
}

/// Lift every constant behind the selected features into one binding,
/// followed by a hole rebinding them under primed names, followed by named
/// definitions for the selected derived quantities.
pub fn dig_hole(p: &Program, selection: &[String]) -> Result<(Program, HoleRecord), RelateError> {
    if selection.len() < 2 {
        return Err(RelateError::TooFewFeatures);
    }
    let (c, fs) = resolve(p, selection)?;
    let mut locs: Vec<LocId> = Vec::new();
    let mut derived: Vec<lift::Derived> = Vec::new();
    for f in &fs {
        for part in &f.parts {
            locs.extend(part.trace.locs_ordered().into_iter().filter(|l| c.store.contains_key(l)));
            if part.kind == FeatureKind::Derived {
                let base = format!("{}_{}", f.shape, part.name);
                if !derived.iter().any(|d| d.base == base) {
                    derived.push(lift::Derived { base, sym: Sym::from_trace(&part.display) });
                }
            }
        }
    }
    if locs.is_empty() {
        return Err(RelateError::NothingToLift);
    }
    let plan = lift::plan(p, &locs);
    Ok(plan.apply(p, &Default::default(), &derived))
}
