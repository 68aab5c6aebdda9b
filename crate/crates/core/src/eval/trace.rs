use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::little::{LocId, OpName};

/// Provenance of a number: which literals and operators produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum Trace {
    Loc(LocId),
    /// A constant the solver must treat as fixed: frozen literals and
    /// library-internal numbers.
    Opaque(f64),
    Op(OpName, Arc<Vec<Trace>>),
}

impl Trace {
    pub fn op(op: OpName, a: Trace, b: Trace) -> Trace {
        Trace::Op(op, Arc::new(vec![a, b]))
    }

    /// Fold the trace with the given literal values.
    pub fn eval(&self, lookup: &impl Fn(LocId) -> Option<f64>) -> Option<f64> {
        match self {
            Trace::Loc(l) => lookup(*l),
            Trace::Opaque(v) => Some(*v),
            Trace::Op(op, args) => {
                let a = args[0].eval(lookup)?;
                let b = args[1].eval(lookup)?;
                Some(apply_arith(*op, a, b))
            }
        }
    }

    pub fn locs(&self) -> BTreeSet<LocId> {
        let mut out = BTreeSet::new();
        self.collect_locs(&mut out);
        out
    }

    /// Locations in pre-order of first occurrence.
    pub fn locs_ordered(&self) -> Vec<LocId> {
        let mut out = Vec::new();
        self.visit_locs(&mut |l| {
            if !out.contains(&l) {
                out.push(l);
            }
        });
        out
    }

    fn collect_locs(&self, out: &mut BTreeSet<LocId>) {
        self.visit_locs(&mut |l| {
            out.insert(l);
        });
    }

    fn visit_locs(&self, f: &mut impl FnMut(LocId)) {
        match self {
            Trace::Loc(l) => f(*l),
            Trace::Opaque(_) => {}
            Trace::Op(_, args) => args.iter().for_each(|a| a.visit_locs(f)),
        }
    }

    pub fn as_loc(&self) -> Option<LocId> {
        match self {
            Trace::Loc(l) => Some(*l),
            _ => None,
        }
    }
}

pub fn apply_arith(op: OpName, a: f64, b: f64) -> f64 {
    match op {
        OpName::Add => a + b,
        OpName::Sub => a - b,
        OpName::Mul => a * b,
        OpName::Div => a / b,
        _ => f64::NAN,
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trace::Loc(l) => write!(f, "{l}"),
            Trace::Opaque(v) => write!(f, "{}!", crate::little::format_number(*v)),
            Trace::Op(op, args) => {
                write!(f, "({}", op.symbol())?;
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumVal {
    pub value: f64,
    pub trace: Trace,
}

impl NumVal {
    pub fn opaque(value: f64) -> Self {
        NumVal {
            value,
            trace: Trace::Opaque(value),
        }
    }
}
