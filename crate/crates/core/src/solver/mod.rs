//! Solving value-trace equations for one program constant.

mod solve;
mod sym;

pub use solve::{choose_loc, rank, solve_for_loc, verify, Env, Equation, SolveError};
pub use sym::{simplify, Sym};
