//! Evaluation of `little` programs to traced SVG shapes.

mod interp;
pub mod render;
pub mod svg;
pub mod trace;

pub use interp::{eval_number, evaluate, prelude_names, EvalError};
pub use render::{render_svg, RenderOptions};
pub use svg::{AttrVal, BlobSpan, Canvas, PathCmd, Point, SvgNode};
pub use trace::{NumVal, Trace};
