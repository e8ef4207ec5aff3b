//! Optimal consumption, habit, wealth and portfolio as functions of the
//! current state-price level and the path's accumulated excess consumption.

mod bounds;
mod evaluator;
mod slice;
mod table;

pub use bounds::{lower_bounds, LowerBounds};
pub use evaluator::PolicyEvaluator;
pub use slice::{SliceEval, SliceResolution, WealthSlice};
pub use table::SliceTable;
