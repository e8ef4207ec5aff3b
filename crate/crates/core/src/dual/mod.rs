//! S-shaped utility, its concavified dual map, and the budget multiplier.

mod solve;
mod utility;

pub use solve::{budget_gap, solve_nu, DualProblem, DualSolution};
pub use utility::{dual_map, solve_tangency, SUtility, Tangency};
