//! Retirement-time choice: the value of each retirement time, its optimum,
//! certainty-equivalent consumption paths and comparative statics.

mod ce;
mod figures;
mod statics;
mod value;

pub use ce::{certainty_equivalent_curves, CeCurves, CePoint};
pub use figures::{figure, FigureId, FigureTable};
pub use statics::{
    comparative_statics, comparative_statics_at, reference_sign, StaticsResult, StaticsSign,
};
pub use value::{
    fixed_income_params, optimize_tau, optimize_tau_with, tau_grid, value_of_tau,
    value_of_tau_fixed_income, LifecycleReport, TauPoint, FIXED_INCOME_TARGET,
};
