//! Calibration, piecewise time structure and habit schedules.

mod grid;
pub mod habit;
mod params;
mod schedule;

pub use grid::TimeGrid;
pub use habit::{
    habit_from_consumption, habit_from_consumption_piecewise, propagate_habit,
    propagate_habit_as_printed, Curve, StepCurve,
};
pub use params::{ModelParams, ParamName};
pub use schedule::{HabitSchedule, Side};
