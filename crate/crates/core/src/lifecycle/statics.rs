use serde::Serialize;

use crate::error::Result;
use crate::model::{ModelParams, ParamName};

use super::value::{optimize_tau_with, value_of_tau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StaticsSign {
    /// A larger parameter delays retirement.
    Up,
    /// A larger parameter brings retirement forward.
    Down,
    Flat,
    /// The optimum sits on the edge of the retirement window.
    Boundary,
}

impl StaticsSign {
    pub fn label(self) -> &'static str {
        match self {
            StaticsSign::Up => "up",
            StaticsSign::Down => "down",
            StaticsSign::Flat => "flat",
            StaticsSign::Boundary => "boundary",
        }
    }
}

/// Direction of the retirement-time response reported for each parameter of
/// the sensitivity table.
pub fn reference_sign(name: ParamName) -> StaticsSign {
    match name {
        ParamName::Wage0 | ParamName::WageDrift | ParamName::LevelShrink => StaticsSign::Up,
        ParamName::Contribution
        | ParamName::Benefit
        | ParamName::BenefitGrowth
        | ParamName::HabitInflow
        | ParamName::SensitivityShrink
        | ParamName::InitialHabit => StaticsSign::Down,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticsResult {
    pub name: ParamName,
    pub tau_star: f64,
    pub mixed_difference: f64,
    pub sign: StaticsSign,
}

/// Mixed difference
/// `[V(y+dy, t*+dt) - V(y, t*+dt) - V(y+dy, t*) + V(y, t*)] / (dy dt)`
/// at a given optimum `t*`, with `dy` relative to the current value.
pub fn comparative_statics_at(
    params: &ModelParams,
    tau_star: f64,
    name: ParamName,
    dy_rel: f64,
    dtau: f64,
) -> Result<StaticsResult> {
    let window = 1e-9;
    if tau_star <= params.tau_min + window || tau_star >= params.tau_max - window {
        return Ok(StaticsResult {
            name,
            tau_star,
            mixed_difference: f64::NAN,
            sign: StaticsSign::Boundary,
        });
    }
    let shifted = (tau_star + dtau).clamp(params.tau_min, params.tau_max);
    let dtau = shifted - tau_star;
    let y = params.get(name);
    let dy = if y != 0.0 { y * dy_rel } else { dy_rel };
    let bumped = params.with(name, y + dy);
    let v = |p: &ModelParams, t: f64| value_of_tau(p, t);
    let mixed = (v(&bumped, shifted)? - v(params, shifted)? - v(&bumped, tau_star)?
        + v(params, tau_star)?)
        / (dy * dtau);
    let sign = if mixed > 0.0 {
        StaticsSign::Up
    } else if mixed < 0.0 {
        StaticsSign::Down
    } else {
        StaticsSign::Flat
    };
    Ok(StaticsResult {
        name,
        tau_star,
        mixed_difference: mixed,
        sign,
    })
}

/// Locates `tau*(y)` on a grid of `grid_step` and applies
/// [`comparative_statics_at`].
pub fn comparative_statics(
    params: &ModelParams,
    name: ParamName,
    dy_rel: f64,
    dtau: f64,
    grid_step: f64,
) -> Result<StaticsResult> {
    let report = optimize_tau_with(params, grid_step, value_of_tau)?;
    comparative_statics_at(params, report.tau_star, name, dy_rel, dtau)
}
