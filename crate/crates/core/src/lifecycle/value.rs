use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::compute_a;
use crate::dual::solve_nu;
use crate::error::{ModelError, Result};
use crate::model::{ModelParams, ParamName, TimeGrid};
use crate::roots::golden_max;

use super::ce::{certainty_equivalent_curves, CeCurves};
use super::statics::{comparative_statics_at, StaticsResult};

/// Present value of income held fixed in the habit-only experiment.
pub const FIXED_INCOME_TARGET: f64 = 500.0;

/// `V(tau) = int_0^T E[u_s(c*_s)] ds`, or `-inf` when the income cannot
/// finance the minimal consumption path.
pub fn value_of_tau(params: &ModelParams, tau: f64) -> Result<f64> {
    match solve_nu(params, tau) {
        Ok(sol) => Ok(sol.value()),
        Err(ModelError::Infeasible { .. }) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// Copy of `params` with `W0` and `D` scaled by a common factor so that
/// `A(tau) = 500`.
pub fn fixed_income_params(params: &ModelParams, tau: f64) -> Result<ModelParams> {
    let a = compute_a(params, tau)?;
    let scale = FIXED_INCOME_TARGET / a;
    Ok(ModelParams {
        w0: params.w0 * scale,
        full_benefit: params.full_benefit * scale,
        ..*params
    })
}

pub fn value_of_tau_fixed_income(params: &ModelParams, tau: f64) -> Result<f64> {
    value_of_tau(&fixed_income_params(params, tau)?, tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauPoint {
    pub tau: f64,
    pub value: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LifecycleReport {
    pub points: Vec<TauPoint>,
    pub tau_star: f64,
    pub value_star: f64,
    #[serde(skip)]
    pub ce: Option<CeCurves>,
    pub statics: BTreeMap<ParamName, StaticsResult>,
}

impl LifecycleReport {
    pub fn tau_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.tau).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Retirement times from `tau_min` to `tau_max` in steps of at most
/// `grid_step`, with `tau_st` included.
pub fn tau_grid(params: &ModelParams, grid_step: f64) -> Result<Vec<f64>> {
    if !(grid_step > 0.0) {
        return Err(crate::error::domain(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let span = params.tau_max - params.tau_min;
    if span <= 0.0 {
        return Ok(vec![params.tau_min]);
    }
    let shifted = TimeGrid::with_step(span, grid_step, &[params.tau_st - params.tau_min])?;
    Ok(shifted.nodes().iter().map(|x| x + params.tau_min).collect())
}

fn scan<F>(params: &ModelParams, grid_step: f64, value: F) -> Result<(Vec<TauPoint>, usize)>
where
    F: Fn(&ModelParams, f64) -> Result<f64> + Sync,
{
    let taus = tau_grid(params, grid_step)?;
    let points: Vec<TauPoint> = taus
        .par_iter()
        .map(|&tau| {
            Ok(TauPoint {
                tau,
                value: value(params, tau)?,
                a: compute_a(params, tau)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if p.value.is_finite() && best.map_or(true, |b| p.value > points[b].value) {
            best = Some(i);
        }
    }
    let best = best.ok_or(ModelError::NoFeasibleTau {
        lo: params.tau_min,
        hi: params.tau_max,
    })?;
    Ok((points, best))
}

fn refine<F>(
    params: &ModelParams,
    grid_step: f64,
    points: &[TauPoint],
    best: usize,
    value: &F,
) -> (f64, f64)
where
    F: Fn(&ModelParams, f64) -> Result<f64>,
{
    let (grid_tau, grid_v) = (points[best].tau, points[best].value);
    let lo = (grid_tau - grid_step).max(params.tau_min);
    let hi = (grid_tau + grid_step).min(params.tau_max);
    if hi <= lo {
        return (grid_tau, grid_v);
    }
    let (tau, v) = golden_max(
        |t| value(params, t).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        0.05,
    );
    if v > grid_v {
        (tau, v)
    } else {
        (grid_tau, grid_v)
    }
}

/// Grid search over the retirement window plus one golden-section pass
/// around the best grid point. Also fills the certainty-equivalent curves
/// and the Table-1 statics at the optimum.
pub fn optimize_tau(params: &ModelParams, grid_step: f64) -> Result<LifecycleReport> {
    let mut report = optimize_tau_with(params, grid_step, value_of_tau)?;
    let grid = TimeGrid::for_model(params, report.tau_star, grid_step)?;
    report.ce = Some(certainty_equivalent_curves(params, report.tau_star, &grid)?);
    let statics: Vec<(ParamName, StaticsResult)> = ParamName::TABLE
        .par_iter()
        .map(|&name| {
            Ok((
                name,
                comparative_statics_at(params, report.tau_star, name, 0.01, 1.0)?,
            ))
        })
        .collect::<Result<_>>()?;
    report.statics = statics.into_iter().collect();
    Ok(report)
}

/// Grid search plus golden-section refinement for an arbitrary value map.
pub fn optimize_tau_with<F>(
    params: &ModelParams,
    grid_step: f64,
    value: F,
) -> Result<LifecycleReport>
where
    F: Fn(&ModelParams, f64) -> Result<f64> + Sync,
{
    params.validate()?;
    let (points, best) = scan(params, grid_step, &value)?;
    let (tau_star, value_star) = refine(params, grid_step, &points, best, &value);
    Ok(LifecycleReport {
        points,
        tau_star,
        value_star,
        ce: None,
        statics: BTreeMap::new(),
    })
}
