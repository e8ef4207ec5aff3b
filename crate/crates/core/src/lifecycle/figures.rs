use rayon::prelude::*;
use serde::Serialize;

use crate::dual::solve_nu;
use crate::error::{domain, Result};
use crate::model::{ModelParams, ParamName, Side, TimeGrid};
use crate::policy::PolicyEvaluator;

use super::ce::ce_from_solution;
use super::value::{tau_grid, value_of_tau, value_of_tau_fixed_income};
use crate::analytics::compute_a;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
}

impl FigureId {
    pub const ALL: [FigureId; 12] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
        FigureId::Fig10,
        FigureId::Fig11,
        FigureId::Fig12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
            FigureId::Fig10 => "fig10",
            FigureId::Fig11 => "fig11",
            FigureId::Fig12 => "fig12",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// A figure's data: named columns with units, rows in plotting order.
/// Jumps appear as two consecutive rows with the same abscissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub id: FigureId,
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

const MONEY: &str = "currency/year";

fn col(name: impl Into<String>, unit: &str) -> (String, String) {
    (name.into(), unit.to_string())
}

fn sweep_label(v: f64) -> String {
    let s = format!("{v}");
    s.replace('.', "p").replace('-', "m")
}

/// Certainty-equivalent curves for several calibrations on one shared grid.
fn ce_columns(
    id: FigureId,
    variants: Vec<(String, ModelParams, f64)>,
    base: &ModelParams,
    grid_step: f64,
    excess: bool,
) -> Result<FigureTable> {
    let mut bps = vec![base.tau_min, base.tau_st];
    bps.extend(variants.iter().map(|v| v.2));
    let grid = TimeGrid::with_step(base.horizon, grid_step, &bps)?;
    let curves: Vec<Vec<f64>> = variants
        .par_iter()
        .map(|(_, p, tau)| {
            let sol = solve_nu(p, *tau)?;
            let ce = ce_from_solution(&sol, &grid);
            Ok(if excess {
                ce.excess.values
            } else {
                ce.actual.values
            })
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![col("t", "years")];
    columns.extend(
        variants
            .iter()
            .map(|(label, _, _)| col(label.clone(), MONEY)),
    );
    let rows = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            std::iter::once(t)
                .chain(curves.iter().map(|c| c[i]))
                .collect()
        })
        .collect();
    Ok(FigureTable { id, columns, rows })
}

fn tau_table<F>(
    id: FigureId,
    params: &ModelParams,
    grid_step: f64,
    name: &str,
    unit: &str,
    f: F,
) -> Result<FigureTable>
where
    F: Fn(&ModelParams, f64) -> Result<f64> + Sync,
{
    let taus = tau_grid(params, grid_step)?;
    let rows = taus
        .par_iter()
        .map(|&tau| Ok(vec![tau, f(params, tau)?]))
        .collect::<Result<_>>()?;
    Ok(FigureTable {
        id,
        columns: vec![col("tau", "years"), col(name, unit)],
        rows,
    })
}

/// Builds the data behind one figure. Single-retirement figures use `tau`.
pub fn figure(id: FigureId, params: &ModelParams, tau: f64, grid_step: f64) -> Result<FigureTable> {
    params.validate()?;
    params.check_tau(tau)?;
    if !(grid_step > 0.0) {
        return Err(domain("grid step must be positive"));
    }
    let sweep = |name: ParamName, values: &[f64]| -> Vec<(String, ModelParams, f64)> {
        values
            .iter()
            .map(|&v| {
                (
                    format!("C_hat_{}_{}", name.key(), sweep_label(v)),
                    params.with(name, v),
                    tau,
                )
            })
            .collect()
    };
    match id {
        FigureId::Fig1 => {
            let sol = solve_nu(params, tau)?;
            let grid = TimeGrid::for_model(params, tau, grid_step)?;
            let ce = ce_from_solution(&sol, &grid);
            let rows = ce
                .rows()
                .into_iter()
                .map(|p| vec![p.t, p.actual, p.habit])
                .collect();
            Ok(FigureTable {
                id,
                columns: vec![col("t", "years"), col("C_hat", MONEY), col("h_hat", MONEY)],
                rows,
            })
        }
        FigureId::Fig2 | FigureId::Fig3 => {
            let excess = id == FigureId::Fig2;
            let prefix = if excess { "c_hat" } else { "C_hat" };
            let variants = [35.0, 40.0, 45.0]
                .into_iter()
                .map(|t| (format!("{prefix}_tau_{}", sweep_label(t)), *params, t))
                .collect();
            ce_columns(id, variants, params, grid_step, excess)
        }
        FigureId::Fig4 => {
            let sol = solve_nu(params, tau)?;
            let eval = PolicyEvaluator::new(&sol);
            let grid = TimeGrid::for_model(params, tau, grid_step)?;
            let mut times: Vec<(f64, Side)> = Vec::new();
            for &t in grid.nodes() {
                if (t - params.tau_min).abs() < 1e-12 && t > 0.0 {
                    times.push((t, Side::Left));
                }
                times.push((t, Side::Right));
            }
            let rows = times
                .par_iter()
                .map(|&(t, side)| vec![t, eval.expected_portfolio(t, side)])
                .collect();
            Ok(FigureTable {
                id,
                columns: vec![col("t", "years"), col("E_pi", "currency")],
                rows,
            })
        }
        FigureId::Fig5 => {
            let variants = [(4.0, 2.0), (7.0, 4.0), (10.0, 6.0), (13.0, 8.0)]
                .into_iter()
                .map(|(w, d)| {
                    let p = ModelParams {
                        w0: w,
                        full_benefit: d,
                        ..*params
                    };
                    (
                        format!("C_hat_W0_{}_D_{}", sweep_label(w), sweep_label(d)),
                        p,
                        tau,
                    )
                })
                .collect();
            ce_columns(id, variants, params, grid_step, false)
        }
        FigureId::Fig6 => {
            let variants = [0.0, 0.025, 0.05, 0.1]
                .into_iter()
                .map(|v| {
                    let p = ModelParams {
                        psi: v,
                        eta: v,
                        ..*params
                    };
                    (format!("C_hat_psi_eta_{}", sweep_label(v)), p, tau)
                })
                .collect();
            ce_columns(id, variants, params, grid_step, false)
        }
        FigureId::Fig7 => ce_columns(
            id,
            sweep(ParamName::LevelShrink, &[0.4, 0.6, 0.8, 1.0]),
            params,
            grid_step,
            false,
        ),
        FigureId::Fig8 => ce_columns(
            id,
            sweep(ParamName::SensitivityShrink, &[0.1, 0.3, 0.6, 1.0]),
            params,
            grid_step,
            false,
        ),
        FigureId::Fig9 => ce_columns(
            id,
            sweep(ParamName::InitialHabit, &[3.0, 6.0, 9.0]),
            params,
            grid_step,
            false,
        ),
        FigureId::Fig10 => tau_table(id, params, grid_step, "A", "currency", compute_a),
        FigureId::Fig11 => tau_table(
            id,
            params,
            grid_step,
            "V_fixed_income",
            "utility",
            value_of_tau_fixed_income,
        ),
        FigureId::Fig12 => tau_table(id, params, grid_step, "V", "utility", value_of_tau),
    }
}
