use serde::Serialize;

use crate::analytics::{CurveKind, DeterministicCurve};
use crate::dual::{solve_nu, DualSolution};
use crate::error::Result;
use crate::model::{ModelParams, Side, TimeGrid};
use crate::quadrature::GaussLegendre;

/// Certainty-equivalent actual, habit and excess consumption at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CePoint {
    pub t: f64,
    pub actual: f64,
    pub habit: f64,
    pub excess: f64,
}

/// `C_hat`, `h_hat`, `c_hat` on a grid, plus the left limits at retirement.
#[derive(Debug, Clone, PartialEq)]
pub struct CeCurves {
    pub actual: DeterministicCurve,
    pub habit: DeterministicCurve,
    pub excess: DeterministicCurve,
    pub before_retirement: CePoint,
    pub at_retirement: CePoint,
    pub diagnostics: Vec<String>,
}

impl CeCurves {
    /// Rows in time order with the left limit at retirement inserted
    /// before the right-continuous value.
    pub fn rows(&self) -> Vec<CePoint> {
        let nodes = self.actual.grid.nodes();
        let mut out = Vec::with_capacity(nodes.len() + 1);
        for (i, &t) in nodes.iter().enumerate() {
            if t == self.at_retirement.t && t > 0.0 {
                out.push(self.before_retirement);
            }
            out.push(CePoint {
                t,
                actual: self.actual.values[i],
                habit: self.habit.values[i],
                excess: self.excess.values[i],
            });
        }
        out
    }
}

struct CeSolver<'a> {
    sol: &'a DualSolution,
    diagnostics: Vec<String>,
}

impl CeSolver<'_> {
    /// `c_hat_t` with `u(c_hat_t) = e^{rho t} E[u_t(c*_t)]`.
    fn excess(&mut self, t: f64, side: Side) -> f64 {
        let problem = &self.sol.problem;
        let u = &problem.utility;
        let mean = problem.expected_utility_at(t, self.sol.nu, side) * (u.rho * t).exp();
        let floor = u.u(-u.max_gap);
        if mean < floor - 1e-12 * floor.abs().max(1.0) {
            self.diagnostics.push(format!(
                "t = {t}: mean utility {mean} below u(-L) = {floor}; clamped"
            ));
        }
        u.inverse(mean)
    }
}

/// Forward recursion: `c_hat_t` from the pointwise expected utility, then
/// `h_hat` from the habit equation driven by `c_hat` (with the jump `l` at
/// retirement), then `C_hat = c_hat + h_hat`.
pub fn certainty_equivalent_curves(
    params: &ModelParams,
    tau: f64,
    grid: &TimeGrid,
) -> Result<CeCurves> {
    let sol = solve_nu(params, tau)?;
    Ok(ce_from_solution(&sol, grid))
}

pub(crate) fn ce_from_solution(sol: &DualSolution, grid: &TimeGrid) -> CeCurves {
    let mut solver = CeSolver {
        sol,
        diagnostics: Vec::new(),
    };
    let schedule = sol.curves().schedule;
    let h0 = sol.params().h0;
    let tau = sol.tau;
    let rule = GaussLegendre::order8();
    let nodes = grid.nodes();
    let mut integral = 0.0;
    let mut excess = Vec::with_capacity(nodes.len());
    let mut habit = Vec::with_capacity(nodes.len());
    let mut before = None;
    for (i, &t) in nodes.iter().enumerate() {
        if i > 0 {
            let t0 = nodes[i - 1];
            integral += rule.integrate(t0, t, |s| {
                schedule.psi(s) * solver.excess(s, Side::Right)
                    / schedule.decay_unchecked(0.0, s, true, Side::Right)
            });
        }
        let c = solver.excess(t, Side::Right);
        let h = schedule.decay_unchecked(0.0, t, true, Side::Right) * (h0 + integral);
        if (t - tau).abs() <= 1e-12 {
            let c_left = solver.excess(t, Side::Left);
            let h_left = schedule.decay_unchecked(0.0, t, true, Side::Left) * (h0 + integral);
            before = Some(CePoint {
                t,
                actual: c_left + h_left,
                habit: h_left,
                excess: c_left,
            });
        }
        excess.push(c);
        habit.push(h);
    }
    let actual: Vec<f64> = excess.iter().zip(&habit).map(|(c, h)| c + h).collect();
    let idx = grid.index_of(tau);
    let at = idx.map(|i| CePoint {
        t: tau,
        actual: actual[i],
        habit: habit[i],
        excess: excess[i],
    });
    let at = at.unwrap_or(CePoint {
        t: tau,
        actual: f64::NAN,
        habit: f64::NAN,
        excess: f64::NAN,
    });
    CeCurves {
        actual: DeterministicCurve::from_values(CurveKind::CeActual, grid.clone(), actual),
        habit: DeterministicCurve::from_values(CurveKind::CeHabit, grid.clone(), habit),
        excess: DeterministicCurve::from_values(CurveKind::CeExcess, grid.clone(), excess),
        before_retirement: before.unwrap_or(at),
        at_retirement: at,
        diagnostics: solver.diagnostics,
    }
}
