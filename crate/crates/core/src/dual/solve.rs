use crate::analytics::{CurveKind, Curves, DeterministicCurve, LognormalLaw};
use crate::dual::{SUtility, Tangency};
use crate::error::{ModelError, Result};
use crate::model::{ModelParams, Side, TimeGrid};
use crate::quadrature::{GaussLegendre, Panels};
use crate::roots;

#[derive(Debug, Clone, Copy, PartialEq)]
struct BudgetNode {
    s: f64,
    weight: f64,
    one_plus_f: f64,
    law: LognormalLaw,
    y0: f64,
    discount: f64,
    time_pref: f64,
}

/// The static budget problem for one retirement time: the map
/// `x -> E int_0^T Y_s(x Gamma_s) Gamma_s ds` and the expected dual utility,
/// both as quadratures over `s` of lognormal partial moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DualProblem {
    pub curves: Curves,
    pub utility: SUtility,
    pub tangency: Tangency,
    pub a_val: f64,
    pub z_val: f64,
    nodes: Vec<BudgetNode>,
}

impl DualProblem {
    pub fn new(params: &ModelParams, tau: f64) -> Result<Self> {
        Self::with_panels(params, tau, 1.0)
    }

    /// `refine` scales the panel width and the grading ratio, for convergence checks.
    pub fn with_panels(params: &ModelParams, tau: f64, refine: f64) -> Result<Self> {
        let curves = Curves::new(params, tau)?;
        let utility = SUtility::from_params(params);
        let tangency = utility.tangency()?;
        let panels = Panels::graded(
            0.0,
            params.horizon,
            &[params.tau_min, tau, params.tau_st],
            2.5 / refine,
            1e-6 / refine,
            4f64.powf(1.0 / refine),
        );
        let set = panels.nodes(GaussLegendre::order8());
        let nodes = set
            .nodes
            .iter()
            .zip(&set.weights)
            .map(|(&s, &weight)| BudgetNode {
                s,
                weight,
                one_plus_f: 1.0 + curves.f(s),
                law: LognormalLaw::state_price(params, 0.0, s).expect("s >= 0"),
                y0: utility.threshold(tangency, s),
                discount: (-params.r * s).exp(),
                time_pref: (-params.rho * s).exp(),
            })
            .collect();
        Ok(Self {
            a_val: curves.a(),
            z_val: curves.z(),
            curves,
            utility,
            tangency,
            nodes,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.curves.params
    }

    pub fn tau(&self) -> f64 {
        self.curves.tau
    }

    /// Budget left for excess consumption: `A - h0 z`.
    pub fn target(&self) -> f64 {
        self.a_val - self.params().h0 * self.z_val
    }

    /// `f(inf) = -L int_0^T (1 + F_s) e^{-rs} ds`.
    pub fn floor(&self) -> f64 {
        -self.utility.max_gap
            * self
                .nodes
                .iter()
                .map(|n| n.weight * n.one_plus_f * n.discount)
                .sum::<f64>()
    }

    /// `f(x) = int_0^T (1+F_s) E[Y_s(x (1+F_s) H_s) H_s] ds`.
    pub fn budget_gap(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.floor();
        }
        let g = self.utility.gamma;
        let a = 1.0 - 1.0 / g;
        let big_l = self.utility.max_gap;
        let rho = self.utility.rho;
        self.nodes
            .iter()
            .map(|n| {
                let y_unit = x * n.one_plus_f;
                let threshold = n.y0 / y_unit;
                let k = (y_unit * (rho * n.s).exp()).powf(-1.0 / g);
                let gain = k * n.law.partial_unchecked(a, threshold, true);
                let loss = if big_l > 0.0 {
                    big_l * n.law.partial_unchecked(1.0, threshold, false)
                } else {
                    0.0
                };
                n.weight * n.one_plus_f * (gain - loss)
            })
            .sum()
    }

    /// `int_0^T E[u_s(Y_s(x (1+F_s) H_s))] ds`.
    pub fn expected_utility(&self, x: f64) -> f64 {
        let u = &self.utility;
        let e = 1.0 - u.gamma;
        let loss_level = u.kappa * u.max_gap.powf(e) / e;
        if x == f64::INFINITY {
            return -loss_level
                * self
                    .nodes
                    .iter()
                    .map(|n| n.weight * n.time_pref)
                    .sum::<f64>();
        }
        self.nodes
            .iter()
            .map(|n| n.weight * self.utility_density(n, x, loss_level))
            .sum()
    }

    fn utility_density(&self, n: &BudgetNode, x: f64, loss_level: f64) -> f64 {
        let u = &self.utility;
        let e = 1.0 - u.gamma;
        let ap = -e / u.gamma;
        let y_unit = x * n.one_plus_f;
        let threshold = n.y0 / y_unit;
        let k = y_unit * (u.rho * n.s).exp();
        let gain = k.powf(ap) / e * n.law.partial_unchecked(ap, threshold, true);
        let loss = if loss_level > 0.0 {
            loss_level * n.law.partial_unchecked(0.0, threshold, false)
        } else {
            0.0
        };
        n.time_pref * (gain - loss)
    }

    /// `E[u_t(Y_t(x (1+F_t) H_t))]` at a single time; `side` selects the
    /// one-sided value of `F` at retirement.
    pub fn expected_utility_at(&self, t: f64, x: f64, side: Side) -> f64 {
        let u = &self.utility;
        let e = 1.0 - u.gamma;
        let loss_level = u.kappa * u.max_gap.powf(e) / e;
        let time_pref = (-u.rho * t).exp();
        if x == f64::INFINITY {
            return -loss_level * time_pref;
        }
        let node = BudgetNode {
            s: t,
            weight: 1.0,
            one_plus_f: 1.0 + self.curves.f_at(t, side),
            law: LognormalLaw::state_price(self.params(), 0.0, t).expect("t >= 0"),
            y0: u.threshold(self.tangency, t),
            discount: (-self.params().r * t).exp(),
            time_pref,
        };
        self.utility_density(&node, x, loss_level)
    }

    /// Finds `nu` with `f(nu) = A - h0 z`.
    pub fn solve(self) -> Result<DualSolution> {
        let target = self.target();
        let floor = self.floor();
        let scale = target.abs().max(1.0);
        if (target - floor).abs() <= 1e-12 * scale {
            return Ok(DualSolution::new(self, f64::INFINITY, 0.0, 0));
        }
        if target < floor {
            return Err(ModelError::Infeasible {
                budget: target,
                floor,
            });
        }
        let g = |lx: f64| self.budget_gap(lx.exp()) - target;
        let (mut lo, mut hi) = (1e-8f64.ln(), 1e8f64.ln());
        let mut expansions = 0;
        while g(lo) <= 0.0 {
            lo -= 5.0;
            expansions += 1;
            if expansions > 40 {
                return Err(ModelError::Bracket(
                    "budget map stays below target as x -> 0".into(),
                ));
            }
        }
        while g(hi) >= 0.0 {
            hi += 5.0;
            expansions += 1;
            if expansions > 80 {
                return Err(ModelError::Bracket(
                    "budget map stays above target as x -> inf".into(),
                ));
            }
        }
        let root = roots::brent(g, lo, hi, 1e-15, 1e-10 * scale, 200)?;
        let nu = root.x.exp();
        let residual = self.budget_gap(nu) - target;
        Ok(DualSolution::new(self, nu, residual, root.iterations))
    }
}

/// A solved budget problem for a fixed retirement time.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// Budget multiplier; `+inf` when the budget only covers the `-L` floor.
    pub nu: f64,
    pub q_star: f64,
    pub a_val: f64,
    pub z_val: f64,
    pub tau: f64,
    pub f_curve: DeterministicCurve,
    pub residual: f64,
    pub iterations: usize,
    pub problem: DualProblem,
}

impl DualSolution {
    fn new(problem: DualProblem, nu: f64, residual: f64, iterations: usize) -> Self {
        let grid =
            TimeGrid::for_model(problem.params(), problem.tau(), 0.5).expect("valid horizon");
        Self {
            nu,
            q_star: problem.tangency.q_star(),
            a_val: problem.a_val,
            z_val: problem.z_val,
            tau: problem.tau(),
            f_curve: DeterministicCurve::sample(&problem.curves, CurveKind::F, &grid),
            residual,
            iterations,
            problem,
        }
    }

    pub fn params(&self) -> &ModelParams {
        self.problem.params()
    }

    pub fn curves(&self) -> &Curves {
        &self.problem.curves
    }

    pub fn is_floor(&self) -> bool {
        self.nu == f64::INFINITY
    }

    /// Value of the retirement choice: `int_0^T E[u_s(c*_s)] ds`.
    pub fn value(&self) -> f64 {
        self.problem.expected_utility(self.nu)
    }
}

/// `f(x)` for one retirement time.
pub fn budget_gap(params: &ModelParams, tau: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(crate::error::domain(format!(
            "budget map needs x > 0, got {x}"
        )));
    }
    Ok(DualProblem::new(params, tau)?.budget_gap(x))
}

pub fn solve_nu(params: &ModelParams, tau: f64) -> Result<DualSolution> {
    DualProblem::new(params, tau)?.solve()
}
