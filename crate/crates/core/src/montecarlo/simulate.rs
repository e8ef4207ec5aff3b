use rayon::prelude::*;
use serde::Serialize;

use crate::dual::DualSolution;
use crate::error::{domain, Result};
use crate::model::{ModelParams, Side, TimeGrid};
use crate::policy::{
    lower_bounds, PolicyEvaluator, SliceEval, SliceResolution, SliceTable, WealthSlice,
};

use super::rng::PathRng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub antithetic: bool,
    /// Number of leading paths whose full trajectories are kept.
    pub record: usize,
    /// Times at which the martingale identity is sampled (snapped onto the grid).
    pub probes: Vec<f64>,
    /// Spacing in `ln H` of the per-step wealth table.
    pub table_step: f64,
    /// Evaluate the wealth function directly instead of through the table.
    pub exact: bool,
    #[serde(skip)]
    pub resolution: SliceResolution,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            dt: 1.0 / 50.0,
            seed: 20_240_521,
            antithetic: false,
            record: 0,
            probes: vec![5.0, 20.0, 40.0, 60.0],
            table_step: 0.05,
            exact: false,
            resolution: SliceResolution::path(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(domain("need at least two paths"));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(domain("antithetic sampling needs an even number of paths"));
        }
        if !(self.dt > 0.0) || !(self.table_step > 0.0) {
            return Err(domain("dt and table step must be positive"));
        }
        Ok(())
    }
}

/// One recorded point of a simulated trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathState {
    pub t: f64,
    /// Brownian motion `B_t`.
    pub b: f64,
    /// State-price density `H_t`.
    pub state_price: f64,
    pub wage: f64,
    pub accumulated: f64,
    pub consumption: f64,
    pub habit: f64,
    pub x_sim: f64,
    pub x_formula: f64,
    pub portfolio: f64,
}

/// Per-path results needed by the identity checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    /// `int_0^T C*_s H_s ds`.
    pub consumption_cost: f64,
    /// `int_0^T c*_s Gamma_s ds`.
    pub adjusted_cost: f64,
    /// `int_0^T income_s H_s ds`.
    pub income_value: f64,
    pub x_sim_terminal: f64,
    pub max_gap: f64,
    pub floor_violations: u32,
    /// Times with `X*_t + (1-k) W_t O_t` below the minimal-wealth bound.
    pub bound_violations: u32,
    /// `H_t X*_t + int_0^t H_s (C*_s - income_s) ds` at each probe.
    pub martingale: Vec<f64>,
    pub b_terminal: f64,
    pub ln_h_terminal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Ensemble {
    pub config: SimConfig,
    pub tau: f64,
    pub a_val: f64,
    pub z_val: f64,
    pub h0: f64,
    /// `X*_0` from the wealth formula; zero up to solver tolerance.
    pub x0_formula: f64,
    /// `-(r + theta^2/2) T`.
    pub ln_h_target: f64,
    pub probe_times: Vec<f64>,
    pub paths: Vec<PathSummary>,
    pub trajectories: Vec<Vec<PathState>>,
}

struct Walker {
    rng: PathRng,
    b: f64,
    xi: f64,
    xi_prev: f64,
    w: f64,
    integral: f64,
    x_sim: f64,
    x_formula: f64,
    eval: SliceEval,
    c: f64,
    habit: f64,
    income: f64,
    summary: PathSummary,
    trajectory: Option<Vec<PathState>>,
}

struct Context<'a> {
    e: &'a PolicyEvaluator,
    p: ModelParams,
    theta: f64,
    tau: f64,
}

impl Context<'_> {
    fn income(&self, t: f64, w: f64, side: Side) -> f64 {
        let working = match side {
            Side::Right => t < self.tau,
            Side::Left => t <= self.tau,
        };
        if working {
            (1.0 - self.p.k) * w
        } else {
            self.benefit(t)
        }
    }

    fn benefit(&self, t: f64) -> f64 {
        self.p.benefit_factor(self.tau) * self.p.full_benefit * (self.p.xi * t).exp()
    }

    fn formula(&self, t: f64, habit: f64, w: f64, f: f64) -> f64 {
        let c = self.e.curves();
        habit * c.habit_annuity(t, Side::Right) + f
            - (1.0 - self.p.k) * w * c.o(t)
            - c.benefit_annuity(t)
    }

    fn portfolio(&self, t: f64, w: f64, eval: &SliceEval) -> f64 {
        (-self.theta * eval.s - self.e.wage_hedge(t, w, Side::Right)) / self.p.sigma
    }

    fn record(&self, t: f64, walker: &Walker) -> PathState {
        PathState {
            t,
            b: walker.b,
            state_price: walker.xi.exp(),
            wage: walker.w,
            accumulated: walker.integral,
            consumption: walker.c + walker.habit,
            habit: walker.habit,
            x_sim: walker.x_sim,
            x_formula: walker.x_formula,
            portfolio: self.portfolio(t, walker.w, &walker.eval),
        }
    }
}

/// Time-only factors of the policy at one instant and side.
#[derive(Debug, Clone, Copy)]
struct Instant {
    /// `c* = -L` once `H` reaches this level.
    h_threshold: f64,
    /// `c* = (scale H)^(-1/gamma)` below the threshold.
    scale: f64,
    /// `D(0,t)`.
    decay: f64,
    /// `psi(t) / D(0,t)`.
    inflow: f64,
    /// `1 + F_t`.
    adjust: f64,
}

impl Instant {
    fn new(e: &PolicyEvaluator, dual: &DualSolution, t: f64, side: Side) -> Self {
        let u = &dual.problem.utility;
        let adjust = 1.0 + e.curves().f_at(t, side);
        let decay = e.decay(t, side);
        let (h_threshold, scale) = if dual.is_floor() {
            (0.0, 0.0)
        } else {
            let y_scale = dual.nu * adjust;
            (
                u.threshold(dual.problem.tangency, t) / y_scale,
                y_scale * (u.rho * t).exp(),
            )
        };
        Self {
            h_threshold,
            scale,
            decay,
            inflow: e.habit_integrand(t, 1.0, side),
            adjust,
        }
    }

    #[inline]
    fn excess(&self, h: f64, gamma: f64, max_gap: f64) -> f64 {
        if h >= self.h_threshold {
            -max_gap
        } else {
            (self.scale * h).powf(-1.0 / gamma)
        }
    }
}

/// Simulates `cfg.n_paths` paths of the optimal policy: exact lognormal steps
/// for `H` and `W`, a Milstein step for simulated wealth, and the wealth
/// formula evaluated alongside.
pub fn simulate(
    params: &ModelParams,
    tau: f64,
    dual: &DualSolution,
    cfg: &SimConfig,
) -> Result<Ensemble> {
    cfg.validate()?;
    params.validate()?;
    if (dual.tau - tau).abs() > 1e-12 || dual.params() != params {
        return Err(domain(
            "dual solution was solved for a different calibration or retirement time",
        ));
    }
    let e = PolicyEvaluator::with_resolution(dual, cfg.resolution);
    let ctx = Context {
        e: &e,
        p: *params,
        theta: params.theta(),
        tau,
    };
    let mut bps = vec![params.tau_min, tau, params.tau_st];
    bps.extend(cfg.probes.iter().copied());
    let grid = TimeGrid::with_step(params.horizon, cfg.dt, &bps)?;
    let nodes = grid.nodes().to_vec();
    let probe_idx: Vec<usize> = cfg
        .probes
        .iter()
        .filter_map(|&t| grid.index_of(t))
        .filter(|&i| i > 0)
        .collect();
    let probe_times = probe_idx.iter().map(|&i| nodes[i]).collect();
    let bound_grid: Vec<f64> = nodes
        .par_iter()
        .map(|&t| lower_bounds(params, tau, t).map(|b| b.wealth))
        .collect::<Result<_>>()?;

    let slice0 = WealthSlice::new(dual, 0.0, cfg.resolution);
    let eval0 = slice0.eval_log(0.0);
    let c0 = e.excess_consumption(0.0, 1.0);
    let habit0 = params.h0;
    let x_formula0 = ctx.formula(0.0, habit0, params.w0, eval0.f);
    let mut walkers: Vec<Walker> = (0..cfg.n_paths)
        .map(|i| {
            let mut walker = Walker {
                rng: PathRng::new(cfg.seed, i as u64, cfg.antithetic),
                b: 0.0,
                xi: 0.0,
                xi_prev: 0.0,
                w: params.w0,
                integral: 0.0,
                x_sim: 0.0,
                x_formula: x_formula0,
                eval: eval0,
                c: c0,
                habit: habit0,
                income: ctx.income(0.0, params.w0, Side::Right),
                summary: PathSummary {
                    consumption_cost: 0.0,
                    adjusted_cost: 0.0,
                    income_value: 0.0,
                    x_sim_terminal: 0.0,
                    max_gap: x_formula0.abs(),
                    floor_violations: u32::from(c0 < -params.max_gap - 1e-12),
                    bound_violations: 0,
                    martingale: Vec::with_capacity(probe_idx.len()),
                    b_terminal: 0.0,
                    ln_h_terminal: 0.0,
                },
                trajectory: None,
            };
            if i < cfg.record {
                walker.trajectory = Some(vec![ctx.record(0.0, &walker)]);
            }
            walker
        })
        .collect();

    let drift_h = -(params.r + 0.5 * ctx.theta * ctx.theta);
    let drift_w = params.alpha - 0.5 * params.beta * params.beta;
    let scale = dual.a_val.abs().max(1.0);
    let (gamma, max_gap) = (params.gamma, params.max_gap);
    let net = 1.0 - params.k;
    let mut start = Instant::new(&e, dual, 0.0, Side::Right);
    for k in 1..nodes.len() {
        let (t0, t1) = (nodes[k - 1], nodes[k]);
        let h = t1 - t0;
        let sqrt_h = h.sqrt();
        let wage_moves = t1 <= params.tau_min + 1e-12;
        let hedge0 = e.wage_hedge(t0, 1.0, Side::Right);
        walkers.par_iter_mut().for_each(|w| {
            let pi = (-ctx.theta * w.eval.s - hedge0 * w.w) / params.sigma;
            let sens = ctx.theta * ctx.theta * w.eval.s_prime - params.beta * hedge0 * w.w;
            let db = sqrt_h * w.rng.normal();
            let consumption = w.c + w.habit;
            w.x_sim +=
                (params.r * w.x_sim + ctx.theta * params.sigma * pi - consumption + w.income) * h
                    + params.sigma * pi * db
                    + 0.5 * sens * (db * db - h);
            w.b += db;
            w.xi_prev = w.xi;
            w.xi += drift_h * h - ctx.theta * db;
            if wage_moves {
                w.w *= (drift_w * h + params.beta * db).exp();
            }
        });
        let slice = WealthSlice::new(dual, t1, cfg.resolution);
        let table = if cfg.exact {
            None
        } else {
            let (lo, hi) = walkers
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
                    (lo.min(w.xi), hi.max(w.xi))
                });
            Some(SliceTable::build(
                &slice,
                lo - cfg.table_step,
                hi + cfg.table_step,
                cfg.table_step,
            ))
        };
        let end_side = if (t1 - tau).abs() <= 1e-12 {
            Side::Left
        } else {
            Side::Right
        };
        let end = Instant::new(&e, dual, t1, end_side);
        let next = if end_side == Side::Right {
            end
        } else {
            Instant::new(&e, dual, t1, Side::Right)
        };
        let curves = e.curves();
        let (g1, o1, ben1) = (
            curves.habit_annuity(t1, Side::Right),
            curves.o(t1),
            curves.benefit_annuity(t1),
        );
        let (income_end_wage, income_next_wage) = (t1 <= tau, t1 < tau);
        let benefit = ctx.benefit(t1);
        let bound = bound_grid[k];
        let probe_slot = probe_idx.iter().position(|&i| i == k);
        let last = k + 1 == nodes.len();
        walkers.par_iter_mut().for_each(|w| {
            let big_h0 = w.xi_prev.exp();
            let big_h1 = w.xi.exp();
            let c_end = end.excess(big_h1, gamma, max_gap);
            w.integral += 0.5 * h * (start.inflow * w.c + end.inflow * c_end);
            let habit_end = end.decay * (params.h0 + w.integral);
            let income_end = if income_end_wage { net * w.w } else { benefit };
            let s = &mut w.summary;
            s.consumption_cost +=
                0.5 * h * ((w.c + w.habit) * big_h0 + (c_end + habit_end) * big_h1);
            s.adjusted_cost +=
                0.5 * h * (w.c * big_h0 * start.adjust + c_end * big_h1 * end.adjust);
            s.income_value += 0.5 * h * (w.income * big_h0 + income_end * big_h1);
            w.c = next.excess(big_h1, gamma, max_gap);
            w.habit = next.decay * (params.h0 + w.integral);
            w.income = if income_next_wage { net * w.w } else { benefit };
            w.eval = match &table {
                Some(tb) => tb.eval_log(w.xi),
                None => slice.eval_log(w.xi),
            };
            w.x_formula = w.habit * g1 + w.eval.f - net * w.w * o1 - ben1;
            let s = &mut w.summary;
            s.max_gap = s.max_gap.max((w.x_sim - w.x_formula).abs());
            if w.c < -max_gap - 1e-12 {
                s.floor_violations += 1;
            }
            if w.x_formula + net * w.w * o1 < bound - 1e-9 * scale {
                s.bound_violations += 1;
            }
            if probe_slot.is_some() {
                s.martingale
                    .push(big_h1 * w.x_formula + s.consumption_cost - s.income_value);
            }
            if last {
                s.x_sim_terminal = w.x_sim;
                s.b_terminal = w.b;
                s.ln_h_terminal = w.xi;
            }
        });
        for w in walkers.iter_mut().filter(|w| w.trajectory.is_some()) {
            let state = ctx.record(t1, w);
            w.trajectory.as_mut().expect("filtered").push(state);
        }
        start = next;
    }
    let (paths, trajectories): (Vec<_>, Vec<_>) = walkers
        .into_iter()
        .map(|w| (w.summary, w.trajectory))
        .unzip();
    Ok(Ensemble {
        config: cfg.clone(),
        tau,
        a_val: dual.a_val,
        z_val: dual.z_val,
        h0: params.h0,
        x0_formula: x_formula0,
        ln_h_target: drift_h * params.horizon,
        probe_times,
        paths,
        trajectories: trajectories.into_iter().flatten().collect(),
    })
}
