use crate::analytics::Curves;
use crate::dual::DualSolution;
use crate::model::{HabitSchedule, ModelParams, Side};
use crate::quadrature::GaussHermite;

use super::slice::{SliceResolution, WealthSlice};

/// Pathwise optimal policy for a solved retirement time.
///
/// The path enters through three scalars: the state-price level `H_t`, the
/// wage `W_t`, and `I_t = int_0^t psi(s) c*_s / D(0,s) ds`, with `D` the
/// `eta - psi` integrating factor, so that `h_t = D(0,t) (h0 + I_t)`.
#[derive(Debug, Clone)]
pub struct PolicyEvaluator {
    pub dual: DualSolution,
    pub params: ModelParams,
    pub schedule: HabitSchedule,
    pub resolution: SliceResolution,
}

impl PolicyEvaluator {
    pub fn new(dual: &DualSolution) -> Self {
        Self::with_resolution(dual, SliceResolution::default())
    }

    pub fn with_resolution(dual: &DualSolution, resolution: SliceResolution) -> Self {
        let params = *dual.params();
        Self {
            dual: dual.clone(),
            params,
            schedule: dual.curves().schedule,
            resolution,
        }
    }

    pub fn curves(&self) -> &Curves {
        self.dual.curves()
    }

    pub fn tau(&self) -> f64 {
        self.dual.tau
    }

    /// `c*_t = Y_t(nu (1+F_t) H_t)`.
    pub fn excess_consumption(&self, t: f64, h: f64) -> f64 {
        self.excess_consumption_at(t, h, Side::Right)
    }

    pub fn excess_consumption_at(&self, t: f64, h: f64, side: Side) -> f64 {
        let u = &self.dual.problem.utility;
        if self.dual.is_floor() {
            return -u.max_gap;
        }
        let y = self.dual.nu * (1.0 + self.curves().f_at(t, side)) * h;
        u.excess(self.dual.problem.tangency, t, y)
    }

    pub fn decay(&self, t: f64, side: Side) -> f64 {
        self.schedule.decay_at(0.0, t, true, side)
    }

    /// Integrand of `I_t`: `psi(t) c / D(0,t)`.
    pub fn habit_integrand(&self, t: f64, c: f64, side: Side) -> f64 {
        self.schedule.psi_at(t, side) * c / self.decay(t, side)
    }

    pub fn habit(&self, t: f64, integral: f64) -> f64 {
        self.habit_at(t, integral, Side::Right)
    }

    pub fn habit_at(&self, t: f64, integral: f64, side: Side) -> f64 {
        self.decay(t, side) * (self.params.h0 + integral)
    }

    /// `C*_t = c*_t + h_t`.
    pub fn consumption_level(&self, t: f64, h: f64, integral: f64) -> f64 {
        self.excess_consumption(t, h) + self.habit(t, integral)
    }

    pub fn slice(&self, t: f64) -> WealthSlice {
        WealthSlice::new(&self.dual, t, self.resolution)
    }

    /// Wage `W_t` on the path with `B_t = b` (frozen after `tau_min`), given
    /// the Brownian value at `min(t, tau_min)`.
    pub fn wage(&self, t: f64, b_capped: f64) -> f64 {
        let p = &self.params;
        let u = t.min(p.tau_min);
        p.w0 * ((p.alpha - 0.5 * p.beta * p.beta) * u + p.beta * b_capped).exp()
    }

    /// `X*_t = h_t G_t + f_t(H_t) - (1-k) W_t O_t - Ben_t`.
    pub fn wealth(&self, t: f64, h: f64, w: f64, integral: f64) -> f64 {
        let slice = self.slice(t);
        self.wealth_with(&slice, h, w, integral)
    }

    pub fn wealth_with(&self, slice: &WealthSlice, h: f64, w: f64, integral: f64) -> f64 {
        let t = slice.t;
        let c = self.curves();
        self.habit(t, integral) * c.habit_annuity(t, Side::Right) + slice.eval(h).f
            - (1.0 - self.params.k) * w * c.o(t)
            - c.benefit_annuity(t)
    }

    /// Wage-hedge term `(1-k) beta W_t O_t 1{t < tau_min}` (left limit when
    /// `side` is `Left`).
    pub fn wage_hedge(&self, t: f64, w: f64, side: Side) -> f64 {
        let p = &self.params;
        let active = match side {
            Side::Right => t < p.tau_min,
            Side::Left => t <= p.tau_min,
        };
        if active {
            (1.0 - p.k) * p.beta * w * self.curves().o(t)
        } else {
            0.0
        }
    }

    /// `pi*_t = (-theta H f'(H) - (1-k) beta W O 1{t<tau_min}) / sigma`.
    pub fn portfolio(&self, t: f64, h: f64, w: f64) -> f64 {
        let slice = self.slice(t);
        self.portfolio_with(&slice, h, w, Side::Right)
    }

    pub fn portfolio_with(&self, slice: &WealthSlice, h: f64, w: f64, side: Side) -> f64 {
        let p = &self.params;
        (-p.theta() * slice.eval(h).s - self.wage_hedge(slice.t, w, side)) / p.sigma
    }

    /// `d(sigma pi*)/dB`: the diffusion coefficient's sensitivity to the driver.
    pub fn portfolio_sensitivity(&self, slice: &WealthSlice, h: f64, w: f64) -> f64 {
        let p = &self.params;
        let theta = p.theta();
        theta * theta * slice.eval(h).s_prime - p.beta * self.wage_hedge(slice.t, w, Side::Right)
    }

    /// `f_t(H)` and `H f_t'(H)`.
    pub fn f_and_derivative(&self, t: f64, h: f64) -> (f64, f64) {
        let e = self.slice(t).eval(h);
        (e.f, e.s / h)
    }

    /// `E[pi*_t]` under the physical measure by Gauss–Hermite over `B_t`.
    pub fn expected_portfolio(&self, t: f64, side: Side) -> f64 {
        if t <= 0.0 {
            return self.portfolio_with(&self.slice(0.0), 1.0, self.params.w0, side);
        }
        let p = &self.params;
        let theta = p.theta();
        let slice = self.slice(t);
        let rule = GaussHermite::new(64);
        let sd = t.sqrt();
        rule.expect(|z| {
            let b = sd * z;
            let h = (-(p.r + 0.5 * theta * theta) * t - theta * b).exp();
            let w = if t <= p.tau_min { self.wage(t, b) } else { 0.0 };
            self.portfolio_with(&slice, h, w, side)
        })
    }
}
