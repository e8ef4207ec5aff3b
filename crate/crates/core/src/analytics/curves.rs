use serde::Serialize;

use crate::error::Result;
use crate::model::{HabitSchedule, ModelParams, Side, TimeGrid};
use crate::quadrature;

const RATE_GUARD: f64 = 1e-12;

/// `int_0^d e^{-a u} du`, with the limit `d` for `|a| < 1e-12`.
pub fn discount_factor_integral(a: f64, d: f64) -> f64 {
    if a.abs() < RATE_GUARD {
        d
    } else {
        -(-a * d).exp_m1() / a
    }
}

/// `int_0^d e^{g u} du`.
pub fn growth_integral(g: f64, d: f64) -> f64 {
    discount_factor_integral(-g, d)
}

/// Closed-form annuity curves for one calibration and retirement time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curves {
    pub params: ModelParams,
    pub schedule: HabitSchedule,
    pub tau: f64,
}

impl Curves {
    pub fn new(params: &ModelParams, tau: f64) -> Result<Self> {
        params.validate()?;
        params.check_tau(tau)?;
        Ok(Self::unchecked(params, tau))
    }

    pub(crate) fn unchecked(params: &ModelParams, tau: f64) -> Self {
        Self {
            params: *params,
            schedule: HabitSchedule::new(params, tau),
            tau,
        }
    }

    fn rates(&self) -> (f64, f64) {
        let s = &self.schedule;
        let r = self.params.r;
        (r + s.eta_pre - s.psi_pre, r + s.eta_post - s.psi_post)
    }

    /// Habit annuity `G_t = int_t^T D_{eta-psi}(t,s) e^{-r(s-t)} ds`: the
    /// time-`t` price, per unit of habit, of the habit path that decays from
    /// `h_t` with no further excess consumption.
    pub fn habit_annuity(&self, t: f64, side: Side) -> f64 {
        let (a1, a2) = self.rates();
        let (tau, horizon) = (self.tau, self.params.horizon);
        let pre = match side {
            Side::Right => t < tau,
            Side::Left => t <= tau,
        };
        if pre {
            discount_factor_integral(a1, tau - t)
                + self.schedule.jump
                    * (-a1 * (tau - t)).exp()
                    * discount_factor_integral(a2, horizon - tau)
        } else {
            discount_factor_integral(a2, horizon - t)
        }
    }

    /// `F_t = psi(t) G_t`, so that the adjusted density is `H_t (1 + F_t)`.
    pub fn f(&self, t: f64) -> f64 {
        self.f_at(t, Side::Right)
    }

    pub fn f_at(&self, t: f64, side: Side) -> f64 {
        self.schedule.psi_at(t, side) * self.habit_annuity(t, side)
    }

    /// Present value at time 0 of net income for retirement at `tau`.
    pub fn a(&self) -> f64 {
        let p = &self.params;
        let tau = self.tau;
        let gw = p.wage_growth_adjusted();
        let net = (1.0 - p.k) * p.w0;
        let wage = net * growth_integral(gw, tau.min(p.tau_min));
        let flat = net
            * (gw * p.tau_min).exp()
            * discount_factor_integral(p.r, (tau - p.tau_min).max(0.0));
        let g = p.xi - p.r;
        let benefit = p.benefit_factor(tau)
            * p.full_benefit
            * (g * tau).exp()
            * growth_integral(g, p.horizon - tau);
        wage + flat + benefit
    }

    /// `z = int_0^T D_eta(0,s) e^{-rs} (1 + F_s) ds` by panel quadrature.
    pub fn z(&self) -> f64 {
        let r = self.params.r;
        quadrature::integrate(0.0, self.params.horizon, &[self.tau], |s| {
            self.schedule.decay_unchecked(0.0, s, false, Side::Right)
                * (-r * s).exp()
                * (1.0 + self.f(s))
        })
    }

    /// Wage annuity per unit of current wage: `E_t[int_t^tau H_s W_s / (H_t W_t) ds]`.
    pub fn o(&self, t: f64) -> f64 {
        let p = &self.params;
        let tau = self.tau;
        if t >= tau {
            return 0.0;
        }
        let gw = p.wage_growth_adjusted();
        if t < p.tau_min {
            growth_integral(gw, p.tau_min - t)
                + (gw * (p.tau_min - t)).exp() * discount_factor_integral(p.r, tau - p.tau_min)
        } else {
            discount_factor_integral(p.r, tau - t)
        }
    }

    /// `N_s = 1 + D_{eta-psi}(0,s) int_s^T psi(u) e^{-r(u-s)} du`.
    pub fn n(&self, s: f64) -> f64 {
        let r = self.params.r;
        let sch = &self.schedule;
        let (tau, horizon) = (self.tau, self.params.horizon);
        let inflow = if s < tau {
            sch.psi_pre * discount_factor_integral(r, tau - s)
                + sch.psi_post * (-r * (tau - s)).exp() * discount_factor_integral(r, horizon - tau)
        } else {
            sch.psi_post * discount_factor_integral(r, horizon - s)
        };
        1.0 + sch.decay_unchecked(0.0, s, true, Side::Right) * inflow
    }

    /// Price at `t` of the remaining benefit stream: `int_{max(t,tau)}^T g D e^{xi s} e^{-r(s-t)} ds`.
    pub fn benefit_annuity(&self, t: f64) -> f64 {
        let p = &self.params;
        let start = t.max(self.tau);
        if start >= p.horizon {
            return 0.0;
        }
        p.benefit_factor(self.tau)
            * p.full_benefit
            * (p.xi * start - p.r * (start - t)).exp()
            * growth_integral(p.xi - p.r, p.horizon - start)
    }

    pub fn discount(&self, t: f64) -> f64 {
        (-self.params.r * t).exp()
    }

    pub fn eval(&self, kind: CurveKind, t: f64) -> Option<f64> {
        match kind {
            CurveKind::F => Some(self.f(t)),
            CurveKind::N => Some(self.n(t)),
            CurveKind::O => Some(self.o(t)),
            CurveKind::Discount => Some(self.discount(t)),
            CurveKind::Benefit => Some(self.benefit_annuity(t)),
            _ => None,
        }
    }
}

pub fn compute_f(params: &ModelParams, tau: f64, t: f64) -> Result<f64> {
    Ok(Curves::new(params, tau)?.f(t))
}

pub fn compute_a(params: &ModelParams, tau: f64) -> Result<f64> {
    Ok(Curves::new(params, tau)?.a())
}

pub fn compute_z(params: &ModelParams, tau: f64) -> Result<f64> {
    Ok(Curves::new(params, tau)?.z())
}

pub fn compute_o(params: &ModelParams, tau: f64, t: f64) -> Result<f64> {
    Ok(Curves::new(params, tau)?.o(t))
}

pub fn compute_n(params: &ModelParams, tau: f64, s: f64) -> Result<f64> {
    Ok(Curves::new(params, tau)?.n(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveKind {
    F,
    N,
    O,
    Discount,
    Benefit,
    CeActual,
    CeHabit,
    CeExcess,
}

impl CurveKind {
    pub const EXPORTED: [CurveKind; 5] = [
        CurveKind::F,
        CurveKind::N,
        CurveKind::O,
        CurveKind::Discount,
        CurveKind::Benefit,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CurveKind::F => "F",
            CurveKind::N => "N",
            CurveKind::O => "O",
            CurveKind::Discount => "discount",
            CurveKind::Benefit => "benefit",
            CurveKind::CeActual => "C_hat",
            CurveKind::CeHabit => "h_hat",
            CurveKind::CeExcess => "c_hat",
        }
    }
}

/// A curve sampled on a grid. Between nodes, closed-form kinds are evaluated
/// exactly and the others are interpolated linearly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicCurve {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub kind: CurveKind,
    #[serde(skip)]
    source: Option<Curves>,
}

impl DeterministicCurve {
    pub fn sample(curves: &Curves, kind: CurveKind, grid: &TimeGrid) -> Self {
        let values = grid
            .nodes()
            .iter()
            .map(|&t| curves.eval(kind, t).expect("closed-form curve kind"))
            .collect();
        Self {
            grid: grid.clone(),
            values,
            kind,
            source: Some(*curves),
        }
    }

    pub fn from_values(kind: CurveKind, grid: TimeGrid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "one value per grid node");
        Self {
            grid,
            values,
            kind,
            source: None,
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        if let Some(v) = self.source.and_then(|c| c.eval(self.kind, t)) {
            return v;
        }
        let nodes = self.grid.nodes();
        let i = nodes.partition_point(|&x| x <= t);
        if i == 0 {
            return self.values[0];
        }
        if i == nodes.len() {
            return *self.values.last().expect("non-empty");
        }
        let (t0, t1) = (nodes[i - 1], nodes[i]);
        let w = (t - t0) / (t1 - t0);
        self.values[i - 1] * (1.0 - w) + self.values[i] * w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_income_and_habit_constants() {
        let c = Curves::new(&ModelParams::baseline(), 40.0).unwrap();
        assert!((c.a() - 517.739_207_710_703_6).abs() < 1e-9, "{}", c.a());
        assert!((c.z() - 34.3195).abs() < 1e-3, "{}", c.z());
    }

    #[test]
    fn z_equals_initial_habit_annuity() {
        for (psi, eta) in [(0.05, 0.05), (0.02, 0.06), (0.07, 0.03)] {
            let p = ModelParams {
                psi,
                eta,
                ..ModelParams::baseline()
            };
            let c = Curves::new(&p, 33.5).unwrap();
            assert!((c.z() - c.habit_annuity(0.0, Side::Right)).abs() < 1e-10 * c.z());
        }
    }

    #[test]
    fn guarded_rates_use_the_limit() {
        assert_eq!(discount_factor_integral(0.0, 3.0), 3.0);
        assert!((discount_factor_integral(1e-9, 3.0) - 3.0).abs() < 1e-7);
    }

    #[test]
    fn interpolated_curves_are_linear_between_nodes() {
        let g = TimeGrid::with_step(2.0, 1.0, &[]).unwrap();
        let c = DeterministicCurve::from_values(CurveKind::CeActual, g, vec![0.0, 2.0, 3.0]);
        assert_eq!(c.value_at(0.5), 1.0);
        assert_eq!(c.value_at(1.5), 2.5);
    }
}
