//! Habit level reconstruction from consumption paths.
//!
//! Three forms live here:
//! - [`habit_from_consumption`]: the unified integrating-factor form driven by
//!   actual consumption `C`, with the retirement jump inside the factor;
//! - [`habit_from_consumption_piecewise`]: the same quantity written branch by
//!   branch (before / after retirement) with the jump as an explicit `l`;
//! - [`propagate_habit`]: the solution of `dh = [psi c - (eta - psi) h] dt`
//!   driven by excess consumption `c = C - h`.
//!
//! [`propagate_habit_as_printed`] keeps the variant that places `psi(t)`
//! outside the integral and the factor `exp(-int_0^s (eta - psi))` inside; it
//! only agrees with the ODE when the integral does not span retirement and
//! `psi` is constant, and is kept so that disagreement can be measured.

use crate::model::{HabitSchedule, Side};
use crate::quadrature;

/// A time-indexed consumption curve, with any discontinuities declared so
/// that quadrature panels can be split there.
pub trait Curve {
    fn value(&self, t: f64) -> f64;

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(f64) -> f64> Curve for F {
    fn value(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Right-continuous step function: `values[i]` on `[knots[i-1], knots[i])`,
/// with `values.len() == knots.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepCurve {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), knots.len() + 1, "one more value than knots");
        assert!(knots.windows(2).all(|w| w[1] > w[0]), "knots must increase");
        Self { knots, values }
    }
}

impl Curve for StepCurve {
    fn value(&self, t: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= t);
        self.values[i]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.knots.clone()
    }
}

fn breaks<C: Curve>(sched: &HabitSchedule, curve: &C) -> Vec<f64> {
    let mut b = curve.breakpoints();
    b.push(sched.tau);
    b
}

/// `h_t = D_eta(0,t) h0 + int_0^t D_eta(s,t) psi(s) C_s ds`.
pub fn habit_from_consumption<C: Curve>(
    sched: &HabitSchedule,
    h0: f64,
    consumption: &C,
    t: f64,
) -> f64 {
    let integral = quadrature::integrate(0.0, t, &breaks(sched, consumption), |s| {
        sched.decay_unchecked(s, t, false, Side::Right) * sched.psi(s) * consumption.value(s)
    });
    sched.decay_unchecked(0.0, t, false, Side::Right) * h0 + integral
}

/// The branch-by-branch habit formula with constant pre/post coefficients.
pub fn habit_from_consumption_piecewise<C: Curve>(
    sched: &HabitSchedule,
    h0: f64,
    consumption: &C,
    t: f64,
) -> f64 {
    let tau = sched.tau;
    let bps = consumption.breakpoints();
    let consumption = |s: f64| consumption.value(s);
    let (psi, eta) = (sched.psi_pre, sched.eta_pre);
    let (mpsi, meta) = (sched.psi_post, sched.eta_post);
    let l = sched.jump;
    if t < tau {
        h0 * (-eta * t).exp()
            + psi * quadrature::integrate(0.0, t, &bps, |s| (-eta * (t - s)).exp() * consumption(s))
    } else {
        l * h0 * (-meta * (t - tau) - eta * tau).exp()
            + l * psi
                * quadrature::integrate(0.0, tau, &bps, |s| {
                    (-meta * (t - tau) - eta * (tau - s)).exp() * consumption(s)
                })
            + mpsi
                * quadrature::integrate(tau, t, &bps, |s| (-meta * (t - s)).exp() * consumption(s))
    }
}

/// Habit at `t` from excess consumption `c` on `[0, t]`:
/// `h_t = D(0,t) h0 + int_0^t D(s,t) psi(s) c_s ds` with `D` the
/// `eta - psi` integrating factor (jump included).
pub fn propagate_habit<C: Curve>(sched: &HabitSchedule, h0: f64, excess: &C, t: f64) -> f64 {
    let integral = quadrature::integrate(0.0, t, &breaks(sched, excess), |s| {
        sched.decay_unchecked(s, t, true, Side::Right) * sched.psi(s) * excess.value(s)
    });
    sched.decay_unchecked(0.0, t, true, Side::Right) * h0 + integral
}

/// `h_t = D(0,t) h0 + psi(t) int_0^t D(0,s) c_s ds`, kept for comparison.
pub fn propagate_habit_as_printed<C: Curve>(
    sched: &HabitSchedule,
    h0: f64,
    excess: &C,
    t: f64,
) -> f64 {
    let integral = quadrature::integrate(0.0, t, &breaks(sched, excess), |s| {
        sched.decay_unchecked(0.0, s, true, Side::Right) * excess.value(s)
    });
    sched.decay_unchecked(0.0, t, true, Side::Right) * h0 + sched.psi(t) * integral
}

/// Explicit Euler on `dh = [psi c - (eta~ - psi) h] dt` with `h(tau) = l h(tau-)`.
/// Test oracle; `dt` should divide `tau` and `t`.
pub fn euler_habit<C: Curve>(sched: &HabitSchedule, h0: f64, excess: &C, t: f64, dt: f64) -> f64 {
    let n = (t / dt).round() as usize;
    let mut h = h0;
    let mut jumped = false;
    for i in 0..n {
        let s = i as f64 * dt;
        if !jumped && s >= sched.tau - 1e-12 {
            h *= sched.jump;
            jumped = true;
        }
        h += dt * (sched.psi(s) * excess.value(s) - (sched.eta_smooth(s) - sched.psi(s)) * h);
    }
    if !jumped && t >= sched.tau - 1e-12 {
        h *= sched.jump;
    }
    h
}
