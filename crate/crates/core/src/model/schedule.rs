use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::ModelParams;

/// Which one-sided value to take at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Piecewise-constant habit coefficients with the retirement jump.
///
/// Before `tau` the inflow and decay rates are `psi` and `eta`; from `tau` on
/// (right-continuous) they are `m psi` and `m eta`. The habit level is
/// multiplied by `jump = l` at `tau`. The jump is carried as a factor
/// `l^{1{s < tau <= t}}` on every integrating factor over `[s, t]`, which is
/// the same thing as adding a point mass `-ln(l) delta(u - tau)` to the decay
/// rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HabitSchedule {
    pub tau: f64,
    pub psi_pre: f64,
    pub eta_pre: f64,
    pub psi_post: f64,
    pub eta_post: f64,
    pub jump: f64,
}

impl HabitSchedule {
    pub fn new(params: &ModelParams, tau: f64) -> Self {
        Self {
            tau,
            psi_pre: params.psi,
            eta_pre: params.eta,
            psi_post: params.m * params.psi,
            eta_post: params.m * params.eta,
            jump: params.l,
        }
    }

    pub fn psi(&self, t: f64) -> f64 {
        self.psi_at(t, Side::Right)
    }

    pub fn psi_at(&self, t: f64, side: Side) -> f64 {
        if self.is_pre(t, side) {
            self.psi_pre
        } else {
            self.psi_post
        }
    }

    /// Smooth part of the decay rate (without the point mass at `tau`).
    pub fn eta_smooth(&self, t: f64) -> f64 {
        if t < self.tau {
            self.eta_pre
        } else {
            self.eta_post
        }
    }

    fn is_pre(&self, t: f64, side: Side) -> bool {
        match side {
            Side::Right => t < self.tau,
            Side::Left => t <= self.tau,
        }
    }

    /// `int_s^t (eta~(u) - [psi(u)]) du`, smooth part only.
    fn smooth_exponent(&self, s: f64, t: f64, psi_offset: bool) -> f64 {
        let (pre_rate, post_rate) = if psi_offset {
            (self.eta_pre - self.psi_pre, self.eta_post - self.psi_post)
        } else {
            (self.eta_pre, self.eta_post)
        };
        let pre_len = (t.min(self.tau) - s).max(0.0);
        let post_len = (t - s.max(self.tau)).max(0.0);
        pre_rate * pre_len + post_rate * post_len
    }

    /// Integrating factor `exp(-int_s^t eta(u) du)` (flag off) or
    /// `exp(-int_s^t (eta(u) - psi(u)) du)` (flag on), jump included iff
    /// `s < tau <= t`.
    pub fn decay(&self, s: f64, t: f64, psi_offset: bool) -> Result<f64> {
        if !(s <= t) {
            return Err(domain(format!("decay needs s <= t, got s = {s}, t = {t}")));
        }
        Ok(self.decay_unchecked(s, t, psi_offset, Side::Right))
    }

    /// Same as [`HabitSchedule::decay`] with an explicit side at `t = tau`:
    /// `Side::Left` evaluates the factor up to `tau-` (jump not yet applied).
    pub fn decay_at(&self, s: f64, t: f64, psi_offset: bool, side: Side) -> f64 {
        self.decay_unchecked(s, t, psi_offset, side)
    }

    pub(crate) fn decay_unchecked(&self, s: f64, t: f64, psi_offset: bool, side: Side) -> f64 {
        let smooth = (-self.smooth_exponent(s, t, psi_offset)).exp();
        let crosses = s < self.tau
            && match side {
                Side::Right => self.tau <= t,
                Side::Left => self.tau < t,
            };
        if crosses {
            self.jump * smooth
        } else {
            smooth
        }
    }

    /// Breakpoints in the habit coefficients (just `tau`).
    pub fn breakpoints(&self) -> [f64; 1] {
        [self.tau]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched() -> HabitSchedule {
        HabitSchedule::new(&ModelParams::baseline(), 40.0)
    }

    #[test]
    fn pre_retirement_decay_is_plain_exponential() {
        let s = sched();
        let got = s.decay(0.0, 12.5, false).unwrap();
        assert!((got - (-0.05f64 * 12.5).exp()).abs() < 1e-15);
    }

    #[test]
    fn post_retirement_decay_matches_second_habit_branch() {
        let s = sched();
        let t = 52.0;
        let want = 0.6 * (-0.3 * 0.05 * (t - 40.0) - 0.05 * 40.0f64).exp();
        let got = s.decay(0.0, t, false).unwrap();
        assert!((got - want).abs() < 1e-15 * want);
    }

    #[test]
    fn arithmetic_average_habit_leaves_only_the_jump() {
        let s = sched();
        assert_eq!(s.decay(3.0, 60.0, true).unwrap(), 0.6);
        assert_eq!(s.decay(3.0, 40.0, true).unwrap(), 0.6);
        assert_eq!(s.decay_at(3.0, 40.0, true, Side::Left), 1.0);
        assert_eq!(s.decay(40.0, 60.0, true).unwrap(), 1.0);
        assert_eq!(s.decay(3.0, 39.0, true).unwrap(), 1.0);
    }

    #[test]
    fn reversed_times_are_a_domain_error() {
        assert!(sched().decay(5.0, 4.0, false).is_err());
    }

    #[test]
    fn coefficients_are_right_continuous() {
        let s = sched();
        assert_eq!(s.psi(40.0), 0.3 * 0.05);
        assert_eq!(s.psi_at(40.0, Side::Left), 0.05);
        assert_eq!(s.eta_smooth(39.999), 0.05);
    }

    #[test]
    fn factors_compose_multiplicatively() {
        let p = ModelParams {
            psi: 0.03,
            eta: 0.07,
            ..ModelParams::baseline()
        };
        let s = HabitSchedule::new(&p, 33.0);
        for flag in [false, true] {
            let whole = s.decay(2.0, 70.0, flag).unwrap();
            let split = s.decay(2.0, 33.0, flag).unwrap() * s.decay(33.0, 70.0, flag).unwrap();
            assert!((whole - split).abs() < 1e-15);
        }
    }
}
