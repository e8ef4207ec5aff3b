//! Independent oracles shared by the integration suites. Every integrand is
//! written out from the model's definitions rather than calling the closed
//! forms under test.
#![allow(dead_code)]

use retire_core::model::{Curve, ModelParams};
use retire_core::quadrature::{integrate, GaussHermite};

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Integrating factor written out from the coefficients: rates `eta` (minus
/// `psi` with `offset`) before retirement, `m` times those after, and the
/// factor `l` when `[s, t]` contains the retirement date.
pub fn decay(p: &ModelParams, tau: f64, s: f64, t: f64, offset: bool) -> f64 {
    let pre = if offset { p.eta - p.psi } else { p.eta };
    let post = p.m * pre;
    let pre_len = (t.min(tau) - s).max(0.0);
    let post_len = (t - s.max(tau)).max(0.0);
    let jump = if s < tau && tau <= t { p.l } else { 1.0 };
    jump * (-pre * pre_len - post * post_len).exp()
}

pub fn psi(p: &ModelParams, tau: f64, t: f64) -> f64 {
    if t < tau {
        p.psi
    } else {
        p.m * p.psi
    }
}

pub fn f_oracle(p: &ModelParams, tau: f64, t: f64) -> f64 {
    psi(p, tau, t)
        * integrate(t, p.horizon, &[tau], |s| {
            decay(p, tau, t, s, true) * (-p.r * (s - t)).exp()
        })
}

/// `E[H_s W_s / (H_t W_t)]` by Gauss-Hermite over the Brownian increment
/// that drives both processes, with the wage frozen after `tau_min`.
pub fn wage_ratio(p: &ModelParams, t: f64, s: f64) -> f64 {
    let theta = p.theta();
    let u = (s.min(p.tau_min) - t).max(0.0);
    let rule = GaussHermite::new(40);
    let moving = rule.expect(|z| {
        let db = u.sqrt() * z;
        (-(p.r + 0.5 * theta * theta) * u - theta * db
            + (p.alpha - 0.5 * p.beta * p.beta) * u
            + p.beta * db)
            .exp()
    });
    moving * (-p.r * (s - t - u)).exp()
}

pub fn a_oracle(p: &ModelParams, tau: f64) -> f64 {
    let g = (-p.zeta * (p.tau_st - tau).max(0.0)).exp();
    let wage = integrate(0.0, tau, &[p.tau_min], |s| {
        (1.0 - p.k) * p.w0 * wage_ratio(p, 0.0, s)
    });
    let benefit = integrate(tau, p.horizon, &[], |s| {
        g * p.full_benefit * ((p.xi - p.r) * s).exp()
    });
    wage + benefit
}

pub fn o_oracle(p: &ModelParams, tau: f64, t: f64) -> f64 {
    if t >= tau {
        return 0.0;
    }
    integrate(t, tau, &[p.tau_min], |s| wage_ratio(p, t, s))
}

pub fn z_oracle(p: &ModelParams, tau: f64) -> f64 {
    integrate(0.0, p.horizon, &[tau], |s| {
        decay(p, tau, 0.0, s, false) * (-p.r * s).exp() * (1.0 + f_oracle(p, tau, s))
    })
}

pub fn n_oracle(p: &ModelParams, tau: f64, s: f64) -> f64 {
    1.0 + decay(p, tau, 0.0, s, true)
        * integrate(s, p.horizon, &[tau], |u| {
            psi(p, tau, u) * (-p.r * (u - s)).exp()
        })
}

/// Smooth oscillating consumption with one level shift.
#[derive(Debug, Clone)]
pub struct Wiggle {
    pub level: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub knot: f64,
    pub shift: f64,
}

impl Curve for Wiggle {
    fn value(&self, t: f64) -> f64 {
        let step = if t >= self.knot { self.shift } else { 0.0 };
        self.level + self.amplitude * (self.omega * t + self.phase).sin() + step
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.knot]
    }
}
