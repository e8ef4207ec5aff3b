use serde::Serialize;

use crate::analytics::{discount_factor_integral, Curves};
use crate::error::Result;
use crate::model::{ModelParams, Side};
use crate::quadrature;

/// Minimal consumption `C_t` and the wealth `X_t` needed to finance it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBounds {
    pub consumption: f64,
    pub wealth: f64,
}

fn minimal_consumption(c: &Curves, t: f64) -> f64 {
    let sch = &c.schedule;
    let big_l = c.params.max_gap;
    let b1 = sch.eta_pre - sch.psi_pre;
    let b2 = sch.eta_post - sch.psi_post;
    let tau = c.tau;
    let cumulative = if t < tau {
        discount_factor_integral(b1, t)
    } else {
        discount_factor_integral(b1, tau)
            + sch.jump * (-b1 * tau).exp() * discount_factor_integral(b2, t - tau)
    };
    sch.decay_at(0.0, t, true, Side::Right) * c.params.h0 - sch.psi(t) * big_l * cumulative - big_l
}

/// `C_t = D(0,t) h0 - psi(t) int_0^t D(0,s) L ds - L` and
/// `X_t = int_t^T [e^{-r(s-t)} C_s - g D e^{xi s} e^{-r(s-t)} 1{s>tau}] ds`.
pub fn lower_bounds(params: &ModelParams, tau: f64, t: f64) -> Result<LowerBounds> {
    let c = Curves::new(params, tau)?;
    if !(0.0..=params.horizon).contains(&t) {
        return Err(crate::error::domain(format!("time {t} outside [0, T]")));
    }
    let r = params.r;
    let consumption_leg = quadrature::integrate(t, params.horizon, &[tau], |s| {
        (-r * (s - t)).exp() * minimal_consumption(&c, s)
    });
    Ok(LowerBounds {
        consumption: minimal_consumption(&c, t),
        wealth: consumption_leg - c.benefit_annuity(t),
    })
}
