use serde::Serialize;

use super::normal::normal_cdf;
use crate::error::{domain, Result};
use crate::model::ModelParams;

/// Below this log-variance a law is treated as a point mass at `exp(mean_log)`.
pub const DETERMINISTIC_VARIANCE: f64 = 1e-20;

/// Law of a positive random variable whose logarithm is normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LognormalLaw {
    pub mean_log: f64,
    pub var_log: f64,
}

impl LognormalLaw {
    pub fn new(mean_log: f64, var_log: f64) -> Result<Self> {
        if !(var_log >= 0.0) || !mean_log.is_finite() || !var_log.is_finite() {
            return Err(domain(format!(
                "lognormal law needs finite mean and var >= 0, got ({mean_log}, {var_log})"
            )));
        }
        Ok(Self { mean_log, var_log })
    }

    /// Law of `H_s / H_t` for `s >= t`:
    /// `ln(H_s/H_t) ~ N(-(r + theta^2/2)(s-t), theta^2 (s-t))`.
    pub fn state_price(params: &ModelParams, t: f64, s: f64) -> Result<Self> {
        if !(s >= t) {
            return Err(domain(format!(
                "state-price law needs s >= t, got t = {t}, s = {s}"
            )));
        }
        let theta = params.theta();
        let dt = s - t;
        Ok(Self {
            mean_log: -(params.r + 0.5 * theta * theta) * dt,
            var_log: theta * theta * dt,
        })
    }

    /// `E[X^a]`.
    pub fn moment(&self, a: f64) -> f64 {
        (a * self.mean_log + 0.5 * a * a * self.var_log).exp()
    }

    /// `E[X^a 1{X < c}]` (`below`) or `E[X^a 1{X >= c}]`.
    pub fn partial_power_moment(&self, a: f64, c: f64, below: bool) -> Result<f64> {
        if !(c > 0.0) {
            return Err(domain(format!(
                "partial moment threshold must be positive, got {c}"
            )));
        }
        Ok(self.partial_unchecked(a, c, below))
    }

    #[inline]
    pub(crate) fn partial_unchecked(&self, a: f64, c: f64, below: bool) -> f64 {
        if self.var_log < DETERMINISTIC_VARIANCE {
            let x = self.mean_log.exp();
            return if (x < c) == below { x.powf(a) } else { 0.0 };
        }
        if c == f64::INFINITY {
            return if below { self.moment(a) } else { 0.0 };
        }
        let sd = self.var_log.sqrt();
        let d = (c.ln() - self.mean_log) / sd;
        let arg = if below { d - a * sd } else { a * sd - d };
        self.moment(a) * normal_cdf(arg)
    }
}

/// Free-function form of [`LognormalLaw::partial_power_moment`].
pub fn partial_power_moment(law: &LognormalLaw, a: f64, c: f64, below: bool) -> Result<f64> {
    law.partial_power_moment(a, c, below)
}

/// `d_1 = -[ln x + (r + theta^2/2)(s-t)] / (theta sqrt(s-t))`, so that
/// `Phi(d_1) = P(H_s/H_t >= x)`.
pub fn d1_printed(params: &ModelParams, t: f64, s: f64, x: f64) -> f64 {
    let theta = params.theta();
    let dt = s - t;
    -(x.ln() + (params.r + 0.5 * theta * theta) * dt) / (theta * dt.sqrt())
}

/// `d_2 = -[ln x + (r + theta^2/2)(s-t) + (1-gamma) theta sqrt(s-t)] / (theta sqrt(s-t))`.
pub fn d2_printed(params: &ModelParams, t: f64, s: f64, x: f64) -> f64 {
    let theta = params.theta();
    let dt = s - t;
    -(x.ln() + (params.r + 0.5 * theta * theta) * dt + (1.0 - params.gamma) * theta * dt.sqrt())
        / (theta * dt.sqrt())
}
