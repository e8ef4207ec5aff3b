use serde::Serialize;

use crate::quadrature::pairwise_sum;

use super::simulate::Ensemble;

/// A sample mean with its standard error and the value it should reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub target: f64,
}

impl Estimate {
    /// Mean and standard error of `values`. With antithetic sampling the
    /// partners `(2i, 2i+1)` are averaged first and treated as one draw.
    pub fn from_samples(values: &[f64], antithetic: bool, target: f64) -> Self {
        let draws: Vec<f64> = if antithetic {
            values
                .chunks(2)
                .map(|p| 0.5 * (p[0] + p[p.len() - 1]))
                .collect()
        } else {
            values.to_vec()
        };
        let n = draws.len() as f64;
        let mean = pairwise_sum(&draws) / n;
        let dev: Vec<f64> = draws.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if draws.len() > 1 {
            pairwise_sum(&dev) / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n).sqrt(),
            target,
        }
    }

    /// Signed distance from the target in standard errors.
    pub fn z_score(&self) -> f64 {
        let diff = self.mean - self.target;
        if self.se > 0.0 {
            diff / self.se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn within(&self, n_se: f64) -> bool {
        self.z_score().abs() <= n_se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeEstimate {
    pub t: f64,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub antithetic: bool,
    pub tau: f64,
    pub a_val: f64,
    /// `E int C* H ds` against `A`.
    pub budget: Estimate,
    /// `E int c* Gamma ds` against `A - h0 z`.
    pub adjusted_budget: Estimate,
    /// `E int income H ds` against `A`.
    pub income: Estimate,
    /// The martingale of wealth plus discounted net consumption, against its
    /// value at time zero.
    pub martingale: Vec<ProbeEstimate>,
    pub floor_violations: u64,
    pub bound_violations: u64,
    /// Largest `|X_sim - X_formula| / A` over all paths and times.
    pub max_relative_gap: f64,
    /// Path average of `max_t |X_sim - X_formula| / A`.
    pub mean_relative_gap: Estimate,
    /// `E |X_sim(T)| / A`.
    pub terminal_relative: Estimate,
    /// `ln H_T` sample mean against `-(r + theta^2/2) T`.
    pub ln_h_mean: Estimate,
    pub b_terminal: Estimate,
}

/// Sample-based checks of the budget, martingale and floor identities.
pub fn verify_identities(ensemble: &Ensemble) -> VerificationReport {
    let cfg = &ensemble.config;
    let anti = cfg.antithetic;
    let paths = &ensemble.paths;
    let a = ensemble.a_val;
    let scale = a.abs().max(f64::MIN_POSITIVE);
    let collect =
        |f: &dyn Fn(&super::PathSummary) -> f64| -> Vec<f64> { paths.iter().map(f).collect() };

    let martingale = ensemble
        .probe_times
        .iter()
        .enumerate()
        .map(|(j, &t)| ProbeEstimate {
            t,
            estimate: Estimate::from_samples(
                &collect(&|p| p.martingale[j]),
                anti,
                ensemble.x0_formula,
            ),
        })
        .collect();
    VerificationReport {
        n_paths: cfg.n_paths,
        dt: cfg.dt,
        seed: cfg.seed,
        antithetic: anti,
        tau: ensemble.tau,
        a_val: a,
        budget: Estimate::from_samples(&collect(&|p| p.consumption_cost), anti, a),
        adjusted_budget: Estimate::from_samples(
            &collect(&|p| p.adjusted_cost),
            anti,
            a - ensemble.h0 * ensemble.z_val,
        ),
        income: Estimate::from_samples(&collect(&|p| p.income_value), anti, a),
        martingale,
        floor_violations: paths.iter().map(|p| u64::from(p.floor_violations)).sum(),
        bound_violations: paths.iter().map(|p| u64::from(p.bound_violations)).sum(),
        max_relative_gap: paths.iter().map(|p| p.max_gap).fold(0.0, f64::max) / scale,
        mean_relative_gap: Estimate::from_samples(&collect(&|p| p.max_gap / scale), anti, 0.0),
        terminal_relative: Estimate::from_samples(
            &collect(&|p| p.x_sim_terminal.abs() / scale),
            anti,
            0.0,
        ),
        ln_h_mean: Estimate::from_samples(
            &collect(&|p| p.ln_h_terminal),
            anti,
            ensemble.ln_h_target,
        ),
        b_terminal: Estimate::from_samples(&collect(&|p| p.b_terminal), anti, 0.0),
    }
}
