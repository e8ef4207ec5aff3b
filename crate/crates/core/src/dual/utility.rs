use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::ModelParams;
use crate::roots;

/// Threshold constant of the concavified utility: `y_0(s) = e^{-rho s} q*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tangency {
    Finite(f64),
    /// No loss branch (`L = 0`): the dual map never jumps to `-L`.
    Unbounded,
}

impl Tangency {
    pub fn q_star(self) -> f64 {
        match self {
            Tangency::Finite(q) => q,
            Tangency::Unbounded => f64::INFINITY,
        }
    }
}

/// `u(x) = x^{1-gamma}/(1-gamma)` for `x >= 0` and
/// `-kappa (-x)^{1-gamma}/(1-gamma)` on `[-L, 0)`; discounted by `e^{-rho s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SUtility {
    pub rho: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub max_gap: f64,
}

impl SUtility {
    pub fn from_params(p: &ModelParams) -> Self {
        Self {
            rho: p.rho,
            gamma: p.gamma,
            kappa: p.kappa,
            max_gap: p.max_gap,
        }
    }

    pub fn u(&self, x: f64) -> f64 {
        let e = 1.0 - self.gamma;
        if x >= 0.0 {
            x.powf(e) / e
        } else {
            -self.kappa * (-x).powf(e) / e
        }
    }

    pub fn u_at(&self, s: f64, x: f64) -> f64 {
        (-self.rho * s).exp() * self.u(x)
    }

    /// `u_s'(x)` on the gain branch.
    pub fn marginal_at(&self, s: f64, x: f64) -> f64 {
        (-self.rho * s).exp() * x.powf(-self.gamma)
    }

    /// Inverse of `u` on `[-L, inf)`; values below `u(-L)` clamp to `-L`.
    pub fn inverse(&self, v: f64) -> f64 {
        let e = 1.0 - self.gamma;
        if v >= 0.0 {
            (e * v).powf(1.0 / e)
        } else {
            -((-e * v / self.kappa).powf(1.0 / e)).min(self.max_gap)
        }
    }

    fn tangency_gap(&self, q: f64) -> f64 {
        let g = self.gamma;
        let e = 1.0 - g;
        let lhs = q.powf(-e / g) / e + self.kappa * self.max_gap.powf(e) / e;
        let rhs = q * (q.powf(-1.0 / g) + self.max_gap);
        lhs - rhs
    }

    pub fn tangency(&self) -> Result<Tangency> {
        solve_tangency(self)
    }

    /// `y_0(s)`, or `+inf` without a loss branch.
    pub fn threshold(&self, tangency: Tangency, s: f64) -> f64 {
        (-self.rho * s).exp() * tangency.q_star()
    }

    /// `Y_s(y)` without domain checks.
    #[inline]
    pub fn excess(&self, tangency: Tangency, s: f64, y: f64) -> f64 {
        if y >= self.threshold(tangency, s) {
            -self.max_gap
        } else {
            (y * (self.rho * s).exp()).powf(-1.0 / self.gamma)
        }
    }

    /// `V_s(y) = u_s(Y_s(y)) - Y_s(y) y`.
    pub fn dual_value(&self, tangency: Tangency, s: f64, y: f64) -> f64 {
        let c = self.excess(tangency, s, y);
        self.u_at(s, c) - c * y
    }
}

/// Solves the tangency equation for `q*` by log-scale bisection after
/// confirming a single sign change on a log grid.
pub fn solve_tangency(u: &SUtility) -> Result<Tangency> {
    if !(u.gamma > 0.0 && u.gamma < 1.0) || u.kappa < 1.0 || u.max_gap < 0.0 {
        return Err(domain("tangency needs gamma in (0,1), kappa >= 1, L >= 0"));
    }
    if u.max_gap == 0.0 {
        return Ok(Tangency::Unbounded);
    }
    let grid: Vec<f64> = (-60..=60).map(|i| (i as f64 * 0.5).exp()).collect();
    let signs: Vec<f64> = grid.iter().map(|&q| u.tangency_gap(q).signum()).collect();
    let changes: Vec<usize> = (1..grid.len())
        .filter(|&i| signs[i] != signs[i - 1])
        .collect();
    if changes.len() != 1 {
        return Err(domain(format!(
            "tangency equation has {} sign changes on the scan grid",
            changes.len()
        )));
    }
    let i = changes[0];
    let root = roots::bisect(
        |lq| u.tangency_gap(lq.exp()),
        grid[i - 1].ln(),
        grid[i].ln(),
        1e-14,
        200,
    )?;
    Ok(Tangency::Finite(root.x.exp()))
}

/// `Y_s(y) = -L` if `y >= y_0(s)`, else `(y e^{rho s})^{-1/gamma}`.
pub fn dual_map(u: &SUtility, tangency: Tangency, s: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(domain(format!("dual map needs y > 0, got {y}")));
    }
    Ok(u.excess(tangency, s, y))
}
