use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::ModelParams;

/// Strictly increasing times on `[0, T]` that include every breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    /// Uniform grid of spacing at most `step`, with `breakpoints` inserted.
    /// Uniform nodes closer than `1e-9` years to a breakpoint are dropped.
    pub fn with_step(horizon: f64, step: f64, breakpoints: &[f64]) -> Result<Self> {
        if !(step > 0.0) || !(horizon > 0.0) {
            return Err(domain(format!(
                "grid needs positive step and horizon, got {step}, {horizon}"
            )));
        }
        let n = (horizon / step - 1e-9).ceil().max(1.0) as usize;
        let uniform = (0..=n).map(|i| horizon * i as f64 / n as f64);
        Self::from_points(horizon, uniform, breakpoints)
    }

    /// Grid for the standard breakpoints `{0, tau_min, tau, tau_st, T}`.
    pub fn for_model(params: &ModelParams, tau: f64, step: f64) -> Result<Self> {
        Self::with_step(params.horizon, step, &[params.tau_min, tau, params.tau_st])
    }

    fn from_points(
        horizon: f64,
        uniform: impl Iterator<Item = f64>,
        breakpoints: &[f64],
    ) -> Result<Self> {
        let tol = 1e-9;
        let bps: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > tol && b < horizon - tol)
            .collect();
        let mut nodes: Vec<f64> = uniform
            .filter(|u| bps.iter().all(|b| (u - b).abs() > tol))
            .chain(bps.iter().copied())
            .collect();
        nodes.push(0.0);
        nodes.push(horizon);
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite grid nodes"));
        nodes.dedup_by(|a, b| (*a - *b).abs() <= tol);
        // keep the exact endpoints
        nodes[0] = 0.0;
        *nodes.last_mut().expect("non-empty") = horizon;
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node equal to `t` (within `1e-9`), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.nodes.iter().position(|&x| (x - t).abs() <= 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints_become_nodes() {
        let g = TimeGrid::with_step(75.0, 0.5, &[25.0, 40.05, 40.0]).unwrap();
        let n = g.nodes();
        assert_eq!(n[0], 0.0);
        assert_eq!(*n.last().unwrap(), 75.0);
        assert!(n.windows(2).all(|w| w[1] > w[0]));
        assert!(g.index_of(40.05).is_some() && g.index_of(25.0).is_some());
    }

    #[test]
    fn bad_step_is_rejected() {
        assert!(TimeGrid::with_step(75.0, 0.0, &[]).is_err());
    }
}
