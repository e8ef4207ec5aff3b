use crate::analytics::{normal_cdf, normal_pdf, LognormalLaw};
use crate::dual::DualSolution;
use crate::model::Side;
use crate::quadrature::{GaussLegendre, Panels};

/// Panel layout for the `s`-integral inside `f_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceResolution {
    pub max_width: f64,
    pub first: f64,
    pub ratio: f64,
}

impl Default for SliceResolution {
    fn default() -> Self {
        Self {
            max_width: 2.5,
            first: 1e-8,
            ratio: 4.0,
        }
    }
}

impl SliceResolution {
    /// Coarser layout used along simulated paths.
    pub fn path() -> Self {
        Self {
            max_width: 5.0,
            first: 1e-8,
            ratio: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SliceNode {
    sv: f64,
    /// `ln x0_s - mean_log`, so `d = (num - ln H_t) / sv`.
    num: f64,
    /// Gain-branch weight `w (1+F_s) P_s E[R^a]`.
    main: f64,
    /// `w (1+F_s) e^{-r(s-t)}`.
    loss: f64,
    /// `w (1+F_s) x0_s / sv`.
    edge: f64,
    a_sv: f64,
}

/// `f_t(H) = int_t^T (1+F_s) E_t[Y_s(nu Gamma_s) H_s / H_t] ds` and its
/// log-derivatives for one fixed `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthSlice {
    pub t: f64,
    nodes: Vec<SliceNode>,
    inv_gamma: f64,
    x_plus: f64,
    max_gap: f64,
    floor_only: bool,
    loss_total: f64,
    kink: Option<f64>,
}

/// `f`, `S = H f'(H)` and `S' = dS/d ln H` at one state-price level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceEval {
    pub f: f64,
    pub s: f64,
    pub s_prime: f64,
}

impl WealthSlice {
    pub fn new(dual: &DualSolution, t: f64, res: SliceResolution) -> Self {
        let p = dual.params();
        let curves = dual.curves();
        let utility = &dual.problem.utility;
        let gamma = p.gamma;
        let a = 1.0 - 1.0 / gamma;
        let nu = dual.nu;
        let floor_only = nu == f64::INFINITY;
        let x_plus = dual.q_star.powf(-1.0 / gamma);
        let panels = Panels::graded(
            t,
            p.horizon,
            &[p.tau_min, curves.tau, p.tau_st],
            res.max_width,
            res.first,
            res.ratio,
        );
        let set = panels.nodes(GaussLegendre::order8());
        let mut loss_total = 0.0;
        let nodes = set
            .nodes
            .iter()
            .zip(&set.weights)
            .map(|(&s, &w)| {
                let law = LognormalLaw::state_price(p, t, s).expect("s > t");
                let sv = law.var_log.sqrt();
                let wf = w * (1.0 + curves.f_at(s, Side::Right));
                let disc = (-p.r * (s - t)).exp();
                loss_total += wf * disc;
                if floor_only {
                    return SliceNode {
                        sv,
                        num: 0.0,
                        main: 0.0,
                        loss: wf * disc,
                        edge: 0.0,
                        a_sv: a * sv,
                    };
                }
                let y = nu * (1.0 + curves.f_at(s, Side::Right));
                let x0 = utility.threshold(dual.problem.tangency, s) / y;
                let p_s = (y * (p.rho * s).exp()).powf(-1.0 / gamma);
                SliceNode {
                    sv,
                    num: x0.ln() - law.mean_log,
                    main: wf * p_s * law.moment(a),
                    loss: wf * disc,
                    edge: if x0.is_finite() { wf * x0 / sv } else { 0.0 },
                    a_sv: a * sv,
                }
            })
            .collect();
        let threshold = utility.threshold(dual.problem.tangency, t)
            / (nu * (1.0 + curves.f_at(t, Side::Right)));
        let kink = (!floor_only && threshold.is_finite() && t < p.horizon).then(|| threshold.ln());
        Self {
            t,
            nodes,
            inv_gamma: 1.0 / gamma,
            x_plus,
            max_gap: p.max_gap,
            floor_only,
            loss_total,
            kink,
        }
    }

    /// `ln H_t` at which current consumption jumps to the floor; `S'` is
    /// discontinuous there.
    pub fn kink(&self) -> Option<f64> {
        self.kink
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluates at `H_t = e^{xi}`.
    pub fn eval_log(&self, xi: f64) -> SliceEval {
        if self.floor_only {
            return SliceEval {
                f: -self.max_gap * self.loss_total,
                s: 0.0,
                s_prime: 0.0,
            };
        }
        let mut gain = 0.0;
        let mut loss = 0.0;
        let mut q = 0.0;
        let mut q_prime = 0.0;
        for n in &self.nodes {
            let d = (n.num - xi) / n.sv;
            if d > n.sv + 9.0 {
                gain += n.main;
                continue;
            }
            if d - n.a_sv < -9.0 {
                loss += n.loss;
                continue;
            }
            gain += n.main * normal_cdf(d - n.a_sv);
            loss += n.loss * normal_cdf(n.sv - d);
            let e = n.edge * normal_pdf(d);
            q += e;
            q_prime += e * (d / n.sv - 1.0);
        }
        let h_inv = (-xi).exp();
        q *= h_inv;
        q_prime *= h_inv;
        let gain = (-xi * self.inv_gamma).exp() * gain;
        let g = self.inv_gamma;
        let edge = self.x_plus + self.max_gap;
        SliceEval {
            f: gain - self.max_gap * loss,
            s: -g * gain - edge * q,
            s_prime: g * g * gain + self.x_plus * g * q - edge * q_prime,
        }
    }

    pub fn eval(&self, h: f64) -> SliceEval {
        self.eval_log(h.ln())
    }
}
