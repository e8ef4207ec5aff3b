//! Composite Gauss–Legendre quadrature on panels that never straddle a
//! declared breakpoint.
//!
//! Every deterministic curve in this crate is smooth between breakpoints
//! (retirement, minimum retirement age, statutory age), so a fixed-order rule
//! per panel is enough. Integrands that sharpen near one end (normal CDFs whose
//! variance vanishes as `s -> t`) get a geometrically graded set of panels at
//! that end.

use std::sync::OnceLock;

/// Default rule order per panel.
pub const DEFAULT_ORDER: usize = 8;
/// Default maximal panel width in years.
pub const DEFAULT_MAX_WIDTH: f64 = 2.5;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared order-8 rule.
    pub fn order8() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(DEFAULT_ORDER))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Ordered, non-overlapping integration panels covering `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panels {
    edges: Vec<f64>,
}

impl Panels {
    /// Panels on `[a, b]` with every breakpoint strictly inside `(a, b)` as an
    /// edge and no panel wider than `max_width`.
    pub fn new(a: f64, b: f64, breakpoints: &[f64], max_width: f64) -> Self {
        Self::from_edges(a, b, breakpoints.iter().copied(), max_width)
    }

    /// Like [`Panels::new`], plus panels graded geometrically towards `a`
    /// (offsets `first * ratio^j`), for integrands that sharpen at `a`.
    pub fn graded(
        a: f64,
        b: f64,
        breakpoints: &[f64],
        max_width: f64,
        first: f64,
        ratio: f64,
    ) -> Self {
        let mut extra = Vec::new();
        let mut h = first;
        let limit = (b - a).min(1.0);
        while h < limit {
            extra.push(a + h);
            h *= ratio;
        }
        Self::from_edges(a, b, breakpoints.iter().copied().chain(extra), max_width)
    }

    fn from_edges(a: f64, b: f64, inner: impl Iterator<Item = f64>, max_width: f64) -> Self {
        if b <= a {
            return Self { edges: vec![a, a] };
        }
        let tol = 1e-12 * (1.0 + b.abs());
        let mut cuts: Vec<f64> = inner.filter(|&x| x > a + tol && x < b - tol).collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        cuts.dedup_by(|x, y| (*x - *y).abs() <= tol);
        let mut edges = Vec::with_capacity(cuts.len() * 2);
        edges.push(cuts[0]);
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
            for j in 1..pieces {
                edges.push(lo + (hi - lo) * j as f64 / pieces as f64);
            }
            edges.push(hi);
        }
        Self { edges }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges.windows(2).map(|w| (w[0], w[1]))
    }

    /// Flattens the panels into a node/weight list for `rule`.
    pub fn nodes(&self, rule: &GaussLegendre) -> NodeSet {
        let mut nodes = Vec::with_capacity(rule.order() * self.edges.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (a, b) in self.iter() {
            if b <= a {
                continue;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(mid + half * x);
                weights.push(w * half);
            }
        }
        NodeSet { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, rule: &GaussLegendre, mut f: F) -> f64 {
        self.iter()
            .filter(|(a, b)| b > a)
            .map(|(a, b)| rule.integrate(a, b, &mut f))
            .sum()
    }
}

/// A flattened composite rule: `sum_i w_i f(x_i)`.
#[derive(Debug, Clone, Default)]
pub struct NodeSet {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Composite order-8 integral of `f` over `[a, b]` split at `breakpoints`.
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, breakpoints: &[f64], f: F) -> f64 {
    Panels::new(a, b, breakpoints, DEFAULT_MAX_WIDTH).integrate(GaussLegendre::order8(), f)
}

/// Gauss–Hermite rule for expectations under the standard normal law:
/// `E[f(Z)] ~ sum_i w_i f(x_i)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => {
                    (2.0 * n as f64 + 1.0).sqrt()
                        - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * xs[0],
                3 => 1.91 * z - 0.91 * xs[1],
                _ => 2.0 * z - xs[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2
                        - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() < 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            xs[i] = z;
            ws[i] = 2.0 / (pp * pp);
            xs[n - 1 - i] = -z;
            ws[n - 1 - i] = ws[i];
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let nodes = xs
            .iter()
            .rev()
            .map(|x| x * std::f64::consts::SQRT_2)
            .collect();
        let weights = ws.iter().rev().map(|w| w / sqrt_pi).collect();
        Self { nodes, weights }
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Pairwise summation; the result does not depend on how the slice was
/// produced, only on its order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}
