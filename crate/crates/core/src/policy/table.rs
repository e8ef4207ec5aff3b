use super::slice::{SliceEval, WealthSlice};

/// `f`, `S`, `S'` of one slice tabulated on a uniform grid in `ln H`, with
/// quintic Hermite interpolation of `f`, cubic of `S`, linear of `S'`.
/// The grid is aligned so that the slice's kink is a knot, and one-sided
/// values are stored there.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceTable {
    lo: f64,
    step: f64,
    left: Vec<SliceEval>,
    right: Vec<SliceEval>,
}

const SIDE_OFFSET: f64 = 1e-4;

impl SliceTable {
    /// Covers at least `[lo, hi]` with spacing `step`.
    pub fn build(slice: &WealthSlice, lo: f64, hi: f64, step: f64) -> Self {
        let lo = match slice.kink() {
            Some(k) => k - ((k - lo) / step).ceil() * step,
            None => lo,
        };
        let n = (((hi - lo) / step).ceil().max(1.0)) as usize;
        let kink_index = slice.kink().map(|k| ((k - lo) / step).round() as usize);
        let mut left = Vec::with_capacity(n + 1);
        let mut right = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let xi = lo + step * i as f64;
            if Some(i) == kink_index {
                let k = slice.kink().expect("kink index implies kink");
                let (mut l, mut r) = (
                    slice.eval_log(k - SIDE_OFFSET),
                    slice.eval_log(k + SIDE_OFFSET),
                );
                let mid = slice.eval_log(k);
                l.f = mid.f;
                r.f = mid.f;
                l.s = mid.s;
                r.s = mid.s;
                left.push(l);
                right.push(r);
            } else {
                let e = slice.eval_log(xi);
                left.push(e);
                right.push(e);
            }
        }
        Self {
            lo,
            step,
            left,
            right,
        }
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi >= self.lo && xi <= self.lo + self.step * (self.left.len() - 1) as f64
    }

    pub fn eval_log(&self, xi: f64) -> SliceEval {
        let pos = (xi - self.lo) / self.step;
        let i = (pos.floor().max(0.0) as usize).min(self.left.len() - 2);
        let u = pos - i as f64;
        let (p0, p1) = (self.right[i], self.left[i + 1]);
        let h = self.step;
        let (u2, u3) = (u * u, u * u * u);
        let (u4, u5) = (u3 * u, u3 * u2);
        let f = (1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5) * p0.f
            + (u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5) * h * p0.s
            + 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5) * h * h * p0.s_prime
            + (10.0 * u3 - 15.0 * u4 + 6.0 * u5) * p1.f
            + (-4.0 * u3 + 7.0 * u4 - 3.0 * u5) * h * p1.s
            + 0.5 * (u3 - 2.0 * u4 + u5) * h * h * p1.s_prime;
        let s = (2.0 * u3 - 3.0 * u2 + 1.0) * p0.s
            + (u3 - 2.0 * u2 + u) * h * p0.s_prime
            + (-2.0 * u3 + 3.0 * u2) * p1.s
            + (u3 - u2) * h * p1.s_prime;
        let s_prime = (1.0 - u) * p0.s_prime + u * p1.s_prime;
        SliceEval { f, s, s_prime }
    }
}
