//! Closed-form deterministic quantities: the normal distribution, lognormal
//! partial moments, and the annuity-type curves of the model.

mod curves;
mod lognormal;
mod normal;

pub use curves::{
    compute_a, compute_f, compute_n, compute_o, compute_z, discount_factor_integral,
    growth_integral, CurveKind, Curves, DeterministicCurve,
};
pub use lognormal::{
    d1_printed, d2_printed, partial_power_moment, LognormalLaw, DETERMINISTIC_VARIANCE,
};
pub use normal::{normal_cdf, normal_pdf};
