//! Lifecycle consumption, portfolio choice and pre-commitment retirement time
//! for an investor with habit persistence whose habit level and habit
//! sensitivity both drop at retirement.
//!
//! The solution is semi-analytical: a static budget constraint under an
//! adjusted state-price density, an S-shaped utility concavified through a
//! tangency threshold, and lognormal partial moments for every expectation.
//! A Monte Carlo engine re-derives the same identities by simulation.

pub mod analytics;
pub mod dual;
pub mod error;
pub mod lifecycle;
pub mod model;
pub mod montecarlo;
pub mod policy;
pub mod quadrature;
pub mod roots;

pub use error::{ModelError, Result};
