//! Path simulation of the optimal policy and sampling checks of the
//! semi-analytical identities.

mod rng;
mod simulate;
mod verify;

pub use rng::PathRng;
pub use simulate::{simulate, Ensemble, PathState, PathSummary, SimConfig};
pub use verify::{verify_identities, Estimate, ProbeEstimate, VerificationReport};
