use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible: income cannot support minimal consumption (budget {budget:.6e} < floor {floor:.6e})")]
    Infeasible { budget: f64, floor: f64 },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("no feasible retirement time in [{lo}, {hi}]")]
    NoFeasibleTau { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}
