use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Full calibration of market, wage, insurance, habit, utility and horizon.
///
/// Times are in years measured from the start of working life; rates are per
/// year; money amounts are per year in the same currency unit as `w0`.
/// Serialized keys are the conventional symbols (`W0`, `D`, `T`, `L`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Risk-free rate.
    pub r: f64,
    /// Drift of the risky asset.
    pub mu: f64,
    /// Volatility of the risky asset.
    pub sigma: f64,
    /// Wage drift (active until the minimum retirement time).
    pub alpha: f64,
    /// Wage volatility (active until the minimum retirement time).
    pub beta: f64,
    #[serde(rename = "W0")]
    pub w0: f64,
    /// Contribution rate on wages.
    pub k: f64,
    /// Full benefit at time 0.
    #[serde(rename = "D")]
    pub full_benefit: f64,
    /// Benefit growth rate.
    pub xi: f64,
    /// Early-retirement penalty elasticity.
    pub zeta: f64,
    pub tau_st: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Habit inflow rate before retirement.
    pub psi: f64,
    /// Habit decay rate before retirement.
    pub eta: f64,
    /// Multiplicative habit-level shrink at retirement.
    pub l: f64,
    /// Multiplicative habit-sensitivity shrink after retirement.
    pub m: f64,
    #[serde(default = "default_h0")]
    pub h0: f64,
    /// Maximal downward gap of consumption below habit.
    #[serde(rename = "L", default = "default_max_gap")]
    pub max_gap: f64,
    /// Time preference (including mortality).
    pub rho: f64,
    /// Relative risk aversion, in (0, 1).
    pub gamma: f64,
    /// Loss aversion.
    pub kappa: f64,
}

fn default_h0() -> f64 {
    ModelParams::baseline().h0
}

fn default_max_gap() -> f64 {
    ModelParams::baseline().max_gap
}

/// Parameters that the comparative-statics and sweep machinery can perturb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamName {
    Wage0,
    WageDrift,
    Contribution,
    Benefit,
    BenefitGrowth,
    HabitInflow,
    SensitivityShrink,
    LevelShrink,
    InitialHabit,
}

impl ParamName {
    /// The nine parameters of the retirement-time sensitivity table, in column order.
    pub const TABLE: [ParamName; 9] = [
        ParamName::Wage0,
        ParamName::WageDrift,
        ParamName::Contribution,
        ParamName::Benefit,
        ParamName::BenefitGrowth,
        ParamName::HabitInflow,
        ParamName::SensitivityShrink,
        ParamName::LevelShrink,
        ParamName::InitialHabit,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ParamName::Wage0 => "W0",
            ParamName::WageDrift => "alpha",
            ParamName::Contribution => "k",
            ParamName::Benefit => "D",
            ParamName::BenefitGrowth => "xi",
            ParamName::HabitInflow => "psi",
            ParamName::SensitivityShrink => "m",
            ParamName::LevelShrink => "l",
            ParamName::InitialHabit => "h0",
        }
    }

    pub fn parse(key: &str) -> Option<Self> {
        Self::TABLE.into_iter().find(|p| p.key() == key)
    }
}

impl ModelParams {
    /// The baseline calibration: working life starts at age 25, horizon at
    /// age 100, retirement window ages 50-80, statutory age 65.
    pub fn baseline() -> Self {
        Self {
            r: 0.02,
            mu: 0.08,
            sigma: 0.4,
            alpha: 0.028,
            beta: 0.02,
            w0: 10.0,
            k: 0.2,
            full_benefit: 6.0,
            xi: 0.018,
            zeta: 0.015,
            tau_st: 40.0,
            horizon: 75.0,
            tau_min: 25.0,
            tau_max: 55.0,
            psi: 0.05,
            eta: 0.05,
            l: 0.6,
            m: 0.3,
            h0: 6.0,
            max_gap: 0.5,
            rho: 0.04,
            gamma: 0.8,
            kappa: 2.25,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "baseline" => Ok(Self::baseline()),
            other => Err(ModelError::Config(format!("unknown preset `{other}`"))),
        }
    }

    /// Parses a flat `key = value` TOML document. Unknown keys are rejected;
    /// only `h0` and `L` may be omitted.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let params: Self =
            toml::from_str(text).map_err(|e| ModelError::Config(e.message().to_string()))?;
        params.validate()?;
        Ok(params)
    }

    /// Market price of risk.
    pub fn theta(&self) -> f64 {
        (self.mu - self.r) / self.sigma
    }

    /// Growth rate of `E[H_s W_s]` during the wage-growth phase. Wage and
    /// stock load on the same Brownian motion, so the covariance term enters
    /// as `-theta beta`.
    pub fn wage_growth_adjusted(&self) -> f64 {
        self.alpha - self.r - self.theta() * self.beta
    }

    /// The growth rate with the covariance term entering as `+theta beta`,
    /// kept for comparison only.
    pub fn wage_growth_adjusted_as_printed(&self) -> f64 {
        self.alpha - self.r + self.theta() * self.beta
    }

    /// Early-retirement benefit factor `exp(-zeta (tau_st - tau)^+)`.
    pub fn benefit_factor(&self, tau: f64) -> f64 {
        (-self.zeta * (self.tau_st - tau).max(0.0)).exp()
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Wage0 => self.w0,
            ParamName::WageDrift => self.alpha,
            ParamName::Contribution => self.k,
            ParamName::Benefit => self.full_benefit,
            ParamName::BenefitGrowth => self.xi,
            ParamName::HabitInflow => self.psi,
            ParamName::SensitivityShrink => self.m,
            ParamName::LevelShrink => self.l,
            ParamName::InitialHabit => self.h0,
        }
    }

    /// Returns a copy with `name` set to `value`. Moving `psi` also moves `eta`
    /// when the two coincide, so an arithmetic-average habit stays one.
    pub fn with(&self, name: ParamName, value: f64) -> Self {
        let mut p = *self;
        match name {
            ParamName::Wage0 => p.w0 = value,
            ParamName::WageDrift => p.alpha = value,
            ParamName::Contribution => p.k = value,
            ParamName::Benefit => p.full_benefit = value,
            ParamName::BenefitGrowth => p.xi = value,
            ParamName::HabitInflow => {
                if self.psi == self.eta {
                    p.eta = value;
                }
                p.psi = value;
            }
            ParamName::SensitivityShrink => p.m = value,
            ParamName::LevelShrink => p.l = value,
            ParamName::InitialHabit => p.h0 = value,
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("r", self.r),
            ("mu", self.mu),
            ("sigma", self.sigma),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("W0", self.w0),
            ("k", self.k),
            ("D", self.full_benefit),
            ("xi", self.xi),
            ("zeta", self.zeta),
            ("tau_st", self.tau_st),
            ("T", self.horizon),
            ("tau_min", self.tau_min),
            ("tau_max", self.tau_max),
            ("psi", self.psi),
            ("eta", self.eta),
            ("l", self.l),
            ("m", self.m),
            ("h0", self.h0),
            ("L", self.max_gap),
            ("rho", self.rho),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.sigma <= 0.0 {
            return Err(invalid("sigma", "must be positive"));
        }
        if !(0.0 <= self.tau_min
            && self.tau_min <= self.tau_st
            && self.tau_st <= self.tau_max
            && self.tau_max <= self.horizon)
        {
            return Err(invalid(
                "tau_min",
                "need 0 <= tau_min <= tau_st <= tau_max <= T",
            ));
        }
        if self.horizon <= 0.0 {
            return Err(invalid("T", "must be positive"));
        }
        if !(self.l > 0.0 && self.l <= 1.0) {
            return Err(invalid("l", "must lie in (0, 1]"));
        }
        if !(self.m > 0.0 && self.m <= 1.0) {
            return Err(invalid("m", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.k) {
            return Err(invalid("k", "must lie in [0, 1]"));
        }
        if self.max_gap < 0.0 {
            return Err(invalid("L", "must be nonnegative"));
        }
        if self.kappa < 1.0 {
            return Err(invalid("kappa", "must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid("gamma", "must lie in (0, 1)"));
        }
        if self.psi < 0.0 || self.eta < 0.0 {
            return Err(invalid("psi", "psi and eta must be nonnegative"));
        }
        if self.w0 < 0.0 || self.full_benefit < 0.0 || self.h0 < 0.0 {
            return Err(invalid("W0", "W0, D and h0 must be nonnegative"));
        }
        Ok(())
    }

    pub fn check_tau(&self, tau: f64) -> Result<()> {
        if !(tau >= self.tau_min - 1e-12 && tau <= self.tau_max + 1e-12) {
            return Err(invalid(
                "tau",
                format!("{tau} outside [{}, {}]", self.tau_min, self.tau_max),
            ));
        }
        Ok(())
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
