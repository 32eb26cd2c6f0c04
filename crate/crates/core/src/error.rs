use thiserror::Error;

use crate::model::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("t = {t} is not a point of the time scale")]
    PointNotInScale { t: f64 },

    #[error("budget exhausted: {0}")]
    BudgetExceeded(String),

    #[error("1 + mu*p vanishes at t = {t} (mu = {mu}, p = {p})")]
    NotRegressive { t: f64, mu: f64, p: f64 },

    #[error("invalid time scale: {0}")]
    InvalidTimeScale(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("region family {family} is not defined for regime {regime:?}")]
    RegimeMismatch { regime: Regime, family: String },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}
