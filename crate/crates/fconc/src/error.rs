use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument {value} outside the domain {domain}")]
    OutsideDomain { value: f64, domain: String },
    #[error("U >= a at x={x:?}, t={t}: outside the interval of F")]
    AboveCap { x: Vec<f64>, t: f64 },
    #[error("first derivative vanishes at r={0}")]
    VanishingDerivative(f64),
    #[error("function is not declared C^2")]
    NotC2,
    #[error("kappa <= 0 at v={0}; nu is -inf, use the I test")]
    NonPositiveKappa(f64),
    #[error("strength routes disagree: composition says {composition}, kappa says {kappa}")]
    RouteDisagreement { composition: String, kappa: String },
    #[error("incompatible intervals: {0}")]
    IncompatibleIntervals(String),
    #[error("pair (xi, z) is not supporting: sup <y-z, xi> = {0}")]
    NonSupporting(f64),
    #[error("vanishing denominator in moment ratio")]
    VanishingDenominator,
    #[error("exponent overflow with the max shift disabled")]
    Overflow,
    #[error("negative radicand eta + r^2 = {0}")]
    NegativeRadicand(f64),
    #[error("inconsistent scenario: {0}")]
    InconsistentScenario(String),
    #[error("undecidable: {0}")]
    Undecidable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
