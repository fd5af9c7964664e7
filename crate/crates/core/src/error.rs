use thiserror::Error;

/// Errors raised by the arithmetic, series and formal-group layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operands use different configurations")]
    ConfigMismatch,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("working modulus p^{digits} exceeds the 120-bit arithmetic kernel")]
    ModulusOverflow { digits: i64 },
    #[error("element is not a unit at the available precision")]
    NonUnit,
    #[error("denominator p^{needed} exceeds the cap p^{cap}")]
    DenominatorCapExceeded { needed: i64, cap: u32 },
    #[error("valuation is not defined on a generic quotient ring")]
    UnsupportedRing,
    #[error("Newton hypothesis val(f(z)) > 2 val(f'(z)) fails: {0}")]
    NewtonHypothesisFailed(String),
    #[error("inner series {index} has a nonzero constant term")]
    InnerConstantTermNonzero { index: usize },
    #[error("derivative at 0 is not a unit")]
    NonUnitDerivative,
    #[error("series vanishes mod p through degree {deg_cap}")]
    InfiniteHeightAtCap { deg_cap: u32 },
    #[error("degree {degree} correction at exponent {exponents:?} is not divisible by p^{needed}")]
    IntegralityFailure {
        degree: u32,
        exponents: Vec<u32>,
        needed: u32,
    },
    #[error("group axiom `{axiom}` fails at exponent {exponents:?}")]
    AxiomCheckFailed {
        axiom: &'static str,
        exponents: Vec<u32>,
    },
    #[error("series is not stable: {0}")]
    NotStable(String),
    #[error("series do not commute (first difference at exponent {exponents:?})")]
    NotCommuting { exponents: Vec<u32> },
    #[error("reconstruction differs from the input at exponent {exponents:?}")]
    ReconstructionMismatch { exponents: Vec<u32> },
    #[error("evaluation has no guaranteed precision: {0}")]
    DivergentEvaluation(String),
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
