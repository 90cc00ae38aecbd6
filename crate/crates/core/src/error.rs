use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite coefficient {value} at index {index}")]
    NonFiniteCoefficient { index: usize, value: f64 },

    #[error("requested order {requested} exceeds available order {available}")]
    OrderTooLarge { requested: usize, available: usize },

    #[error("inner series has nonzero constant term {0}")]
    NonzeroConstantTerm(f64),

    #[error("{what} violated (coefficient index {index})")]
    Precondition { what: String, index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("cumulative mass {mass} below target {target} after {k_used} terms")]
    MassDeficit { mass: f64, target: f64, k_used: usize },

    #[error("weight {value} at k = {k} is negative beyond rounding tolerance")]
    NegativeWeight { k: usize, value: f64 },

    #[error("function returned {value} at node {node}")]
    NonFiniteSample { node: f64, value: f64 },

    #[error("second central moment {0} is negative")]
    NegativeVariance(f64),

    #[error("grid step {step} is too coarse for delta {delta} (need step <= delta/16)")]
    GridTooCoarse { step: f64, delta: f64 },

    #[error("window [{t_min}, {t_max}] too small for smoothing width {width}")]
    WindowTooSmall { t_min: f64, t_max: f64, width: f64 },

    #[error("family `{0}` is not an Appell family")]
    NotAppell(String),
}
