use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("points must have dimension >= 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("points not distinct: {i} and {j} are {distance:e} apart")]
    PointsNotDistinct { i: usize, j: usize, distance: f64 },
    #[error("weight {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("parameter out of open interval (0, 1): t[{index}] = {value}")]
    ParameterOutOfRange { index: usize, value: f64 },
    #[error("state component out of [0, 1]: u[{index}] = {value}")]
    StateOutOfRange { index: usize, value: f64 },
    #[error("x = {0} lies outside [0, 1]")]
    OutsideUnitInterval(f64),
    #[error("requires p >= {min}, got p = {got}")]
    UnsupportedOrder { min: usize, got: usize },
    #[error("requires p = 3, got p = {0}")]
    NotThreeComponents(usize),
    #[error("initial state must be sorted ascending")]
    UnsortedState,
    #[error("state is not strictly below alpha at the starting index")]
    NotBelowAlpha,
    #[error("trace would hold {requested} iterates, cap is {cap}")]
    TraceTooLong { requested: usize, cap: usize },
    #[error("input must be planar (d = 2), got d = {0}")]
    NotPlanar(usize),
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
