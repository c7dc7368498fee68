use thiserror::Error;

/// Errors raised by the LTI, network, reduction and metric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("transfer function is improper: numerator degree {num} exceeds denominator degree {den}")]
    ImproperTransfer { num: usize, den: usize },
    #[error("transfer function is not strictly proper")]
    NotStrictlyProper,
    #[error("matrix is not Hurwitz: eigenvalue with real part {0:e}")]
    NotHurwitz(f64),
    #[error("system is unstable: pole with real part {0:e}")]
    UnstableSystem(f64),
    #[error("input system to balanced truncation is unstable: pole with real part {0:e}")]
    UnstableInput(f64),
    #[error("evaluation frequency {0} rad/s coincides with a pole")]
    PoleOnGrid(f64),
    #[error("system has a pole at s = 0")]
    IntegratorPresent,
    #[error("denominator has complex roots")]
    ComplexPoles,
    #[error("denominator has repeated roots")]
    RepeatedPoles,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("network system matrix is singular at {eta} rad/s (condition {cond:e})")]
    SingularAtFrequency { eta: f64, cond: f64 },
    #[error("bound not applicable: lambda2/eta0 = {ratio} must exceed {threshold}")]
    NotApplicable { ratio: f64, threshold: f64 },
    #[error("trajectories have mismatched time grids")]
    GridMismatch,
    #[error("requested order {requested} exceeds the {available} significant weighted Hankel values")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("interpretation needs a reduced model of order 2 or 3 with relative degree one, got order {0}")]
    WrongOrder(usize),
    #[error("DC gains differ by {0:e} relative; rescale the reduced model first")]
    DcMismatch(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
