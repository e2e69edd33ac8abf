use alloc::string::String;

/// Errors raised by the dynamics, tau, operator and wave routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("particles {i} and {j} violate the gap condition: x_i - x_j = {gap}")]
    Collision { i: usize, j: usize, gap: f64 },

    #[error("velocity of particle {index} vanishes ({value})")]
    ZeroVelocity { index: usize, value: f64 },

    #[error("rapidity argument of particle {index} is {value}; it must be positive")]
    NonpositiveRapidityArgument { index: usize, value: f64 },

    #[error("adaptive step {step} fell below the minimum at flow time {time}")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("tau has non-real roots (largest imaginary part {max_imag})")]
    ComplexRootsEncountered { max_imag: f64 },

    #[error("eigenvalue {index} is ill-conditioned (condition number {condition})")]
    DegenerateEigenvalue { index: usize, condition: f64 },

    #[error("|z| = {z} does not exceed the spectral radius {radius}")]
    SpectralRadiusViolation { z: f64, radius: f64 },

    #[error("zI + Y0 is numerically singular at z = {z}")]
    SingularShiftMatrix { z: f64 },

    #[error("tau({n}; t) = {value} vanishes")]
    TauZeroDenominator { n: i64, value: f64 },

    #[error("series extraction is ill-conditioned (condition estimate {condition})")]
    IllConditionedExtraction { condition: f64 },

    #[error("coefficient of order {order} requested below the trusted order {floor}")]
    TruncationExhausted { order: i32, floor: i32 },

    #[error("sample point n = {n} lies outside the evaluation window")]
    WindowExhausted { n: i64 },

    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
