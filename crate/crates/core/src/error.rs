use thiserror::Error;

/// Errors raised by the frame engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    /// A point was requested outside `[0, 1]`.
    #[error("point {0} lies outside [0, 1]")]
    Domain(f64),

    /// Bad argument to an operation whose domain is not `[0, 1]` itself.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("refine target level {target} is below the grid level {level}")]
    RefineBelowLevel { level: u32, target: u32 },

    /// A level or term count exceeds what was built or what is supported.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid lambda schedule: {0}")]
    Schedule(String),

    #[error("index out of range: {0}")]
    Index(String),

    /// The caller's function returned NaN or an infinity at a queried point.
    #[error("function is not finite at x = {x} (value {value})")]
    NonFinite { x: f64, value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Scaling a paire requires every functional to be non-zero.
    #[error("functional A_{0} is zero; the scaled paire is undefined")]
    ZeroFunctional(usize),
}

pub type Result<T> = std::result::Result<T, FrameError>;
