use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested mixed partial exceeds the configured derivative depth.
    #[error("derivative order {requested} exceeds the configured maximum {max}")]
    OrderOverflow { requested: usize, max: usize },

    /// A derivative pipeline needs more depth than the engine allows.
    #[error("operation needs derivative depth {needed} but the engine is capped at {max}")]
    DepthExceeded { needed: usize, max: usize },

    /// Evaluation outside the metric's chart, too close to its boundary, or
    /// at a point where the defining functions are not finite.
    #[error("evaluation outside the admissible domain: {0}")]
    Domain(String),

    /// The fundamental tensor failed to invert.
    #[error("singular fundamental tensor at the evaluation point")]
    SingularMetric,

    /// The fundamental tensor is not positive-definite, i.e. the point lies
    /// outside the strong-convexity cone of the metric.
    #[error("fundamental tensor is not positive-definite: {0}")]
    NotPositiveDefinite(String),

    /// Flagpole and transverse edge are (numerically) collinear.
    #[error("degenerate flag: transverse vector is parallel to the flagpole")]
    DegenerateFlag,

    /// The Legendre fixed-point iteration for the gradient did not converge.
    #[error("gradient fixed point did not converge after {0} iterations")]
    NonConvergence(usize),

    /// 1-D Schwarzian requested at a critical point of the function.
    #[error("schwarzian derivative undefined: |g'| = {0:.3e} below 1e-12")]
    CriticalPoint(f64),

    /// A geodesic left the chart before reaching the requested length.
    #[error("trajectory left the chart at arc length {0:.6}")]
    ChartExit(f64),

    /// The integrator produced a non-finite state.
    #[error("integration step failed at arc length {0:.6}")]
    StepFailure(f64),

    /// Bad construction parameters (catalog, config file, CLI arguments).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Expression-grammar syntax error.
    #[error("expression parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
