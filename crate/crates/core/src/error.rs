use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix that must have full (or a specific) numerical rank does not.
    /// Carries the singular values that drove the decision.
    #[error("rank-deficient input (singular values {singular_values:?})")]
    RankDeficient { singular_values: Vec<f64> },

    /// A boundary-condition spec violates a construction invariant.
    #[error("invalid extension spec: {0}")]
    InvalidSpec(String),

    /// A run configuration field is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The adaptive integrator could not maintain the error tolerance.
    #[error("step size underflow at x = {x} (h = {h})")]
    StepSizeUnderflow { x: f64, h: f64 },

    /// The integration produced a NaN or infinity.
    #[error("non-finite value encountered at x = {x}")]
    NonFiniteValue { x: f64 },

    /// A requested abscissa is not a grid node.
    #[error("x = {0} is not a node of the grid")]
    NodeMissing(f64),

    /// An operation requiring a symmetric grid received an asymmetric one.
    #[error("grid is not symmetric about 0")]
    AsymmetricGrid,

    /// An operation requiring uniform node spacing received a non-uniform grid.
    #[error("grid nodes are not uniformly spaced")]
    NonUniformGrid,

    /// Root refinement was called on an interval without a sign change.
    #[error("no root bracketed in [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    /// An iterative solver hit its iteration cap.
    #[error("iteration limit reached ({0} iterations)")]
    MaxIterations(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
