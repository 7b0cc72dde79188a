use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial degree {degree} exceeds the basis maximum {max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("Gauss rule size {0} outside the supported range 1..=32")]
    RuleSize(usize),

    #[error("interpolatory rule with {0} nodes is not supported (at most 12)")]
    TooManyNodes(usize),

    #[error("quadrature nodes must be distinct (node {0} is repeated)")]
    DuplicateNodes(f64),

    #[error("quadrature node {0} lies outside [0, 1]")]
    NodeOutOfRange(f64),

    #[error("empty node list")]
    EmptyRule,

    #[error("order parameter m must be at least 1")]
    InvalidOrder,

    #[error("the sigma rule has {nodes} nodes but m = {m} needs at least m")]
    SigmaRuleTooSmall { nodes: usize, m: usize },

    #[error("invalid step size {0}")]
    InvalidStep(f64),

    #[error("state {state:?} lies outside the domain of {system}; try a smaller step size")]
    Domain { system: String, state: Vec<f64> },

    #[error("state has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}
