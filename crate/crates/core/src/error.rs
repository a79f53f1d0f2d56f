use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),

    #[error("unknown edge id {0:?}")]
    UnknownEdge(String),

    #[error("missing value for edge {0:?}")]
    MissingEdgeValue(String),

    #[error("edge {0:?} belongs to the spanning tree")]
    EdgeInTree(String),

    #[error("edge set is not a spanning tree: {0}")]
    NotSpanningTree(String),

    #[error("spanning tree is not directed toward the cemetery")]
    TreeNotDirected,

    #[error("nonpositive weight {value} on edge {edge:?}")]
    NonPositiveWeight { edge: String, value: f64 },

    #[error("negative real part of lambda on edge {0:?}")]
    NegativeLambda(String),

    #[error("environment is invalid: {0}")]
    InvalidEnvironment(String),

    #[error("I - P_U is singular")]
    SingularGreenFunction,

    #[error("walk exceeded {0} steps without reaching the cemetery")]
    IterationCap(u64),

    #[error("no samples requested")]
    NoSamples,

    #[error("every importance weight vanished; the proposal misses the domain")]
    AllWeightsZero,

    #[error("invalid proposal: {0}")]
    InvalidProposal(String),

    #[error("integration dimension {dim} exceeds the quadrature limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("quadrature did not converge: estimate {value} with error {error} > tolerance {tol}")]
    NonConvergence { value: f64, error: f64, tol: f64 },

    #[error("log C_alpha = {0} is outside the representable range")]
    Overflow(f64),

    #[error("lambda lies on ker l_C for cycle {0}")]
    ExcludedLocus(String),

    #[error("transport step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
