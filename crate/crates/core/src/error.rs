use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("malformed polytope: {0}")]
    MalformedPolytope(String),

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is unbounded")]
    UnboundedPolytope,

    #[error("interpolation coefficient {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("parameter {value} outside [0, {max}]")]
    ParameterOutOfRange { value: f64, max: f64 },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("LP solver failed: {0}")]
    NumericalFailure(String),

    #[error("norm maximization over an infeasible region")]
    InfeasibleRegion,

    #[error("norm is unbounded over the region")]
    UnboundedNorm,

    #[error("degenerate pipe: {0}")]
    DegeneratePipes(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("oracle budget exceeded: {count} polylines (limit {limit})")]
    BudgetExceeded { count: u128, limit: u128 },

    #[error("oracle requires axis-aligned boxes: {0}")]
    NotABox(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error in {location}: {source}")]
    Validation {
        location: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid pipe: {0}")]
    InvalidPipe(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Validation { .. }
                | Error::InvalidPipe(_)
                | Error::DegeneratePipes(_)
                | Error::MalformedPolytope(_)
                | Error::EmptyPolytope
                | Error::UnboundedPolytope
                | Error::DimensionMismatch { .. }
                | Error::InvalidNorm(_)
                | Error::InvalidArgument(_)
                | Error::UnknownStrategy(_)
                | Error::NotABox(_)
                | Error::BudgetExceeded { .. }
                | Error::ParameterOutOfRange { .. }
                | Error::LambdaOutOfRange(_)
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalFailure(_) | Error::InfeasibleRegion | Error::UnboundedNorm)
    }
}
