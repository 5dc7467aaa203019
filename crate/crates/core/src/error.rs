use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TangenciaError {
    #[error("invalid circle: {0}")]
    InvalidCircle(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("minimizer did not converge: {0}")]
    NotConverged(String),
    #[error("scale order violated: delta {delta} > t {t}")]
    ScaleOrder { delta: f64, t: f64 },
    #[error("scale mismatch between rectangles")]
    ScaleMismatch,
    #[error("Apollonius-degenerate: {0}")]
    ApolloniusDegenerate(String),
    #[error("first condition violated: gradient norm {0:e}")]
    FirstConditionViolated(f64),
    #[error("inside exclusion ball: d = {d} <= {limit}")]
    InsideExclusion { d: f64, limit: f64 },
    #[error("infeasible pair: {0}")]
    InfeasiblePair(String),
    #[error("invalid bipartite pair: {0}")]
    InvalidPair(String),
    #[error("bisection failed: {0}")]
    BisectionFailed(String),
    #[error("generation infeasible: {0}")]
    GenerationInfeasible(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl TangenciaError {
    /// True for errors caused by numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            TangenciaError::NotConverged(_)
                | TangenciaError::BisectionFailed(_)
                | TangenciaError::DegenerateFit(_)
                | TangenciaError::GenerationInfeasible(_)
        )
    }
}

impl From<std::io::Error> for TangenciaError {
    fn from(e: std::io::Error) -> Self {
        TangenciaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, TangenciaError>;
