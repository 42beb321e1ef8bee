use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// The variants split into two families: mathematical failures (degenerate
/// weights, unsupported genus, ...) and input failures (malformed JSON,
/// unknown names, invalid spaces). [`GwError::is_input_error`] tells them
/// apart; the CLI maps them onto different exit codes.
#[derive(Debug, Error)]
pub enum GwError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("nilpotent expansion at zero weight")]
    ZeroWeightExpansion,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("inverse requires a numerator that splits into linear forms")]
    NonLinearInverse,

    #[error("unknown fixed point '{0}'")]
    UnknownPoint(String),

    #[error("unknown sphere '{0}'")]
    UnknownSphere(String),

    #[error("unknown class '{0}'")]
    UnknownClass(String),

    #[error("connection required for sphere '{sphere}': {reason}")]
    ConnectionRequired { sphere: String, reason: String },

    #[error("degenerate weight in edge factor: x = {x}, y = {y}, k = {k}")]
    DegenerateWeight { x: String, y: String, k: i64 },

    #[error("in graph {graph}: {source}")]
    InGraph {
        graph: String,
        #[source]
        source: Box<GwError>,
    },

    #[error("genus {0} unsupported (only genus 0 and 1 are implemented)")]
    UnsupportedGenus(u32),

    #[error("unstable zero-class request: g = {genus}, n = {markings}")]
    UnstableZeroClass { genus: u32, markings: usize },

    #[error("only the fundamental boundary class is supported")]
    UnsupportedBoundary,

    #[error("unreduceable genus-1 pattern: psi = {psi:?}, lambda = {lambda}")]
    Unreduceable { psi: Vec<u32>, lambda: u32 },

    #[error("localization sum not in R: {0}")]
    NotInR(String),

    #[error("equivariant quantity of positive degree {0} has no non-equivariant value")]
    PositiveDegree(i64),

    #[error("singular Poincare pairing on the chosen basis")]
    SingularPairing,

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported check: {0}")]
    UnsupportedCheck(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GwError {
    /// True for errors caused by malformed or inconsistent input rather
    /// than by the mathematics of a well-posed request.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            GwError::UnknownPoint(_)
                | GwError::UnknownSphere(_)
                | GwError::UnknownClass(_)
                | GwError::InvalidSpace(_)
                | GwError::Schema(_)
                | GwError::Parse(_)
                | GwError::UnsupportedCheck(_)
                | GwError::Io(_)
                | GwError::Json(_)
                | GwError::LengthMismatch { .. }
        )
    }

    pub(crate) fn in_graph(self, graph: impl Into<String>) -> GwError {
        match self {
            e @ GwError::InGraph { .. } => e,
            e => GwError::InGraph {
                graph: graph.into(),
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, GwError>;
