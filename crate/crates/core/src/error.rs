use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // graphs and points
    #[error("vertex set is empty")]
    EmptyVertexSet,
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{0}` has no incoming edge")]
    MissingInEdge(String),
    #[error("vertex `{0}` has no outgoing edge")]
    MissingOutEdge(String),
    #[error("graph is a single cycle")]
    IsPureCycle,
    #[error("graph is not topologically transitive")]
    NotTransitive,
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    #[error("bracket requires x_0 = y_0")]
    MismatchedZero,

    // potentials and measures
    #[error("memory too short: need cylinders of length {needed}, got {got}")]
    MemoryTooShort { needed: usize, got: usize },
    #[error("invalid memory window ({0}, {1})")]
    InvalidWindow(i64, i64),
    #[error("missing table entry for window {0}")]
    MissingTableEntry(String),
    #[error("potential is not one-sided (window starts at {0})")]
    NotOneSided(i64),
    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("cylinder incompatible with local manifold: {0}")]
    IncompatibleCylinder(String),

    // suspensions
    #[error("roof must be strictly positive, found {0}")]
    NonPositiveRoof(f64),
    #[error("interval [{lo}, {hi}) exceeds the roof minimum {roof} on the cylinder")]
    IntervalAboveRoof { lo: f64, hi: f64, roof: f64 },
    #[error("roof is not constant")]
    RoofNotConstant,
    #[error("roof is not identically 1")]
    RoofNotOne,
    #[error("height {height} outside [0, {roof})")]
    HeightOutOfRange { height: f64, roof: f64 },

    // cocycles
    #[error("invalid anchors: {0}")]
    InvalidAnchors(String),
    #[error("broken su-chain: {0}")]
    BrokenChain(String),
    #[error("no evidence supplied")]
    EmptyEvidence,

    // partitions and d-bar
    #[error("partitions have {0} and {1} atoms")]
    AtomCountMismatch(usize, usize),
    #[error("partition sequences have mismatched shapes: {0}")]
    ShapeMismatch(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("delta {delta} must lie in (0, min(1, inf r = {inf_roof}))")]
    DeltaTooLarge { delta: f64, inf_roof: f64 },
    #[error("resolution exceeded: {0}")]
    ResolutionExceeded(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    // configuration
    #[error("parse error at {path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("validation error at {field}: {reason}")]
    Validation { field: String, reason: String },
}

impl Error {
    /// Configuration problems map to exit code 2, everything else to 3.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Validation { .. })
    }
}
