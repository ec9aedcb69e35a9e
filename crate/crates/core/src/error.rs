use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("algebra dimension {dim} exceeds the configured cap {cap}")]
    ResourceLimit { dim: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("antisymmetry violated: c({i},{j}) != -c({j},{i})")]
    AntisymmetryViolation { i: usize, j: usize },

    #[error("Jacobi identity violated on basis triple ({i}, {j}, {k})")]
    JacobiViolation { i: usize, j: usize, k: usize },

    #[error("grading violated: [e{i}, e{j}] has a component on e{k} outside layer {expected_layer}")]
    GradingViolation {
        i: usize,
        j: usize,
        k: usize,
        expected_layer: usize,
    },

    #[error("not stratified: [V1, V{layer}] does not span V{}", layer + 1)]
    NotStratified { layer: usize },

    #[error("derivation does not extend consistently: Leibniz rule fails on ({i}, {j})")]
    InconsistentDerivation { i: usize, j: usize },

    #[error("linear map is not a Lie algebra homomorphism on basis pair ({i}, {j})")]
    NotHomomorphism { i: usize, j: usize },

    #[error("covector must be nonzero")]
    ZeroCovector,

    #[error("wedge degree {degree} exceeds the rank {rank}")]
    DegreeTooHigh { degree: usize, rank: usize },

    #[error("strata are defined only for even rank (got {0})")]
    OddRank(usize),

    #[error("point is not abnormal")]
    NotAbnormal,

    #[error("sample is not in the principal stratum Y")]
    SampleNotInY,

    #[error("ad is not nilpotent on the prolongation; Ad is not a finite series")]
    NonNilpotentProlongation,

    #[error("skew matrix is identically zero")]
    ZeroMatrix,

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("parse error: {0}")]
    Parse(String),
}
