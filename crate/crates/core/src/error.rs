use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has {found} entries, expected {expected}")]
    EntryCount { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid subsystem shape: {0}")]
    InvalidShape(String),

    #[error("{perm:?} is not a permutation of {count} subsystems")]
    InvalidPermutation { perm: Vec<usize>, count: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("partial trace must keep at least one subsystem")]
    EmptyKeepSet,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("local dimension must be at least 2, got {0}")]
    InvalidLocalDimension(usize),

    #[error("parameter {name} = {value} is invalid: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("mixing weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },

    #[error("total dimension {total} exceeds the cap of {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("cannot embed dimension {source_dim} into smaller dimension {target}")]
    EmbedTooSmall { source_dim: usize, target: usize },

    #[error("state has zero trace after projection")]
    ZeroTrace,

    #[error("state is not of Werner form (deviation {deviation:e})")]
    NotWerner { deviation: f64 },

    #[error("trace pairing left an imaginary residue of {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("Ky Fan order {k} out of range 1..={max}")]
    KyFanOrder { k: usize, max: usize },

    #[error("state is not pure (purity {purity})")]
    MixedState { purity: f64 },

    #[error("generator basis is invalid: {0}")]
    InvalidBasis(String),

    #[error("margin does not change sign on [{lo}, {hi}] (margins {margin_lo:e}, {margin_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        margin_lo: f64,
        margin_hi: f64,
    },

    #[error("unknown state family `{0}`")]
    UnknownFamily(String),

    #[error("family `{0}` does not produce a tripartite state with equal local dimensions")]
    NotTripartite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
