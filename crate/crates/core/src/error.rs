use thiserror::Error;

/// Errors produced by the tent-tile library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {0} is outside the special Pisot registry (-5..=5)")]
    IndexOutOfRange(i32),

    #[error("alpha_0 = 2 is not a unit and has no tent-tile")]
    NoTentTile,

    #[error("field elements live in different fields (alpha_{0} and alpha_{1})")]
    FieldMismatch(i32, i32),

    #[error("inverse of zero requested")]
    ZeroInverse,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("rendering needs about {needed:.3e} points, budget is {budget}")]
    PointBudget { needed: f64, budget: usize },

    #[error("{family} is not defined for parameter {value}")]
    FamilyParameter { family: &'static str, value: usize },

    #[error("letter {letter} is outside the alphabet of size {size}")]
    InvalidLetter { letter: usize, size: usize },

    #[error("quotient map condition fails for alpha_{0}")]
    QuotientMapCondition(i32),

    #[error("comparison still undecided at {0} bits")]
    Undecided(u32),

    #[error("no lattice tiling is known for alpha_{0}")]
    UnknownTiling(i32),

    #[error("eigenvector check failed: {0}")]
    EigenvectorCheck(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("mu = {mu:.6} is not below lambda_0 = {lambda0:.6}")]
    NoTilingProperty { mu: f64, lambda0: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
