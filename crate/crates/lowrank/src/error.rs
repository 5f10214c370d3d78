use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field of order {0} does not fit in 63 bits")]
    FieldTooLarge(String),
    #[error("no element of order >= {min_order} in a multiplicative group of order {group_order}")]
    OrderUnreachable { min_order: u128, group_order: u64 },
    #[error("generator order {have} is below the required {need}")]
    OrderTooSmall { have: u64, need: u64 },
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("elements come from incompatible fields")]
    FieldMismatch,
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("diagonal {k} out of range 0..={max}")]
    DiagonalOutOfRange { k: usize, max: usize },
    #[error("stride {stride} is smaller than axis length {len}")]
    StrideTooSmall { stride: usize, len: usize },
    #[error("coefficient {0} is not reduced modulo the characteristic")]
    CoefficientOutOfRange(u64),
    #[error("measurement {0} is not rank one")]
    NotRank1(usize),
    #[error("measurement system has full column rank, no nonzero solution")]
    NoNullspace,
    #[error("evaluation points are not distinct")]
    DuplicatePoints,
    #[error("syndrome is inconsistent with the sparsity promise")]
    InconsistentSyndrome,
    #[error("advice set of size {advice} exceeds budget {budget}")]
    AdviceTooLarge { advice: usize, budget: usize },
    #[error("rank promise violated on diagonal {k}: {detail}")]
    RankPromiseViolated { k: usize, detail: String },
    #[error("matrix is not (<{k})-upper-echelon at ({row}, {col})")]
    NotEchelon { k: usize, row: usize, col: usize },
    #[error("evaluations disagree with the determined coefficients")]
    InconsistentEvaluations,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("decoding failed: {0}")]
    DecodeFailure(String),
    #[error("enumeration of {0} items exceeds the configured cap")]
    TooLarge(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by inputs that break the low-rank or sparsity promise.
    pub fn is_promise_violation(&self) -> bool {
        matches!(
            self,
            Error::InconsistentSyndrome
                | Error::DecodeFailure(_)
                | Error::RankPromiseViolated { .. }
                | Error::InconsistentEvaluations
                | Error::AdviceTooLarge { .. }
        )
    }

    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::ShapeMismatch { expected: expected.to_string(), found: found.to_string() }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
