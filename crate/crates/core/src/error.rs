use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("empty cycle")]
    Empty,
    #[error("entry {0} exceeds the supported magnitude")]
    EntryOutOfRange(i64),
    #[error("not a cusp type: {0}")]
    NotCuspType(String),
    #[error("cannot parse cycle {0:?}: expected e.g. \"[3,2,2]\"")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("position {pos} out of range for a cycle of length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("memo table reached its limit of {0} entries; raise --memo-limit")]
    MemoLimit(usize),
    #[error("oracle budget exceeded: {budget} > {cap}")]
    OracleBudget { budget: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("unknown base configuration {0:?}")]
    UnknownBase(String),
    #[error("blow-up position {pos} out of range for {len} components")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("invalid anti-canonical pair: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{0} is inconsistent with half-Inoue classification: the type is not self-dual")]
    NotSelfDual(String),
}
