use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("closure exceeded the order cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("point {point} out of range for degree {degree}")]
    DegreeMismatch { point: usize, degree: usize },
    #[error("relation contains a cycle through element {0}")]
    CycleDetected(String),
    #[error("no infimum for the maximal elements above {0}")]
    NoInfimum(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("order relation not transitive: {0}")]
    TransitivityViolation(String),
    #[error("subset not upward closed: {0}")]
    NotUpwardClosed(String),
    #[error("map is not order preserving: {0}")]
    NotOrderPreserving(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    ChainDegree { expected: i32, found: i32 },
    #[error("unusable overgroup: {0}")]
    BadOvergroup(String),
    #[error("conclusion failed: {0}")]
    ConclusionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
