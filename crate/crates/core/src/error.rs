use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("part count k must be at least 2, got {k}")]
    PartCount { k: usize },
    #[error("no cyclic {k}-partition of K_{n} exists: {reason}")]
    Divisibility {
        k: usize,
        n: usize,
        reason: &'static str,
    },
    #[error("defining sequence for n={n} must have length {expected}, got {got}")]
    Length {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("label {label} at index {index} is outside 0..{k}")]
    Alphabet {
        index: usize,
        label: usize,
        k: usize,
    },
    #[error("edge {{{u},{v}}} is a self-loop modulo {n}")]
    SelfLoop { u: usize, v: usize, n: usize },
    #[error("ordering is not a permutation of 0..{n}: {detail}")]
    NotAPermutation { n: usize, detail: String },
    #[error("size mismatch: partition has n={partition}, ordering has n={ordering}")]
    SizeMismatch { partition: usize, ordering: usize },
    #[error("bitonicity needs at least 3 vertices, got {n}")]
    TooSmall { n: usize },
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("{n} is not a valid blow-up size of base size {m} for k={k}")]
    BadMultiple { m: usize, n: usize, k: usize },
    #[error("missing free value for index {index}")]
    MissingFreeValue { index: usize },
    #[error("free value given for index {index}, which is not a multiple of {m} in 1..={half}")]
    SpuriousFreeValue { index: usize, m: usize, half: usize },
    #[error("target sequence is not a blow-up of the base (first mismatch at index {index})")]
    NotABlowUp { index: usize },
    #[error("base ordering is not a transitive orientation of the base partition")]
    BaseOrderRejected,
    #[error("brute-force oracle limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("sweep space of {size} sequences exceeds the limit {limit}")]
    SpaceTooLarge { size: u128, limit: u128 },
    #[error("sweep record inconsistency: {0}")]
    Inconsistent(String),
    #[error("n={n} must be {expected}")]
    Parity { n: usize, expected: &'static str },
    #[error("block {index} is rejected: {reason}")]
    BlockRejected { index: usize, reason: String },
    #[error("at most one fixed-point block is allowed")]
    MultipleFixedPoints,
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}
