use thiserror::Error;

/// Errors raised while building or evaluating instances.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("relation is not a pre-order: {reason} at ({x}, {y}, {z})")]
    NotAPreorder {
        reason: &'static str,
        x: usize,
        y: usize,
        z: usize,
    },
    #[error("semi-decomposition axiom violated ({axiom}) at ({x}, {y})")]
    AxiomViolation { axiom: &'static str, x: usize, y: usize },
    #[error("point {point} out of range for a space with {n} points")]
    PointOutOfRange { point: usize, n: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("product of {points} points exceeds the bound {bound}")]
    SizeOverflow { points: usize, bound: usize },
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("empty point set")]
    EmptySet,
    #[error("scale {0} is not in the ladder")]
    ScaleNotInLadder(f64),
    #[error("invalid metric sample: {0}")]
    InvalidMetric(String),
    #[error("generator {generator} maps point {point} off the sample (snap distance {distance} > tolerance)")]
    SnapExceeded {
        point: usize,
        generator: usize,
        distance: f64,
    },
    #[error("empty generator set")]
    EmptyGeneratorSet,
    #[error("generator {0} is not a bijection")]
    NotInvertible(usize),
    #[error("transformation semigroup has more than {0} elements")]
    SemigroupTooLarge(usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("internal disagreement between independent checkers: {0}")]
    InternalDisagreement(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("unknown formula '{0}'")]
    UnknownFormula(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
