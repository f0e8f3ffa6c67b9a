use thiserror::Error;

/// Errors across the toolkit. `DecompositionViolation` is the one "finding"
/// variant: it means a structural claim failed empirically and callers should
/// surface the diagnostics rather than treat it as a usage error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quotient at index {0} is zero")]
    ZeroQuotient(usize),
    #[error("denominator must be >= 1")]
    NonPositiveDenominator,
    #[error("numerator must be >= 0")]
    NegativeNumerator,
    #[error("fraction {num}/{den} is not reduced")]
    NotReduced { num: String, den: String },
    #[error("expected a proper fraction 0 < num < den, got {num}/{den}")]
    NotProper { num: String, den: String },
    #[error("word has a vanishing intermediate denominator")]
    DegenerateWord,
    #[error("word must have positive quotients")]
    NonPositiveWord,
    #[error("word must be nonempty")]
    EmptyWord,
    #[error("{a} is not coprime to {q}")]
    NotCoprime { a: u64, q: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} must be an odd prime")]
    EvenPrime(u64),
    #[error("threshold t={t} exceeds sqrt(q) for q={q}")]
    ThresholdTooLarge { t: u64, q: u64 },
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("work budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("interval decomposition violation: {0}")]
    DecompositionViolation(String),
    #[error("fold step requires X >= 1")]
    FoldBadX,
    #[error("fold step requires the last entry >= 2")]
    FoldBadBoundary,
    #[error("no bounded-quotient word found for {base}^{exponent}")]
    FoldNoWitness { base: u64, exponent: u32 },
    #[error("cache file corrupt: {0}")]
    CacheCorrupt(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit status the CLI maps this error to: findings are 2, the rest 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DecompositionViolation(_) => 2,
            _ => 1,
        }
    }
}
