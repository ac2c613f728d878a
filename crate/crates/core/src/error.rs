use thiserror::Error;

/// Errors signaled by the library. Precondition violations that the caller
/// can always avoid (e.g. an unreduced flux) are reported here rather than
/// panicking, so the CLI can turn them into usage errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator must be positive, got {0}")]
    ZeroDenominator(i64),

    #[error("flux {p}/{q} lies outside [0, 1]")]
    FluxOutOfRange { p: i64, q: i64 },

    #[error("flux numerator and denominator share a factor: gcd({p}, {q}) = {g}")]
    NotReduced { p: i64, q: i64, g: i64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix asymmetry {asym:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("eigenvalue iteration failed to converge at index {0}")]
    NoConvergence(usize),

    #[error("gap index {j} out of range 0..={q}")]
    GapIndexOutOfRange { j: i64, q: i64 },

    #[error("q_max {q_max} exceeds the resource cap {cap}")]
    QMaxTooLarge { q_max: i64, cap: i64 },

    #[error("totient is undefined for n = 0")]
    TotientOfZero,

    #[error("asymptotic ratio is undefined for k = 0")]
    RatioOfZero,

    #[error("label k = {k} is not realizable at denominator q = {q}")]
    LabelNotRealizable { k: i64, q: i64 },

    #[error("atlas q_max = {q_max} is too small; need at least {needed}")]
    InsufficientQMax { q_max: i64, needed: i64 },

    #[error("labels {k} and {kprime} lie in the same coset mod q = {q}")]
    SameCoset { k: i64, kprime: i64, q: i64 },

    #[error("box-counting needs at least 3 resolutions, got {0}")]
    TooFewResolutions(usize),

    #[error("invalid render config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
