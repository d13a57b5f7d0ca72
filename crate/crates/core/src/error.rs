use thiserror::Error;

/// Errors surfaced by library operations.
///
/// Counting and convolution stay in exact integer arithmetic, so anything
/// that would silently lose exactness (overflow, oversized work arrays,
/// malformed caches) is reported instead of approximated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("range bound X must be at least 1")]
    EmptyRange,

    #[error("n = 0 has no digit class; the classes partition the positive integers")]
    ZeroNotClassified,

    #[error("t = {t} outside the supported range 1..={max} for the exact digit sum")]
    IdentitySumRange { t: u32, max: u32 },

    #[error("{base}^{exp} does not fit in 128 bits; reduce P or n")]
    PowerOverflow { base: u64, exp: u32 },

    #[error("a = {a} and q = {q} must be coprime")]
    NotCoprime { a: i64, q: u64 },

    #[error("input must be finite (and tau at least 1)")]
    NonFinite,

    #[error(
        "coefficient overflow at index {index}: value exceeds signed 128-bit range \
         (big-integer mode would be required)"
    )]
    CoefficientOverflow { index: usize },

    #[error("resource limit: {what} = {requested} exceeds cap {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("empty window")]
    EmptyWindow,

    #[error("pattern length {len} does not match k = {k}")]
    PatternLength { len: usize, k: usize },

    #[error("value caps differ: {left} vs {right}")]
    CapMismatch { left: u64, right: u64 },

    #[error("empty report")]
    EmptyReport,

    #[error("bad coefficient cache: {reason}")]
    BadCache { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
