//! Exact-arithmetic solvers and checkers for the third Aczél–Jabotinsky
//! formal differential equation `(H ∘ Φ)(x) = Φ'(x) · H(x)` in rings of
//! truncated formal power series over fields of characteristic zero.
//!
//! The crate is organised around a handful of layers:
//!
//! * [`scalars`] — exact coefficient algebras: big rationals, sparse
//!   polynomials over ℚ, and cyclotomic fields ℚ(ζ_m);
//! * [`comb`] — enumeration of the multinomial index families that drive
//!   the substitution law and all solution recurrences;
//! * [`series`] — the ring of s-truncated series and the substitution
//!   groups Γ^s and Γ^s_1, generic over any scalar algebra;
//! * [`aj`] — residuals, coefficient systems, normal forms and the
//!   solution-family constructors;
//! * [`groups`] — the abstract parameter groups and structural probes;
//! * [`flows`] — one-parameter iteration groups and the translation
//!   equation checker;
//! * [`jobs`] — the JSON job layer shared by the CLI and the C ABI.

pub mod aj;
pub mod comb;
pub mod flows;
pub mod groups;
pub mod jobs;
pub mod scalars;
pub mod series;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("truncation mismatch")]
    TruncationMismatch,
    #[error("substitution requires ord(g) >= 1")]
    OrderViolation,
    #[error("constant term is not invertible")]
    NonInvertibleConstant,
    #[error("linear coefficient is not invertible")]
    NonInvertibleLinear,
    #[error("leading coefficient is not invertible")]
    NonInvertibleLeading,
    #[error("the zero series has no generator data")]
    ZeroSeries,
    #[error("series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("projection target {target} exceeds current precision {current}")]
    ProjectionRange { target: usize, current: usize },
    #[error("the active field has no primitive {0}-th root of unity")]
    NoPrimitiveRoot(u32),
    #[error("c1 must be an l-th root of unity (l = {0})")]
    C1NotRootOfUnity(u32),
    #[error("c1 must be nonzero")]
    ZeroC1,
    #[error("delta must be zero when s <= 2l")]
    DeltaMustVanish,
    #[error("the direct recurrence does not close for l >= 2 with s >= 2l+1; use the normal-form path")]
    RecurrenceOutOfRange,
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("series does not solve the equation")]
    NotASolution,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
