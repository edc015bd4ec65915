//! Error type shared by every module of the crate.

use thiserror::Error;

/// Every failure mode of the library.
///
/// Variants fall into three families: malformed input (bad field strings,
/// mismatched fields, violated preconditions), honest negative answers that
/// cannot be expressed as a value (for example a pole lying outside the
/// working field), and internal inconsistencies, which fire only when a
/// proven identity fails and therefore signal a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // ---- fields -------------------------------------------------------
    #[error("{0} is not a prime")]
    NonPrime(u64),
    #[error("modulus is not monic of the stated degree")]
    NonMonicModulus,
    #[error("modulus is reducible over F_p")]
    ReducibleModulus,
    #[error("malformed field spec: {0}")]
    MalformedSpec(String),
    #[error("division by zero")]
    DivideByZero,
    #[error("operands live in different fields")]
    SpecMismatch,
    #[error("field or search space too large: {size} exceeds bound {bound}")]
    FieldTooLarge { size: u64, bound: u64 },
    #[error("field too small: {0}")]
    FieldTooSmall(String),

    // ---- polynomials --------------------------------------------------
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("degree too small for this operation")]
    DegreeTooSmall,
    #[error("CRT moduli are not pairwise coprime")]
    ModuliNotCoprime,
    #[error("inexact polynomial division: {0}")]
    InexactDivision(String),

    // ---- Moore determinants --------------------------------------------
    #[error("tuple too small (need at least {0} entries)")]
    TupleTooSmall(usize),
    #[error("tuple too large (at most {0} entries)")]
    TupleTooLarge(usize),
    #[error("epsilon vector is zero")]
    ZeroEpsilon,
    #[error("basis is F_p-dependent")]
    DependentBasis,
    #[error("tuple has vanishing Moore determinant")]
    SingularTuple,

    // ---- differential forms --------------------------------------------
    #[error("pole of order > 1 at {0}")]
    NonSimplePole(String),
    #[error("denominator does not split over the working field")]
    PoleOutsideField,
    #[error("the zero form has no logarithmic structure")]
    ZeroForm,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    // ---- spaces ---------------------------------------------------------
    #[error("leading coefficients of the prompt are F_p-dependent")]
    DependentLeadingCoeffs,
    #[error("criterion polynomial is not constant")]
    NotConstantCriterion,
    #[error("criterion polynomial is zero")]
    ZeroCriterion,
    #[error("prompt does not verify: {0}")]
    NotVerified(String),
    #[error("poles do not split over the working field (try extension degree {suggested_degree})")]
    PolesOutsideField { suggested_degree: u32 },
    #[error("Moore determinant has a repeated root")]
    NonSimpleRoot,
    #[error("audit `{item}` failed: expected {expected}, got {actual}")]
    AuditFailure {
        item: String,
        expected: String,
        actual: String,
    },
    #[error("matrix is singular mod p")]
    SingularMatrix,
    #[error("S' is not a nonzero constant")]
    NonEtaleS,
    #[error("required root does not exist in the working field: {0}")]
    RequiresExtension(String),
    #[error("tuple is F_p-dependent")]
    DependentTuple,

    // ---- characteristic 2 -------------------------------------------------
    #[error("operation requires characteristic {0}")]
    WrongCharacteristic(u32),
    #[error("polynomials are not coprime")]
    NotCoprime,
    #[error("degree drops in an F_2-combination")]
    DegreeDrop,
    #[error("invalid W-tuple: {0}")]
    InvalidWTuple(String),
    #[error("congruence system has no solution")]
    CongruenceInsolvable,
    #[error("U_i is not a polynomial")]
    NonPolynomialU,

    // ---- classification toolkit ----------------------------------------
    #[error("pencil member does not split over the working field")]
    NonSplitPencil,
    #[error("pencil member has a repeated root")]
    RepeatedRoot,
    #[error("precondition violated: {0}")]
    PrecondViolation(String),
    #[error("not enough interpolation nodes in the working field")]
    InterpolationShortfall,
    #[error("search space of {size} candidates exceeds bound {bound}")]
    SearchSpaceTooLarge { size: u64, bound: u64 },

    // ---- generic ---------------------------------------------------------
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// True when the error means a proven identity failed, i.e. a bug rather
    /// than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InternalInconsistency(_)
                | Error::AuditFailure { .. }
                | Error::NonPolynomialU
                | Error::CongruenceInsolvable
        )
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::InternalInconsistency(msg.into())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
