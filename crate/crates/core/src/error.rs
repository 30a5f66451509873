//! One error type for the whole crate.
//!
//! Variants split into three families the caller can act on: input errors
//! (bad expressions, wrong field, malformed divisors), mathematical
//! precondition failures (pole at an expansion point, uncertified
//! intersection, no admissible chart), and `Internal`, which marks a violated
//! postcondition and always indicates a bug rather than bad input.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus {modulus} is reducible: divisible by {factor}")]
    ReducibleModulus { modulus: String, factor: String },

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("element does not lie in the requested subfield")]
    NotInSubfield,

    #[error("extension field GF({p}^{degree}) is too large to search")]
    ExtensionTooLarge { p: u64, degree: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("the zero function has no divisor")]
    ZeroFunction,

    #[error("series inversion needs a unit (nonzero constant term)")]
    NotAUnit,

    #[error("variable count mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("{what} is not regular at {at}")]
    NotRegular { what: String, at: String },

    #[error("polynomial is not homogeneous of a single (multi)degree")]
    NotHomogeneous,

    #[error("expected a nonconstant defining polynomial")]
    ConstantPolynomial,

    #[error("objects live on different varieties")]
    VarietyMismatch,

    #[error("all coordinates of a block are zero")]
    ZeroPoint,

    #[error("point lies outside the chart")]
    OutsideChart,

    #[error("no linear form over the base field avoids all given points")]
    NoChart,

    #[error("expected {expected} divisors, got {got}")]
    WrongDivisorCount { expected: usize, got: usize },

    #[error("divisor must be effective")]
    NotEffective,

    #[error("divisors share a positive-dimensional component")]
    ImproperIntersection,

    #[error("multiplicity sum {found} exceeds the Bezout number {bezout}")]
    BezoutExceeded { found: u64, bezout: u64 },

    #[error("local multiplicity did not stabilise below truncation order {n_max}")]
    MultiplicityUnstable { n_max: usize },

    #[error("intersection scheme is not certified (points may be missing beyond degree {e_max})")]
    Uncertified { e_max: usize },

    #[error("point is not on the common intersection")]
    NotOnIntersection,

    #[error("no parametric representation with exponent <= {a_max} and degree <= {d_max}")]
    NoParamRepresentation { a_max: u32, d_max: u32 },

    #[error("intersection contains a non-rational point outside the evaluation set")]
    NonRationalPoint,

    #[error("function is not rectifying: {0}")]
    NotRectifying(String),

    #[error("support of the divisor meets the evaluation points")]
    SupportMeetsPoints,

    #[error("bad evaluation point set: {0}")]
    BadPointSet(String),

    #[error("search for {what} exhausted after {trials} trials")]
    SearchExhausted { what: String, trials: usize },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
