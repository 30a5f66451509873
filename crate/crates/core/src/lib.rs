//! Exact constructions for algebraic-geometry codes on `P^r` and `(P^1)^r`
//! over finite fields.
//!
//! Everything here is exact: finite-field elements are coefficient vectors
//! over GF(p), polynomials are sparse maps with graded-lex term order, and
//! local expansions are truncated power series with explicit truncation
//! orders. No floating point, no probabilistic identity testing.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf`] - finite fields GF(p^m), subfield traces, extension embeddings
//! * [`poly`] - multivariate polynomials, rational functions, truncated
//!   series, and an expression parser
//! * [`geom`] - projective varieties, divisors, charts, local frames, and
//!   certified intersection schemes
//! * [`residue`] - parametric representations and residue symbols of
//!   differential forms at intersection points
//! * [`rectify`] - rectifying functions: verification, local construction,
//!   and CRT-style gluing
//! * [`codes`] - linear codes from function spaces and residue maps, duality
//!   checks, and product-code verification

pub mod codes;
pub mod error;
pub mod geom;
pub mod gf;
pub mod linalg;
pub mod poly;
pub mod rectify;
pub mod residue;

pub use error::{Error, Result};
