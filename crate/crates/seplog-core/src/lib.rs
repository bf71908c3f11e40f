//! A mini translational separation-logic verifier.
//!
//! Three front-end languages — rational permissions, lazy field creation,
//! and immutable heaps — are encoded into a Viper-like intermediate
//! verification language (MiniIVL) and checked by an enumerative verifier
//! over bounded state spaces. A brute-force soundness lab validates the
//! algebraic and translation-level conditions that make such encodings
//! sound (homomorphism, backward satisfiability, monotonicity, semantics
//! preservation) and reproduces four classic unsound-encoding pitfalls.

pub mod algebra;
pub mod ivl;
pub mod scalar;

pub use scalar::{Rational, Scalar};
