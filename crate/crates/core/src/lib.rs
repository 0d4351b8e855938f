//! Divisibility and factorisation in topological commutative monoids.
//!
//! Products over countable index sets are evaluated as nets over finite
//! index subsets, with bounded certificates of convergence and re-checkable
//! divergence witnesses. On top of that sit bounded tests for atoms, primes
//! and topological primes, and the monoid `Z(H)` of exponent maps whose
//! atom-power products converge.

pub mod error;
pub mod factorisation;
pub mod instances;
pub mod monoid;
pub mod net;
mod text;

pub use error::{MonoidError, Result};
pub use monoid::{
    is_irreducible, is_prime_bounded, is_prime_witness, BoundedVerdict, Monoid, SearchBound,
    Verdict,
};
