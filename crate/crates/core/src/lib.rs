// SPDX-License-Identifier: Apache-2.0

//! Computational toolkit for sets of primes built from residue classes and
//! Frobenius conjugacy classes.
//!
//! The crate is organised bottom-up:
//!
//! * [`sieve`] enumerates primes and prime powers and answers `π(x)`, `ψ(x)`,
//!   `Li(x)` queries.
//! * [`characters`] builds the exact Dirichlet character group modulo `q`.
//! * [`lfunc`] evaluates Dirichlet L-functions on the critical line and
//!   isolates their nontrivial zeros.
//! * [`counting`] holds the exact progression counting functions and the
//!   coefficients `c_χ`, `κ`.
//! * [`primesets`] describes prime sets declaratively and counts them.
//! * [`frobenius`] classifies primes by Frobenius class for a small catalog of
//!   Galois extensions of ℚ.
//! * [`explicit`] assembles truncated explicit formulas and the logarithmic
//!   mean-square statistics.

pub mod arith;
pub mod characters;
pub mod counting;
pub mod error;
pub mod explicit;
pub mod frobenius;
pub mod lfunc;
pub mod primesets;
pub mod quad;
pub mod sieve;

pub use characters::{character_group, CharacterDescriptor, DirichletCharacter};
pub use error::{ChebError, Result};
pub use explicit::{Discrepancy, DiscrepancyModel, ModelOptions, Reference};
pub use frobenius::{ExtensionCatalogEntry, QuadraticField};
pub use lfunc::{ZeroDb, ZeroSet};
pub use primesets::PrimeSetSpec;
pub use sieve::PrimeTable;

pub use num_complex::Complex64;
pub use num_rational::Rational64;
