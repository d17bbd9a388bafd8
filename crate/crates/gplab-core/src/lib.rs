//! Exact-arithmetic laboratory for generalised polynomials (polynomial
//! expressions closed under floor and fractional part), bracket-indexed
//! generalised monomials, the associated x k maps on the torus, graded
//! triangular matrix groups, degree-bounded vanishing ideals, semialgebraic
//! membership, and a desk-scale experiment harness for orbit and multiplier
//! searches.
//!
//! Everything is computed over exact scalars (rationals and constructed
//! reals); floating point never enters a correctness-critical path.

pub mod error;
pub mod brackets;
pub mod genpoly;
pub mod lie;
pub mod mpoly;
pub mod orbits;
pub mod scalar;
pub mod semialg;
pub mod timesk;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, DEFAULT_MAX_BITS};
