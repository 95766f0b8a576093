//! Exact computations around Lagrangian subspaces of the third exterior power of a
//! six-dimensional space, their degeneracy strata, the double cover of the rank-2
//! symmetric cone, and the integral lattices attached to the associated period domain.
//!
//! Linear algebra is generic over any exact [`Field`]; the geometry is run over the
//! rationals ([`Q`]) with prime-field shadows ([`Fp`]) used as fast filters.

pub mod certificate;
pub mod double_cover;
pub mod exterior;
pub mod field;
pub mod form;
pub mod lattices;
pub mod linalg;
pub mod monomial;
pub mod poly;
pub mod random;
pub mod strata;

pub use field::{ExactSqrt, Field, Fp, ReduceMod, PRIME_A, PRIME_B};
pub use form::SymForm;
pub use linalg::{Matrix, Subspace};
pub use poly::Poly;

use num_rational::BigRational;

/// Exact rational scalar.
pub type Q = BigRational;
/// Rational matrix.
pub type QMatrix = Matrix<Q>;
/// Rational subspace in canonical echelon form.
pub type QSubspace = Subspace<Q>;
/// Matrix over the first working prime.
pub type FpMatrix = Matrix<Fp<PRIME_A>>;
