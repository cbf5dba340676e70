//! Exact K-theory of lens spaces and the arithmetic around it.
//!
//! The ring `K^0(L^n(p^k)) = Z[x] / <1 - x^(p^k), (x - 1)^n>` is handled in the
//! variable `y = x - 1`, where it becomes `Z[y] / <y^n, (y + 1)^(p^k) - 1>`
//! and the ideal is an integer lattice with a canonical Hermite basis.
//! Every decision the crate makes is returned as a [`Certificate`] that the
//! self-contained [`checker`] can re-validate.

pub mod cert;
pub mod checker;
pub mod elschain;
pub mod error;
pub mod genus;
pub mod lattice;
pub mod lensring;
pub mod membership;
pub mod padic;
pub mod poly;
pub mod ringcert;
pub mod scalar;

pub use cert::{Backend, Certificate, Verdict};
pub use error::{Error, Result};
pub use lensring::{Generator, LensParams, LensRing, RingElement};
pub use scalar::Scalar;

use num_bigint::BigInt;

/// Polynomial with arbitrary-precision coefficients.
pub type Poly = SparsePoly<BigInt>;
/// Dense matrix over arbitrary-precision integers.
pub type IntMatrix = lattice::Matrix<BigInt>;
pub type IntHnf = lattice::Hnf<BigInt>;
pub type IntFunctional = lattice::Functional<BigInt>;

pub use poly::SparsePoly;
