//! Universal two-qubit entanglement witness.
//!
//! The determinant of the partially transposed state, `det ρ^Γ`, is negative
//! exactly when a two-qubit state is entangled. It is a polynomial in the
//! moments `Π_n = tr[(ρ^Γ)^n]`, `n = 2, 3, 4`, and this crate evaluates those
//! moments three independent ways:
//!
//! - [`witness::moments_direct`]: powers of `ρ^Γ`;
//! - [`collective`]: swap-operator observables on `n` copies of `ρ`, including
//!   the four-outcome sequential projective measurement;
//! - [`invariants`]: local-unitary invariants of the Pauli expansion.
//!
//! [`witness::report`] turns the witness into negativity and concurrence
//! bounds, and [`measurement`] simulates estimating it from finite shots.

pub mod collective;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod measurement;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use states::DensityMatrix;
