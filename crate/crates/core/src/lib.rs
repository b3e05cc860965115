//! Quantum Renyi-type divergences between positive semi-definite operators.
//!
//! The crate provides:
//!
//! - certified dense complex Hermitian linear algebra ([`hermitian`]):
//!   eigendecomposition, matrix functions on supports, Loewner-order checks,
//!   trace norms;
//! - the divergence family ([`divergences`]): the sandwiched Renyi divergence,
//!   the standard alpha-relative Renyi entropy, the quantum relative entropy,
//!   min-/max-/zero-relative entropies, and the hypothesis-testing relative
//!   entropy with its optimal test;
//! - CPTP maps, pinching maps, and seeded random instance generators
//!   ([`channels`]);
//! - numerical verification of the order relations, limits, and the
//!   support-gap counterexample of the divergence family ([`verify`]);
//! - JSON (de)serialization of operators and channels ([`io`]).
//!
//! All logarithms are base 2; divergence values are in bits.

pub mod channels;
pub mod divergences;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod verify;

pub use error::{Error, Result};
pub use hermitian::{
    eig_hermitian, loewner_leq, matrix_power_psd, support_projector, trace_norm, CMatrix,
    DensityOperator, HermitianOperator, Projector, PsdOperator, Spectrum, SupportRelation,
    DEFAULT_RANK_TOL,
};
