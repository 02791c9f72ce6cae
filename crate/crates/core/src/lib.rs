//! Desk-scale laboratory for the density version of the Waring–Goldbach
//! problem.
//!
//! The crate is organised the way the argument is: exact arithmetic
//! ([`arith`]), local congruence structure modulo `W` ([`local`]), the
//! W-tricked weighted sequences and their means ([`majorant`]), circle-method
//! numerics ([`spectral`]) and representation counting / coverage
//! ([`representation`]).
//!
//! Floating-point code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common case.

pub mod arith;
pub mod bits;
pub mod error;
pub mod local;
pub mod majorant;
pub mod representation;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub use arith::{FactoredModulus, PrimeSet};

/// Weighted sequence over `[N]` in double precision.
pub type SequenceF64 = majorant::WeightedSequence<f64>;
/// Weighted sequence over `[N]` in single precision.
pub type SequenceF32 = majorant::WeightedSequence<f32>;
/// Grid spectrum in double precision.
pub type SpectrumF64 = spectral::Spectrum<f64>;
/// Grid spectrum in single precision.
pub type SpectrumF32 = spectral::Spectrum<f32>;
/// Local decomposition with double-precision weights.
pub type LocalDecompositionF64 = local::LocalDecomposition<f64>;
/// Local decomposition with exact rational weights.
pub type LocalDecompositionRational = local::LocalDecomposition<num_rational::Ratio<i64>>;
/// Exponential sum value in double precision.
pub type ExpSumValueF64 = spectral::ExpSumValue<f64>;
