//! Matrix-weighted Musielak-Orlicz sequence spaces, made computable.
//!
//! The library models sequence spaces built from three ingredients:
//!
//! * a *Musielak family* `(φ_n)` of Orlicz functions ([`orlicz`]),
//! * an infinite nonnegative *matrix kernel* `A = (a_nk)` ([`matrix`]),
//! * finitely supported sequences of vectors with a coordinate norm ([`space`]).
//!
//! The convex modular `ϱ(x) = Σ_n φ_n(Σ_k |a_nk| ‖x_k‖)` and its Luxemburg
//! norm are evaluated with certified truncation: every result reports how many
//! rows were summed, a bound on the neglected tail, and whether that bound
//! meets the requested tolerance.
//!
//! On top of the solver sit two diagnostic layers: finite-sample harnesses for
//! geometric properties of the space ([`geometry`]) and s-number / operator
//! ideal diagnostics for finite matrices acting on Euclidean space
//! ([`snumbers`]).
//!
//! All numeric code is generic over the scalar via [`num::Real`] (implemented
//! by `f32` and `f64`); the `*64` aliases at the crate root fix the common
//! double-precision instantiations.

pub mod error;
pub mod geometry;
pub mod matrix;
pub mod num;
pub mod orlicz;
pub mod sampling;
pub mod snumbers;
pub mod space;

pub use error::{Error, ErrorKind, Result};
pub use num::Real;

/// Double-precision Orlicz function.
pub type OrliczFunction64 = orlicz::OrliczFunction<f64>;
/// Double-precision Musielak family.
pub type MusielakFamily64 = orlicz::MusielakFamily<f64>;
/// Double-precision matrix kernel.
pub type MatrixKernel64 = matrix::MatrixKernel<f64>;
/// Double-precision coordinate norm.
pub type VectorNorm64 = space::VectorNorm<f64>;
/// Double-precision finitely supported sequence.
pub type VectorSequence64 = space::VectorSequence<f64>;
/// Double-precision truncation policy.
pub type TruncationPolicy64 = space::TruncationPolicy<f64>;
/// Double-precision finite operator.
pub type FiniteOperator64 = snumbers::FiniteOperator<f64>;
