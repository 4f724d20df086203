//! Exact and floating-point machinery for the quaternionic noncommutative
//! seven-sphere, its four-sphere subalgebra, Chern characters and the
//! quantum-group coaction.

pub mod coaction;
pub mod conditions;
pub mod error;
pub mod homology;
pub mod linalg;
pub mod quatlin;
pub mod report;
pub mod ring;
pub mod ncalg;
pub mod rmatrix;
pub mod scalars;
pub mod spheres;

pub use conditions::{Check, ConditionReport};
pub use error::{Error, Result};
pub use scalars::{FloatComplex, GaussRational, Rational, Scalar};
