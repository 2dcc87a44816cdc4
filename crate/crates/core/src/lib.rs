//! steplab — a numerical laboratory for Stepanov-type function spaces.
//!
//! The crate represents locally p-integrable functions ℝ → ℝ^d as
//! piecewise-constant grid functions, implements the windowed Stepanov norm,
//! the Bochner transform family (continuous, discrete, inverse, left inverse,
//! periodization), certificate-producing scans for almost periodicity and
//! almost automorphy, quantitative tightness / uniform-integrability moduli,
//! superposition (Nemytskii) operators with their hypothesis checkers, and a
//! seeded verification harness that certifies the identities and inequalities
//! all of this is built on.

pub mod bochner;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod grid;
pub mod harness;
pub mod integrability;
pub mod nemytskii;
pub(crate) mod numeric;
pub mod periodicity;

pub use error::{Error, Result};
pub use grid::{GridFunction, GridSpec, LpSlice, NormBracket, NormKind};
