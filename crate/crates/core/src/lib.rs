//! Exact operator calculus for deformation quantization on cotangent bundles.
//!
//! The crate is organized around the coefficient field of truncated Laurent
//! series in `tau` ([`scalars`]), sparse total symbols in two flavours
//! ([`symbols`]), the noncommutative star-product calculus on those symbols
//! ([`wcalc`]), star-exponentials and resolvents ([`starexp`]), descent-datum
//! verification on cover nerves ([`cech`]), and composition of linear
//! Lagrangian correspondences ([`lagrange`]).
//!
//! All arithmetic is exact over the Gaussian rationals. Wherever an operation
//! cannot stay finite (inverses, conjugations, exponentials) the result
//! carries an explicit truncation marker instead of silently approximating.

pub mod cech;
pub mod lagrange;
pub mod linalg;
pub mod scalars;
pub mod starexp;
pub mod symbols;
pub mod wcalc;

pub use scalars::{LaurentScalar, Scalar};

