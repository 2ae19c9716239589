//! Exact calculus of quantum principal bundles.
//!
//! Everything is computed over the Gaussian rationals, so every identity this
//! crate verifies is an exact algebraic statement, never a floating-point
//! approximation. The main layers, bottom to top:
//!
//! * [`scalar`], [`linalg`] — exact scalars and finite-dimensional linear
//!   algebra (spans, kernels, quotients).
//! * [`group`], [`hopf`] — finite groups, their function Hopf algebras, the
//!   windowed Laurent algebra for U(1), and unitary corepresentations.
//! * [`fodc`], [`envelope`] — bicovariant first-order differential calculi
//!   from Ad-invariant right ideals, the quantum germs map, and the universal
//!   differential envelope truncated at a degree cap.
//! * [`bundle`], [`gauge`] — quantum principal bundles, horizontal and base
//!   forms, intertwiner families, the quantum translation map, and the group
//!   isomorphism between convolution-invertible maps and covariant module
//!   automorphisms.
//! * [`roots`], [`poly`], [`dunkl`] — crystallographic root systems, exact
//!   multivariate polynomials, Dunkl operators and Dunkl connections on the
//!   classical/quantum hybrid bundle.
//! * [`scenario`], [`report`] — the line-oriented scenario format and the
//!   deterministic check reports that the `qpb` CLI emits.

pub mod bundle;
pub mod dunkl;
pub mod envelope;
pub mod exec;
pub mod fodc;
pub mod gauge;
pub mod group;
pub mod hopf;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod scenario;

mod error;

pub use error::{Error, Result};
