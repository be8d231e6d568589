//! Exact combinatorial calculus for high-dimensional graph manifolds.
//!
//! A graph manifold here is a compact n-manifold glued from pieces, each
//! the product of a truncated finite-volume hyperbolic manifold with a
//! torus, with affine identifications of paired boundary tori. The crate
//! mechanizes the integer-lattice layer of that picture:
//!
//! - [`lattice`]: arbitrary-precision sublattice algebra over Z^m
//!   (Hermite/Smith normal forms, intersection, saturation, kernels);
//! - [`model`]: the decorated-multigraph data model, manifest validation,
//!   transversality/irreducibility and group-property classification;
//! - [`bass_serre`]: path stabilizer lattices on the Bass-Serre tree and
//!   the acylindricity bound;
//! - [`equiv`]: gluing-pattern equivalence at an edge, generation of
//!   pairwise inequivalent families, and graph-level isomorphism /
//!   quasi-isometry invariants;
//! - [`obstruction`]: certificates obstructing locally CAT(0) metrics
//!   (distorted-wall monodromy, circle-bundle Euler class, twisted
//!   doubles);
//! - [`filling`]: symbolic composition of filling-function upper bounds.
//!
//! All operations are pure functions over immutable values and safe to
//! call concurrently.

pub mod bass_serre;
pub mod equiv;
pub mod error;
pub mod filling;
pub mod lattice;
pub mod manifest;
pub mod matrix;
pub mod model;
pub mod obstruction;

pub use error::{Error, Result};
pub use lattice::{kernel, snf_invariant_factors, Index, Lattice};
pub use matrix::IntMatrix;
pub use model::GraphManifold;
