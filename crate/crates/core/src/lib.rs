//! Archetypal analysis (principal convex hull) in the plane and beyond.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`numkernel`]: small dense matrices, products and a cyclic Jacobi
//!   eigensolver for symmetric matrices.
//! - [`simplex`]: Euclidean projection onto the probability simplex and the
//!   projected-gradient solver (exact gradient flow + projection) for
//!   simplex-constrained least squares.
//! - [`solver`]: the alternating B-update / Gauss–Seidel Z-update scheme,
//!   with optional variance regularization.
//! - [`geometry`]: planar hulls, polygon measures, Hausdorff and the
//!   permutation-matched `d_{2,∞}` distance.
//! - [`oracle`]: closed-form values for the uniform unit-disk problem.
//! - [`samplers`]: seeded data generators and CSV ingestion.
//! - [`harness`]: experiment drivers, CSV/SVG output and the verification
//!   suite behind the `archetype` binary.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod numkernel;
pub mod oracle;
pub mod samplers;
pub mod simplex;
pub mod solver;

pub use error::{Error, Result};
pub use numkernel::Matrix;
