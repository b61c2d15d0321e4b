//! Limits of critical points of the pencil `f - t*g` on an affine variety.
//!
//! The crate solves Lagrange systems by homotopy continuation, follows the
//! critical points as `t -> 0` with a Cauchy endgame, and compares the
//! resulting set of points with multiplicity against the critical points of
//! the linear function `g` on user-supplied strata.

pub mod critsys;
pub mod endgame;
pub mod error;
pub mod limitlab;
pub mod linalg;
pub mod pointset;
pub mod poly;
pub mod random;
pub mod tracker;

pub use error::{Error, Result};
pub use num_complex::Complex64;
