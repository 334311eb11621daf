//! Construction, classification and verification of finite-dimensional real
//! division algebras.
//!
//! The double sign `(ℓ, r)` of an algebra of dimension greater than one (the
//! signs of `det L_a` and `det R_a`, constant over `a ≠ 0`) splits each of the
//! categories of 2-, 4- and 8-dimensional division algebras into four blocks.
//! This crate computes that invariant and the transformations that move
//! algebras between blocks: opposites, isotopes, the Klein four-group of
//! isotopy functors on decorated algebras, the e-quadratic decomposition, and
//! normal forms for 2-dimensional algebras and for isotopes of the quaternions.

pub mod algebra;
pub mod decorated;
pub mod dim2;
pub mod equadratic;
pub mod error;
pub mod gen;
pub mod matkit;
pub mod quat;
pub mod suite;

pub use algebra::{Algebra, Classical, DivisionMode, DivisionVerdict, Sampling, SignPair};
pub use error::{Error, Result};
pub use matkit::{Mat, Sign, DEFAULT_TOL};
