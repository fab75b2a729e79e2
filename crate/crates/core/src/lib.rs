//! Numerical infrastructure for four-dimensional space-time finite elements.
//!
//! The crate covers the three standard 4-polytopes (tesseract, tetrahedral
//! prism, pentatope): reference geometry and exact monomial integrals,
//! orthonormal polynomial bases, symmetry orbits, fully symmetric quadrature
//! rule generation by moment matching, a catalog of bundled rules, and the
//! experiment harness used to validate rules on single elements and on
//! Kuhn–Freudenthal grids of the unit 4-cube. Also included are the 0/1-polytope
//! degeneration sequences that lead from the d-cube to the d-simplex.

pub mod basis;
pub mod decomp;
pub mod elements;
pub mod error;
pub mod harness;
pub mod jacobi;
pub mod linalg;
pub mod par;
pub mod polytope_seq;
pub mod quadgen;
pub mod real;
pub mod rules;
pub mod symmetry;

pub use elements::{ElementKind, Point4};
pub use error::{Error, Result};
pub use real::{Dd, Precision, Real};
pub use rules::QuadratureRule;
