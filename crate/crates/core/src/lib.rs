//! Exact-arithmetic toolkit for finite-dimensional shifted L-infinity algebras
//! carrying a finite descending filtration.
//!
//! The crate provides, over the rationals and with no floating point anywhere:
//!
//! * graded vector spaces with filtration weights, sparse elements, and
//!   symmetric multilinear bracket structures ([`structure`]);
//! * curvature, Maurer-Cartan checks, and twisting by Maurer-Cartan elements;
//! * infinity-morphisms with their defining relations and filtration
//!   compatibility ([`morphism`]);
//! * filtered cochain complexes, quotient cohomology, mapping cones, spectral
//!   pages, and the deterministic lifting solver that witnesses page
//!   vanishing ([`complexes`]);
//! * polynomial one- and two-cells in the Maurer-Cartan spaces of `L` tensor
//!   polynomial forms on the interval and the triangle: initial value
//!   problems, dt-part adjustments, horn filling, concatenation along a
//!   morphism, and rectification ([`cells`], [`forms`]);
//! * the gauge engine: pushing Maurer-Cartan elements deep into the
//!   filtration, the surjectivity and injectivity inductions on pi_0, and
//!   twisted cohomology comparisons ([`engine`]);
//! * text formats for algebras, morphisms, elements, cells and paths
//!   ([`format`]), a seeded random instance generator ([`generator`]), and
//!   reference instances used across the test suite ([`fixtures`]).
//!
//! Every constructed witness (cell, path, trace) is re-verified against its
//! defining equations before it is returned; solvers fail with located
//! diagnostics instead of producing unchecked data.

pub mod cells;
pub mod complexes;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod forms;
pub mod generator;
pub mod linalg;
pub mod morphism;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod space;
pub mod structure;

pub use error::{Error, Result};
pub use scalar::Scalar;
