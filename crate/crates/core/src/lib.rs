//! Numerical index theory for desk-scale operator models.
//!
//! This crate builds finite, isotypically labeled matrix models of a family of
//! operators — truncated shifts and Toeplitz operators, first-order operators
//! on the circle in a Fourier basis, the graded de Rham-Dirac operator on the
//! circle, and per-weight radial discretizations of the deformed Dirac
//! operator `D + i c(fv)` on the plane with rotational circle symmetry — and
//! computes their Fredholm and equivariant indices from singular-value
//! numerical rank decisions.
//!
//! Modules:
//!
//! - [`characters`]: exact arithmetic in the character ring `R(G)` and finite
//!   windows of its completion, for `G` in {trivial, Z_n, S¹}.
//! - [`clifford`]: Clifford actions (Pauli, plane, exterior algebra), their
//!   gradings, and the Dirac leading symbol `i·c(ξ)`.
//! - [`symbols`]: leading symbols of differential operators from coefficient
//!   tables, ellipticity / transversal ellipticity certificates, and the
//!   deformed-symbol invertibility check for `c(ξ + v(x))`.
//! - [`models`]: the matrix model builders and finite-rank perturbations.
//! - [`index`]: numerical kernels, Fredholm/equivariant indices, and the
//!   theorem-verification suites (stability, homotopy, composition,
//!   f-independence, gluing, convergence).
//! - [`acceptance`]: the runnable acceptance criteria set used by the CLI and
//!   the integration test gate.

pub mod acceptance;
pub mod characters;
pub mod clifford;
pub mod error;
pub mod group;
pub mod index;
pub mod linalg;
pub mod models;
pub mod symbols;

pub use error::{Error, Result};
pub use group::{GroupDesc, IrrepLabel};
pub use linalg::CMatrix;
