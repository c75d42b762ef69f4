//! Semiclassical entropy expansions in phase space.
//!
//! The crate computes the ℏ-expansion of the von Neumann entropy of
//! quantum states with classical counterparts (orders 0, 1, 2), the
//! Wigner-Kirkwood expansion of thermal states, and the resulting
//! quantum corrections to the net work of an ideal quantum Carnot
//! cycle. An exact-diagonalization oracle provides the reference
//! answers everything is validated against.
//!
//! Expansion coefficients are stored as real fields throughout: a
//! series X = X⁰ + iℏX¹ + (iℏ)²X² is represented by (x0, x1, x2) =
//! (X⁰, iX¹, −X²), so X ≃ x0 + ℏ·x1 + ℏ²·x2 with every xₙ real. All
//! formulas in this crate are stated in that convention.

pub mod carnot;
pub mod entropy;
pub mod error;
pub mod oracle;
pub mod phase_space;
pub mod thermal;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use phase_space::{Axis, Field2D, Grid2D};
