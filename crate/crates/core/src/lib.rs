//! Sharp weighted Hardy–Leray inequality for solenoidal vector fields in R³.
//!
//! The crate provides the spherical differential calculus used to write
//! gradients and divergences in the moving frame `(σ, e_θ, e_φ)`, the
//! eigenproblem of the polar operator `T_θ = ∂_θ D_θ`, closed-form sharp
//! constants together with brute-force cross-checks, constructors for the
//! extremal field sequences, and two independent evaluations of the weighted
//! Rayleigh quotient (direct quadrature and a log-radial Fourier reduction).
//!
//! Everything is three-dimensional. Radial positions are carried in the
//! logarithmic variable `t = log ρ`.

pub mod cli;
pub mod constants;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod quadrature;
pub mod quotient;
pub mod spectrum;

pub use error::{Error, Result};
