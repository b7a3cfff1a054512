//! Spherical polar coordinates, the moving frame and the differential
//! operators written in it.
//!
//! Points are `x = ρ σ(θ, φ)` with `σ = (cos θ, sin θ cos φ, sin θ sin φ)`, so
//! the polar axis is the first Cartesian axis. Radial dependence is carried in
//! `t = log ρ`, for which `ρ ∂_ρ = ∂_t`.

mod field;
mod frame;
mod grid;
mod operators;

pub use field::{Component, FieldDerivatives, FieldSample};
pub use frame::{
    cross, dot, frame, frame_phi_derivative, frame_theta_derivative, norm, Frame,
    FrameDerivative, SphericalDirection, Vec3,
};
pub use grid::{Grid, GridSpec, ThetaGrid, ThetaRule};
pub use operators::{
    big_d_theta, d_phi_field, d_t, d_t_field, d_theta, divergence, divergence_residual,
    divergence_residual_with, divergence_with, pole_cot_limits, resolve_derivatives, t_theta,
    theta_field_op, AngularKind, TDerivative,
};
pub use field::max_abs_diff;
