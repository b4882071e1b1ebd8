//! Numerical simulator for the length-preserving elastic flow of open curves
//! in ℝⁿ (n ≥ 2) with orthogonal free boundary on a hypersurface.
//!
//! The flow evolves an immersed curve γ: [-1,1] → ℝⁿ by the negative
//! L²(ds)-gradient of the elastic energy ∫|κ|² ds, constrained to preserve
//! length through a nonlocal Lagrange multiplier λ. The endpoints are free to
//! slide on a hypersurface M which the curve meets orthogonally; a natural
//! third-order boundary condition couples the curvature to the shape operator
//! of M.
//!
//! Crate layout:
//! - [`curve`]: discrete open curves, finite-difference calculus, arclength
//!   quadrature, constant-speed remeshing.
//! - [`surface`]: the hypersurface M (plane / sphere / torus catalog and
//!   generic level sets with forward-mode second-order autodiff), signed
//!   distance, nearest-point projection, shape operator.
//! - [`energy`]: elastic energy, its gradient, the quasilinear operator that
//!   realizes it in a fixed parametrization, and the Lagrange multiplier via
//!   two independent formulas.
//! - [`boundary`]: free boundary condition residuals, boundary orientation
//!   signs, and the linearized boundary rows for the implicit solver.
//! - [`flow`]: IMEX and explicit time steppers, the run loop, length
//!   correction, and initial-data generators.
//! - [`diagnostics`]: stationarity norm, planar reflection, turning number,
//!   limit classification, non-flatness bookkeeping.
//! - [`validation`]: the executable invariant suite behind `validate`.
//!
//! With the default `parallel` feature, embarrassingly parallel work (batch
//! point evaluation, parameter sweeps) fans out over a rayon pool; without it
//! everything runs sequentially. Single-flow trajectories are deterministic
//! either way.

pub mod boundary;
pub mod curve;
pub mod diagnostics;
pub mod energy;
mod error;
pub mod exec;
pub mod flow;
pub mod solve;
mod stencil;
pub mod surface;
pub mod validation;
pub(crate) mod vecn;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
