//! Quadrature design and audit on model manifolds.
//!
//! The crate certifies which Laplacian eigenfunctions a point-weight rule on
//! the circle, a flat torus, or the unit sphere integrates exactly, computes
//! the heat-kernel Rayleigh ceiling on the largest exactly integrated
//! eigenvalue, evaluates the dimensional exactness constants, and
//! synthesizes well-spread point configurations by descending a Gaussian
//! pairwise energy.
//!
//! Modules:
//! - [`manifold`]: the three model geometries and their explicit eigenbases
//! - [`heat_kernel`]: exact kernels and the semigroup/gradient inner products
//! - [`quadrature`]: rules, exactness audits, and convex weight fitting
//! - [`spectral`]: the Rayleigh bound, bound curves, and ceiling constants
//! - [`energy`]: pairwise energies and gradient-descent point synthesis
//! - [`grids`]: dense reference grids used for verification integrals

pub mod energy;
pub mod error;
pub mod grids;
mod harmonics;
pub mod heat_kernel;
pub mod manifold;
mod math;
pub mod quadrature;
pub mod spectral;

pub use energy::{
    approx_energy, default_diffusion_time, energy_gradient, optimize_points, random_points,
    simplified_energy, OptimizerConfig,
};
pub use error::{Error, Result};
pub use heat_kernel::{grad_kernel_inner, heat_kernel, kernel_inner, KernelConfig};
pub use manifold::{weyl_lambda, EigenDescriptor, EigenLabel, ManifoldSpec, Parity, Point};
pub use math::unit_ball_volume;
pub use quadrature::{
    audit_exactness, default_audit_tol, fit_weights, AuditReport, QuadratureRule,
};
pub use spectral::{
    bound_curve, default_time_window, exactness_ceiling, exactness_constant, rayleigh_bound,
    weyl_count_unit_volume, BoundCurve, BoundSample, ExactnessCeiling,
};
