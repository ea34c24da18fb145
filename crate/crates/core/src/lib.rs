//! Numerical laboratory for the nonlinear damped Bresse arched-beam system
//! and its flat-beam (Timoshenko) limit.
//!
//! The crate provides, in layers:
//!
//! - [`model`]: physical parameters, forcing potentials, damping laws, the
//!   curvature-uniform norm-equivalence constants, and a sampling-based
//!   screen of the structural hypotheses.
//! - [`disc`]: uniform Dirichlet finite-difference discretization with an
//!   exactly symmetric coupled stiffness operator and matching discrete
//!   norms and quadratures.
//! - [`integrate`]: implicit-midpoint time integration with per-step energy
//!   and dissipation accounting against the energy identity.
//! - [`equilibria`]: Newton continuation to stationary states and the
//!   equilibrium-set bound.
//! - [`lab`]: experiment layer for decay fitting, curvature-uniform
//!   absorbing radii, quasi-stability probes, the vanishing-curvature limit
//!   and attractor-sample semidistances.

pub mod disc;
pub mod equilibria;
pub mod error;
pub mod integrate;
pub mod lab;
pub mod model;

pub use disc::{make_grid, Grid, State, TimoshenkoState};
pub use equilibria::{
    check_equilibrium_bound, find_equilibria, solve_equilibrium, Equilibrium, EquilibriumSet,
    MultiStartConfig,
};
pub use error::{CoreError, Result};
pub use integrate::{simulate, step, timoshenko_simulate, EnergyReport, StepperConfig, Trajectory};
pub use lab::{
    absorbing_radius, fit_decay, hausdorff_semidistance, quasistability_probe,
    singular_limit_experiment, upper_semicontinuity_experiment, DecayFit,
};
pub use model::{
    analytic_constants, validate_hypotheses, AnalyticConstants, BeamParams, DampingLaw,
    DampingModel, ForcingLaw, ForcingModel, SampleSpec,
};
