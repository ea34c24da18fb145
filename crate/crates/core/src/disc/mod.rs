//! Finite-difference spatial discretization on a uniform Dirichlet grid:
//! grids, phase-space states, the coupled elastic operator and the discrete
//! norms and quadratures.
//!
//! Second-order centered differences throughout. First-order quantities
//! inside the composite elastic terms live on cell midpoints, which makes
//! the assembled stiffness exactly symmetric and its quadratic form equal
//! to the elastic part of the energy norm to round-off.

mod grid;
mod norms;
mod operators;
mod state;

pub use grid::{make_grid, Grid};
pub use norms::{
    dist_h, dist_h0, dist_hl, h1_seminorm_sq, l2_inner, l2_norm_sq, l2p_norm, norm_h0_sq,
    norm_h_sq, norm_hl_sq, quad_potential, quad_potential_timoshenko,
};
pub use operators::{
    assemble, assemble_timoshenko, Block, BresseOperators, ElasticStencil, StrainSpec,
    TimoshenkoOperators,
};
pub use state::{State, TimoshenkoState};
