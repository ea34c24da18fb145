use crate::disc::grid::Grid;
use crate::disc::state::{State, TimoshenkoState};
use crate::model::{BeamParams, ForcingModel, PointForcing};

/// Discrete L^2 norm squared: h * sum of squares over interior nodes
/// (the trapezoid rule with zero boundary values).
pub fn l2_norm_sq(h: f64, u: &[f64]) -> f64 {
    h * u.iter().map(|v| v * v).sum::<f64>()
}

pub fn l2_inner(h: f64, u: &[f64], v: &[f64]) -> f64 {
    h * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
}

/// Discrete L^{2p} norm: (h * sum |u|^{2p})^{1/(2p)}.
pub fn l2p_norm(h: f64, u: &[f64], p: f64) -> f64 {
    let e = 2.0 * p;
    (h * u.iter().map(|v| v.abs().powf(e)).sum::<f64>()).powf(1.0 / e)
}

/// Discrete H^1_0 seminorm squared: h * sum over cells of the squared
/// first-difference quotient, with zero boundary extension.
pub fn h1_seminorm_sq(h: f64, u: &[f64]) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for j in 0..=n {
        let left = if j == 0 { 0.0 } else { u[j - 1] };
        let right = if j == n { 0.0 } else { u[j] };
        let d = (right - left) / h;
        acc += d * d;
    }
    h * acc
}

/// Standard phase-space norm squared:
/// |phi_x|^2 + |psi_x|^2 + |w_x|^2 + |phi_t|^2 + |psi_t|^2 + |w_t|^2.
pub fn norm_h_sq(grid: &Grid, state: &State) -> f64 {
    let h = grid.h();
    h1_seminorm_sq(h, &state.phi)
        + h1_seminorm_sq(h, &state.psi)
        + h1_seminorm_sq(h, &state.w)
        + l2_norm_sq(h, &state.phit)
        + l2_norm_sq(h, &state.psit)
        + l2_norm_sq(h, &state.wt)
}

/// Energy norm squared:
/// rho1 |phi_t|^2 + rho2 |psi_t|^2 + rho1 |w_t|^2
/// + b |psi_x|^2 + k |phi_x + psi + ell w|^2 + k0 |w_x - ell phi|^2,
/// with the composite first-order terms evaluated on cell midpoints.
pub fn norm_hl_sq(params: &BeamParams, grid: &Grid, state: &State) -> f64 {
    let h = grid.h();
    let n = state.n();
    let ell = params.ell;
    let mut elastic = 0.0;
    for j in 0..=n {
        let at = |u: &[f64], i: usize| -> f64 {
            if i == 0 || i > n {
                0.0
            } else {
                u[i - 1]
            }
        };
        let d = |u: &[f64]| (at(u, j + 1) - at(u, j)) / h;
        let m = |u: &[f64]| 0.5 * (at(u, j + 1) + at(u, j));
        let bend = d(&state.psi);
        let shear = d(&state.phi) + m(&state.psi) + ell * m(&state.w);
        let stretch = d(&state.w) - ell * m(&state.phi);
        elastic += params.b * bend * bend + params.k * shear * shear + params.k0 * stretch * stretch;
    }
    params.rho1 * l2_norm_sq(h, &state.phit)
        + params.rho2 * l2_norm_sq(h, &state.psit)
        + params.rho1 * l2_norm_sq(h, &state.wt)
        + h * elastic
}

/// Flat-beam phase-space norm squared:
/// |phi_x|^2 + |psi_x|^2 + |phi_t|^2 + |psi_t|^2.
pub fn norm_h0_sq(grid: &Grid, state: &TimoshenkoState) -> f64 {
    let h = grid.h();
    h1_seminorm_sq(h, &state.phi)
        + h1_seminorm_sq(h, &state.psi)
        + l2_norm_sq(h, &state.phit)
        + l2_norm_sq(h, &state.psit)
}

/// Trapezoidal quadrature of the potential density over the beam. Boundary
/// nodes contribute F at the origin of displacement space.
pub fn quad_potential(forcing: &ForcingModel, grid: &Grid, state: &State) -> f64 {
    let h = grid.h();
    let mut acc = forcing.density(&[0.0, 0.0, 0.0]); // two half-weighted boundary nodes
    for i in 0..state.n() {
        acc += forcing.density(&[state.phi[i], state.psi[i], state.w[i]]);
    }
    h * acc
}

/// Same quadrature on the flat beam: F evaluated at zero longitudinal
/// displacement.
pub fn quad_potential_timoshenko(forcing: &ForcingModel, grid: &Grid, state: &TimoshenkoState) -> f64 {
    let h = grid.h();
    let mut acc = forcing.density(&[0.0, 0.0, 0.0]);
    for i in 0..state.n() {
        acc += forcing.density(&[state.phi[i], state.psi[i], 0.0]);
    }
    h * acc
}

/// Distance in the standard phase-space norm.
pub fn dist_h(grid: &Grid, a: &State, b: &State) -> f64 {
    norm_h_sq(grid, &a.difference(b)).sqrt()
}

/// Distance in the energy norm.
pub fn dist_hl(params: &BeamParams, grid: &Grid, a: &State, b: &State) -> f64 {
    norm_hl_sq(params, grid, &a.difference(b)).sqrt()
}

/// Distance in the flat-beam norm.
pub fn dist_h0(grid: &Grid, a: &TimoshenkoState, b: &TimoshenkoState) -> f64 {
    norm_h0_sq(grid, &a.difference(b)).sqrt()
}
