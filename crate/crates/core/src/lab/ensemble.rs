use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::disc::{norm_h_sq, norm_hl_sq, Grid, State};
use crate::model::BeamParams;

/// Random smooth state: the first three sine modes per field with
/// coefficients drawn uniformly and decaying with the mode number.
pub fn random_state(grid: &Grid, rng: &mut StdRng, amplitude: f64) -> State {
    let mut s = State::zero(grid);
    for m in 1..=3usize {
        let mode = grid.sine_mode(m);
        let scale = amplitude / m as f64;
        for field in [&mut s.phi, &mut s.psi, &mut s.w, &mut s.phit, &mut s.psit, &mut s.wt] {
            let c = rng.gen_range(-1.0..1.0) * scale;
            for (x, v) in field.iter_mut().zip(&mode) {
                *x += c * v;
            }
        }
    }
    s
}

/// Rescale a state so its linear energy (half the energy norm squared)
/// equals `target`.
pub fn rescale_to_energy(params: &BeamParams, grid: &Grid, state: &mut State, target: f64) {
    let e = 0.5 * norm_hl_sq(params, grid, state);
    if e > 0.0 && target >= 0.0 {
        state.scale((target / e).sqrt());
    }
}

/// Rescale a state to a given standard-norm distance from the origin.
pub fn rescale_to_norm(grid: &Grid, state: &mut State, target: f64) {
    let n = norm_h_sq(grid, state).sqrt();
    if n > 0.0 {
        state.scale(target / n);
    }
}

/// One seeded random smooth state.
pub fn seeded_random_state(grid: &Grid, seed: u64, amplitude: f64) -> State {
    random_state(grid, &mut StdRng::seed_from_u64(seed), amplitude)
}

/// Deterministic ensemble of random states with the given energies.
pub fn energy_ensemble(
    params: &BeamParams,
    grid: &Grid,
    seed: u64,
    energies: &[f64],
) -> Vec<State> {
    let mut rng = StdRng::seed_from_u64(seed);
    energies
        .iter()
        .map(|&e| {
            let mut s = random_state(grid, &mut rng, 1.0);
            rescale_to_energy(params, grid, &mut s, e);
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::make_grid;

    #[test]
    fn ensemble_is_deterministic_and_scaled() {
        let params = BeamParams::default();
        let grid = make_grid(params.length, 20).unwrap();
        let a = energy_ensemble(&params, &grid, 9, &[1.0, 10.0]);
        let b = energy_ensemble(&params, &grid, 9, &[1.0, 10.0]);
        assert_eq!(a, b);
        for (s, e) in a.iter().zip([1.0, 10.0]) {
            let got = 0.5 * norm_hl_sq(&params, &grid, s);
            assert!((got - e).abs() < 1e-10 * e);
        }
    }
}
