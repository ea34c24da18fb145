//! Cross-checks of the stationary solver: converged states are fixed
//! points of the time stepper, and a long damped run settles onto the same
//! state the solver finds (dynamic relaxation as an independent oracle).

use bresse_core::disc::{assemble, dist_h, make_grid};
use bresse_core::equilibria::{check_equilibrium_bound, find_equilibria, solve_equilibrium, MultiStartConfig};
use bresse_core::integrate::{simulate, step, StepperConfig};
use bresse_core::model::analytic_constants;
use bresse_core::{BeamParams, DampingModel, ForcingModel};

#[test]
fn perturbed_first_mode_converges_and_matches_dynamic_relaxation() {
    let params = BeamParams::default();
    let grid = make_grid(params.length, 48).unwrap();
    let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();

    let mode = grid.sine_mode(1);
    let guess: Vec<f64> = mode.iter().map(|v| 0.5 * v).collect();
    let zero = vec![0.0; grid.n()];
    let eq = solve_equilibrium(&params, &forcing, &grid, (&guess, &guess, &zero), 1e-10, 60).unwrap();
    assert!(eq.residual_norm <= 1e-10);

    // dynamic relaxation: damp the system hard from nearby data and let it
    // settle; the terminal state must agree with the Newton solution
    let ops = assemble(&params, &grid).unwrap();
    let damping = DampingModel::linear(2.0).unwrap();
    let cfg = StepperConfig::new(1e-2).unwrap();
    let mut initial = eq.as_state(&grid);
    for (v, m) in initial.phi.iter_mut().zip(&mode) {
        *v += 0.02 * m;
    }
    let traj = simulate(&initial, 120.0, &ops, &forcing, &damping, &cfg, 100).unwrap();
    assert!(traj.failure.is_none());
    let settled = traj.last_state();
    let d = dist_h(&grid, settled, &eq.as_state(&grid));
    assert!(d <= 1e-4, "settled state sits {d} away from the Newton solution");
}

#[test]
fn equilibria_are_fixed_points_of_the_stepper() {
    let params = BeamParams::default();
    let grid = make_grid(params.length, 32).unwrap();
    let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();
    let damping = DampingModel::clipped_cubic(1.0).unwrap();
    let cfg = StepperConfig::new(1e-3).unwrap();
    let ops = assemble(&params, &grid).unwrap();

    let set = find_equilibria(
        &params,
        &forcing,
        &grid,
        &MultiStartConfig { modes: 2, random_starts: 4, ..MultiStartConfig::default() },
    )
    .unwrap();
    assert!(set.equilibria.len() >= 2, "found {} equilibria", set.equilibria.len());
    for eq in &set.equilibria {
        let start = eq.as_state(&grid);
        let mut s = start.clone();
        for _ in 0..100 {
            s = step(&s, &ops, &forcing, &damping, &cfg).unwrap();
        }
        let drift = dist_h(&grid, &s, &start);
        assert!(drift <= 10.0 * 1e-10, "drift {drift} over 100 steps");
    }
}

#[test]
fn multistart_set_respects_the_stationary_bound() {
    let params = BeamParams::default();
    let grid = make_grid(params.length, 32).unwrap();
    let forcing = ForcingModel::builtin(0.3, 0.2).unwrap();
    let ell0 = 0.45 * params.curvature_cap();
    let constants = analytic_constants(&params, ell0, forcing.beta).unwrap();
    let set = find_equilibria(
        &params,
        &forcing,
        &grid,
        &MultiStartConfig { modes: 3, random_starts: 6, ..MultiStartConfig::default() },
    )
    .unwrap();
    assert!(!set.equilibria.is_empty());
    for eq in &set.equilibria {
        let report = check_equilibrium_bound(eq, &params, &forcing, &constants);
        assert!(report.passed, "lhs {} > rhs {}", report.lhs, report.rhs);
    }
}
