//! Experiment-layer cross-checks: the harvested attractor proxy is stable
//! under a longer transient, sits inside the absorbing ball, and the
//! eventual radius shrinks (weakly) with stronger damping.

use bresse_core::disc::{dist_h0, make_grid};
use bresse_core::integrate::StepperConfig;
use bresse_core::lab::{
    absorbing_radius, fit_decay, harvest_flat_sample, harvest_sample, hausdorff_by,
    quasistability_probe, regularity_probe, AbsorbingProtocol, HarvestProtocol,
    QuasistabilityConfig,
};
use bresse_core::{BeamParams, DampingModel, ForcingModel};

fn fast_protocol() -> HarvestProtocol {
    HarvestProtocol {
        ensemble: 4,
        seed: 11,
        ic_energy: 0.5,
        settle_factor: 8.0,
        window_factor: 6.0,
        stride_factor: 0.5,
        max_time: 80.0,
    }
}

#[test]
fn harvested_sample_is_transient_independent_and_inside_the_ball() {
    let params = BeamParams::default().with_ell(0.1).unwrap();
    let grid = make_grid(params.length, 24).unwrap();
    let cfg = StepperConfig::new(2e-2).unwrap();
    let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();
    let damping = DampingModel::linear(1.0).unwrap();

    let protocol = fast_protocol();
    let sample = harvest_sample(&params, &forcing, &damping, &grid, &cfg, &protocol).unwrap();
    assert!(!sample.states.is_empty());
    assert!(sample.alpha > 0.0);

    // doubling the transient moves the sample by at most 10% of its size
    let longer = HarvestProtocol { settle_factor: 2.0 * protocol.settle_factor, ..protocol.clone() };
    let sample2 = harvest_sample(&params, &forcing, &damping, &grid, &cfg, &longer).unwrap();
    let proj: Vec<_> = sample.states.iter().map(|s| s.project()).collect();
    let proj2: Vec<_> = sample2.states.iter().map(|s| s.project()).collect();
    let d12 = hausdorff_by(&proj, &proj2, |a, b| dist_h0(&grid, a, b)).unwrap();
    let d21 = hausdorff_by(&proj2, &proj, |a, b| dist_h0(&grid, a, b)).unwrap();
    let scale = sample.max_norm.max(1e-6);
    assert!(
        d12.max(d21) <= 0.1 * scale,
        "re-harvest moved the sample by {} (scale {scale})",
        d12.max(d21)
    );

    // the sample sits inside the absorbing ball, within 5%
    let absorbing = absorbing_radius(
        &params,
        &forcing,
        &damping,
        &grid,
        &cfg,
        &[params.ell],
        &AbsorbingProtocol {
            ensemble: 4,
            ic_energies: vec![0.5],
            seed: protocol.seed,
            settle_factor: protocol.settle_factor,
            window_factor: protocol.window_factor,
            max_time: protocol.max_time,
            stride: 5,
        },
    )
    .unwrap();
    assert!(
        sample.max_norm <= 1.05 * absorbing.uniform_radius.max(1e-9),
        "sample norm {} outside ball {}",
        sample.max_norm,
        absorbing.uniform_radius
    );
}

#[test]
fn eventual_radius_weakly_decreases_with_stronger_damping() {
    let params = BeamParams::default();
    let grid = make_grid(params.length, 20).unwrap();
    let cfg = StepperConfig::new(2e-2).unwrap();
    let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();
    let protocol = AbsorbingProtocol {
        ensemble: 3,
        ic_energies: vec![1.0],
        seed: 5,
        settle_factor: 12.0,
        window_factor: 8.0,
        max_time: 100.0,
        stride: 10,
    };
    let mut radii = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let damping = DampingModel::linear(c).unwrap();
        let report =
            absorbing_radius(&params, &forcing, &damping, &grid, &cfg, &[0.1], &protocol).unwrap();
        radii.push(report.uniform_radius);
    }
    for w in radii.windows(2) {
        assert!(w[1] <= 1.1 * w[0], "radius grew from {} to {}", w[0], w[1]);
    }
}

#[test]
fn unforced_flat_and_curved_samples_collapse_together() {
    let params = BeamParams::default();
    let grid = make_grid(params.length, 20).unwrap();
    let cfg = StepperConfig::new(2e-2).unwrap();
    let forcing = ForcingModel::zero();
    let damping = DampingModel::linear(1.0).unwrap();
    let protocol = HarvestProtocol { settle_factor: 16.0, ..fast_protocol() };
    let curved = harvest_sample(&params.with_ell(0.1).unwrap(), &forcing, &damping, &grid, &cfg, &protocol).unwrap();
    let flat = harvest_flat_sample(&params, &forcing, &damping, &grid, &cfg, &protocol).unwrap();
    let proj: Vec<_> = curved.states.iter().map(|s| s.project()).collect();
    let d = hausdorff_by(&proj, &flat.states, |a, b| dist_h0(&grid, a, b)).unwrap();
    assert!(d <= 2e-2, "semidistance {d} for the trivial attractor");
}

#[test]
fn difference_energy_with_compensator_removed_still_decays() {
    let params = BeamParams::default();
    let grid = make_grid(params.length, 20).unwrap();
    let cfg = StepperConfig::new(1e-2).unwrap();
    let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();
    let damping = DampingModel::clipped_cubic(1.0).unwrap();
    let qcfg = QuasistabilityConfig {
        pairs: 2,
        epsilons: vec![1e-2],
        horizon: 15.0,
        stride: 10,
        ..QuasistabilityConfig::default()
    };
    let report = quasistability_probe(&params, &forcing, &damping, &grid, &cfg, &qcfg).unwrap();
    assert!(report.feasible);
    assert!(report.alpha_b > 0.0);
    for p in &report.pairs {
        assert!(p.alpha > 0.0, "pair rate {}", p.alpha);
    }
}

#[test]
fn regularity_probe_is_finite_on_harvested_samples() {
    let params = BeamParams::default().with_ell(0.2).unwrap();
    let grid = make_grid(params.length, 20).unwrap();
    let cfg = StepperConfig::new(2e-2).unwrap();
    let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();
    let damping = DampingModel::linear(1.0).unwrap();
    let sample = harvest_sample(&params, &forcing, &damping, &grid, &cfg, &fast_protocol()).unwrap();
    let reg = regularity_probe(&params, &forcing, &damping, &grid, &sample).unwrap();
    assert!(reg.max_accel_norm.is_finite());
    assert!(reg.max_second_diff_norm.is_finite());
    assert!(reg.max_second_diff_norm > 0.0);
}

#[test]
fn decay_fit_alpha_is_stationary_on_a_real_run() {
    use bresse_core::disc::assemble;
    use bresse_core::integrate::simulate;
    use bresse_core::lab::energy_ensemble;
    let params = BeamParams::default();
    let grid = make_grid(params.length, 24).unwrap();
    let cfg = StepperConfig::new(1e-2).unwrap();
    let ops = assemble(&params, &grid).unwrap();
    // velocity-proportional damping decays every underdamped mode at the
    // same rate, so the fitted rate is stationary along the series
    let forcing = ForcingModel::zero();
    let damping = DampingModel::linear(1.0).unwrap();
    // window matched to the decay scale so the tail half still carries signal
    let ic = energy_ensemble(&params, &grid, 21, &[1.0]).remove(0);
    let traj = simulate(&ic, 16.0, &ops, &forcing, &damping, &cfg, 5).unwrap();
    let shift = params.length * forcing.m_f;
    let series: Vec<(f64, f64)> =
        traj.times.iter().zip(&traj.reports).map(|(t, r)| (*t, r.e_total + shift)).collect();
    let full = fit_decay(&series).unwrap();
    let tail = bresse_core::lab::fit_decay_tail(&series).unwrap();
    assert!(full.alpha > 0.0);
    assert!(
        (tail.alpha - full.alpha).abs() <= 0.2 * full.alpha.max(1e-9),
        "full {} vs tail {}",
        full.alpha,
        tail.alpha
    );
}
