use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc::{
    assemble, assemble_timoshenko, dist_h0, l2_norm_sq, norm_h0_sq, norm_hl_sq, Grid, State,
    TimoshenkoState,
};
use crate::error::{CoreError, Result};
use crate::integrate::{simulate, timoshenko_simulate, StepperConfig};
use crate::lab::decay::fit_decay;
use crate::lab::ensemble::energy_ensemble;
use crate::lab::hausdorff::hausdorff_by;
use crate::model::{BeamParams, DampingModel, ForcingModel, PointDamping, PointForcing};

/// Curvature sweeps stay strictly inside the uniform regime.
const REGIME_MARGIN: f64 = 0.9;

fn check_sweep_curvatures(params: &BeamParams, ells: &[f64]) -> Result<()> {
    let cap = REGIME_MARGIN * params.curvature_cap();
    for &ell in ells {
        if !(ell >= 0.0) {
            return Err(CoreError::InvalidParameter(format!("curvature must be nonnegative, got {ell}")));
        }
        if ell > cap {
            return Err(CoreError::OutOfRegime { what: "ell", value: ell, cap });
        }
    }
    Ok(())
}

fn check_flat_compatible(forcing: &ForcingModel) -> Result<()> {
    if !forcing.w_independent() {
        return Err(CoreError::Precondition(format!(
            "forcing law '{}' has f1 or f2 depending on the longitudinal displacement; \
             the flat-beam comparison requires w-independent transverse forces",
            forcing.law.name()
        )));
    }
    Ok(())
}

/// Sup-in-time distance between the projected curved run and the flat run
/// for each curvature, with the same grid, step and initial data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularLimitReport {
    /// (curvature, sup over sample times of the projected distance).
    pub table: Vec<(f64, f64)>,
    pub strictly_decreasing: bool,
    /// Curved runs in table order; kept out of the serialized summary,
    /// used for per-run exports.
    #[serde(skip)]
    pub runs: Vec<crate::integrate::BresseTrajectory>,
    /// The flat reference run.
    #[serde(skip)]
    pub reference: Option<crate::integrate::TimoshenkoTrajectory>,
}

/// Run the curved system at each curvature in `ells` (given in decreasing
/// order) against the flat system from the same initial data, and tabulate
/// e(ell) = sup_t | P y_ell(t) - z(t) | in the flat-beam norm.
#[allow(clippy::too_many_arguments)]
pub fn singular_limit_experiment(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    cfg: &StepperConfig,
    ells: &[f64],
    initial: &State,
    horizon: f64,
    stride: usize,
) -> Result<SingularLimitReport> {
    check_flat_compatible(forcing)?;
    check_sweep_curvatures(params, ells)?;
    if ells.is_empty() {
        return Err(CoreError::Precondition("need at least one curvature".into()));
    }

    let flat_ops = assemble_timoshenko(&params.with_ell(0.0)?, grid)?;
    let reference = timoshenko_simulate(&initial.project(), horizon, &flat_ops, forcing, damping, cfg, stride)?;
    if let Some(f) = &reference.failure {
        return Err(CoreError::Precondition(format!("flat reference run failed at t = {}", f.t)));
    }

    let rows: Vec<Result<(f64, f64, crate::integrate::BresseTrajectory)>> = ells
        .par_iter()
        .map(|&ell| {
            let p = params.with_ell(ell)?;
            let ops = assemble(&p, grid)?;
            let traj = simulate(initial, horizon, &ops, forcing, damping, cfg, stride)?;
            if let Some(f) = &traj.failure {
                return Err(CoreError::Precondition(format!("curved run failed at t = {}", f.t)));
            }
            let mut sup = 0.0f64;
            for (s6, s4) in traj.states.iter().zip(&reference.states) {
                sup = sup.max(dist_h0(grid, &s6.project(), s4));
            }
            Ok((ell, sup, traj))
        })
        .collect();

    let mut table = Vec::with_capacity(rows.len());
    let mut runs = Vec::with_capacity(rows.len());
    for r in rows {
        let (ell, sup, traj) = r?;
        table.push((ell, sup));
        runs.push(traj);
    }
    let strictly_decreasing = table.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(SingularLimitReport { table, strictly_decreasing, runs, reference: Some(reference) })
}

/// Post-transient occupation sample standing in for the attractor.
///
/// The attractor itself is not computable; the proxy is the set of states
/// visited by an ensemble of trajectories after a transient cut, with all
/// time scales tied to the measured decay rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttractorSample<S> {
    pub states: Vec<S>,
    pub params: BeamParams,
    pub t_transient: f64,
    pub t_harvest: f64,
    pub stride_time: f64,
    /// Decay rate fitted on the probe run.
    pub alpha: f64,
    /// Largest phase-space norm inside the sample.
    pub max_norm: f64,
}

/// Ensemble and time-scale policy of the harvest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestProtocol {
    pub ensemble: usize,
    pub seed: u64,
    /// Linear energy of the random initial states.
    pub ic_energy: f64,
    /// Transient cut at settle_factor / alpha.
    pub settle_factor: f64,
    /// Harvest window of window_factor / alpha after the cut.
    pub window_factor: f64,
    /// Sample spacing of stride_factor / alpha.
    pub stride_factor: f64,
    /// Hard cap on the simulated horizon.
    pub max_time: f64,
}

impl Default for HarvestProtocol {
    fn default() -> Self {
        Self {
            ensemble: 16,
            seed: 3,
            ic_energy: 1.0,
            settle_factor: 10.0,
            window_factor: 10.0,
            stride_factor: 0.1,
            max_time: 150.0,
        }
    }
}

struct TimeScales {
    transient: f64,
    horizon: f64,
    stride_steps: usize,
    stride_time: f64,
    alpha: f64,
}

fn time_scales(alpha_fit: f64, protocol: &HarvestProtocol, dt: f64) -> TimeScales {
    let alpha = alpha_fit.max(1e-3);
    let transient = (protocol.settle_factor / alpha).min(0.8 * protocol.max_time).max(dt);
    let horizon = (transient + protocol.window_factor / alpha).min(protocol.max_time);
    let stride_steps = ((protocol.stride_factor / alpha / dt).round() as usize).max(1);
    TimeScales { transient, horizon, stride_steps, stride_time: stride_steps as f64 * dt, alpha: alpha_fit }
}

fn shared_ensemble(params: &BeamParams, grid: &Grid, protocol: &HarvestProtocol) -> Result<Vec<State>> {
    if protocol.ensemble == 0 {
        return Err(CoreError::Precondition("empty harvest ensemble".into()));
    }
    let flat = params.with_ell(0.0)?;
    let energies = vec![protocol.ic_energy; protocol.ensemble];
    Ok(energy_ensemble(&flat, grid, protocol.seed, &energies))
}

/// Harvest a post-transient sample of the curved system.
pub fn harvest_sample(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    cfg: &StepperConfig,
    protocol: &HarvestProtocol,
) -> Result<AttractorSample<State>> {
    let ops = assemble(params, grid)?;
    let ensemble = shared_ensemble(params, grid, protocol)?;

    let probe = simulate(&ensemble[0], protocol.max_time, &ops, forcing, damping, cfg, 20)?;
    let shift = params.length * forcing.m_f;
    let series: Vec<(f64, f64)> =
        probe.times.iter().zip(&probe.reports).map(|(t, r)| (*t, r.e_total + shift)).collect();
    let scales = time_scales(fit_decay(&series)?.alpha, protocol, cfg.dt);

    let harvested: Vec<Result<Vec<State>>> = ensemble
        .par_iter()
        .map(|ic| {
            let traj = simulate(ic, scales.horizon, &ops, forcing, damping, cfg, scales.stride_steps)?;
            if let Some(f) = &traj.failure {
                return Err(CoreError::Precondition(format!("harvest run failed at t = {}", f.t)));
            }
            Ok(traj.states.into_iter().filter(|s| s.t >= scales.transient).collect())
        })
        .collect();
    let mut states = Vec::new();
    for h in harvested {
        states.extend(h?);
    }
    let max_norm = states.iter().map(|s| norm_hl_sq(params, grid, s).sqrt()).fold(0.0, f64::max);
    Ok(AttractorSample {
        states,
        params: *params,
        t_transient: scales.transient,
        t_harvest: scales.horizon,
        stride_time: scales.stride_time,
        alpha: scales.alpha,
        max_norm,
    })
}

/// Harvest a post-transient sample of the flat system, from the projected
/// shared ensemble.
pub fn harvest_flat_sample(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    cfg: &StepperConfig,
    protocol: &HarvestProtocol,
) -> Result<AttractorSample<TimoshenkoState>> {
    check_flat_compatible(forcing)?;
    let ops = assemble_timoshenko(&params.with_ell(0.0)?, grid)?;
    let ensemble = shared_ensemble(params, grid, protocol)?;

    let probe = timoshenko_simulate(&ensemble[0].project(), protocol.max_time, &ops, forcing, damping, cfg, 20)?;
    let shift = params.length * forcing.m_f;
    let series: Vec<(f64, f64)> =
        probe.times.iter().zip(&probe.reports).map(|(t, r)| (*t, r.e_total + shift)).collect();
    let scales = time_scales(fit_decay(&series)?.alpha, protocol, cfg.dt);

    let harvested: Vec<Result<Vec<TimoshenkoState>>> = ensemble
        .par_iter()
        .map(|ic| {
            let traj =
                timoshenko_simulate(&ic.project(), scales.horizon, &ops, forcing, damping, cfg, scales.stride_steps)?;
            if let Some(f) = &traj.failure {
                return Err(CoreError::Precondition(format!("harvest run failed at t = {}", f.t)));
            }
            Ok(traj.states.into_iter().filter(|s| s.t >= scales.transient).collect())
        })
        .collect();
    let mut states = Vec::new();
    for h in harvested {
        states.extend(h?);
    }
    let max_norm = states.iter().map(|s| norm_h0_sq(grid, s).sqrt()).fold(0.0, f64::max);
    Ok(AttractorSample {
        states,
        params: *params,
        t_transient: scales.transient,
        t_harvest: scales.horizon,
        stride_time: scales.stride_time,
        alpha: scales.alpha,
        max_norm,
    })
}

/// Size proxies for the smoothness of harvested states: largest discrete
/// acceleration norm (from the equations of motion) and largest second
/// difference norm across the sample.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegularityReport {
    pub max_accel_norm: f64,
    pub max_second_diff_norm: f64,
}

/// Evaluate the acceleration a = -M^{-1}(A q + g(v) + f(q)) and the second
/// differences of the displacement fields over a harvested sample.
pub fn regularity_probe(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    sample: &AttractorSample<State>,
) -> Result<RegularityReport> {
    let ops = assemble(params, grid)?;
    let n = grid.n();
    let h = grid.h();
    let mut max_accel = 0.0f64;
    let mut max_dxx = 0.0f64;
    let mut q = Vec::new();
    let mut v = Vec::new();
    let mut aq = vec![0.0; 3 * n];
    for s in &sample.states {
        s.to_packed(&mut q, &mut v);
        ops.apply_stiffness(&q, &mut aq);
        let mass = [params.rho1, params.rho2, params.rho1];
        let mut accel_sq = 0.0;
        for node in 0..n {
            let base = 3 * node;
            let x = [q[base], q[base + 1], q[base + 2]];
            let f = forcing.grad(&x);
            for c in 0..3 {
                let g = damping.eval(c, v[base + c]);
                let a = -(aq[base + c] + g + f[c]) / mass[c];
                accel_sq += a * a;
            }
        }
        max_accel = max_accel.max((h * accel_sq).sqrt());
        let dxx_sq = l2_norm_sq(h, &ops.dxx(&s.phi))
            + l2_norm_sq(h, &ops.dxx(&s.psi))
            + l2_norm_sq(h, &ops.dxx(&s.w));
        max_dxx = max_dxx.max(dxx_sq.sqrt());
    }
    Ok(RegularityReport { max_accel_norm: max_accel, max_second_diff_norm: max_dxx })
}

/// Semidistance table of projected curved samples against the flat sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemicontinuityReport {
    /// (curvature, semidistance of the projected sample to the flat sample).
    pub table: Vec<(f64, f64)>,
    /// Consecutive entries nonincreasing within the noise tolerance.
    pub nonincreasing_within_tol: bool,
    pub noise_tolerance: f64,
    pub flat_sample_size: usize,
    pub regularity: Vec<RegularityReport>,
}

/// Harvest attractor samples at each curvature (decreasing order) and for
/// the flat system, then tabulate the one-sided semidistance
/// d(P sample_ell, sample_flat) in the flat-beam norm.
pub fn upper_semicontinuity_experiment(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    cfg: &StepperConfig,
    ells: &[f64],
    protocol: &HarvestProtocol,
) -> Result<SemicontinuityReport> {
    check_flat_compatible(forcing)?;
    if !damping.globally_lipschitz {
        return Err(CoreError::Precondition(
            "the attractor comparison requires globally Lipschitz damping".into(),
        ));
    }
    check_sweep_curvatures(params, ells)?;
    if ells.is_empty() {
        return Err(CoreError::Precondition("need at least one curvature".into()));
    }

    let flat_sample = harvest_flat_sample(params, forcing, damping, grid, cfg, protocol)?;

    let rows: Vec<Result<((f64, f64), RegularityReport)>> = ells
        .par_iter()
        .map(|&ell| {
            let p = params.with_ell(ell)?;
            let sample = harvest_sample(&p, forcing, damping, grid, cfg, protocol)?;
            let projected: Vec<TimoshenkoState> = sample.states.iter().map(|s| s.project()).collect();
            let d = hausdorff_by(&projected, &flat_sample.states, |a, b| dist_h0(grid, a, b))?;
            let reg = regularity_probe(&p, forcing, damping, grid, &sample)?;
            Ok(((ell, d), reg))
        })
        .collect();

    let mut table = Vec::new();
    let mut regularity = Vec::new();
    for r in rows {
        let ((ell, d), reg) = r?;
        table.push((ell, d));
        regularity.push(reg);
    }
    let noise_tolerance = 0.2;
    let nonincreasing_within_tol =
        table.windows(2).all(|w| w[1].1 <= (1.0 + noise_tolerance) * w[0].1 + 1e-12);
    Ok(SemicontinuityReport {
        table,
        nonincreasing_within_tol,
        noise_tolerance,
        flat_sample_size: flat_sample.states.len(),
        regularity,
    })
}
