use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc::{norm_hl_sq, Grid};
use crate::error::{CoreError, Result};
use crate::integrate::{simulate, StepperConfig};
use crate::lab::decay::fit_decay;
use crate::lab::ensemble::energy_ensemble;
use crate::model::{BeamParams, DampingModel, ForcingModel};

/// Protocol for the eventual-radius estimate. The transient and harvest
/// window are tied to the measured decay rate of a probe run, capped by
/// `max_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingProtocol {
    pub ensemble: usize,
    /// Initial linear energies, cycled through the ensemble.
    pub ic_energies: Vec<f64>,
    pub seed: u64,
    /// Transient cut: settle_factor / alpha.
    pub settle_factor: f64,
    /// Harvest window: window_factor / alpha.
    pub window_factor: f64,
    /// Hard cap on the simulated horizon per run.
    pub max_time: f64,
    /// Sampling stride in steps.
    pub stride: usize,
}

impl Default for AbsorbingProtocol {
    fn default() -> Self {
        Self {
            ensemble: 8,
            ic_energies: vec![1.0, 10.0, 100.0],
            seed: 1,
            settle_factor: 10.0,
            window_factor: 10.0,
            max_time: 120.0,
            stride: 20,
        }
    }
}

/// Eventual radius at one curvature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllRadius {
    pub ell: f64,
    /// sup over the ensemble of the tail maximum of the energy norm.
    pub radius: f64,
    /// Fitted decay rate of the probe run.
    pub alpha: f64,
    pub transient: f64,
    pub horizon: f64,
    /// Runs excluded after divergence.
    pub excluded: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbsorbingReport {
    pub per_ell: Vec<EllRadius>,
    /// Largest radius over the curvature list.
    pub uniform_radius: f64,
    /// (max - min) / min over the curvature list, 0 when all radii are tiny.
    pub spread: f64,
    /// spread <= 25%.
    pub ell_uniform: bool,
}

fn tail_radius(
    params: &BeamParams,
    grid: &Grid,
    traj: &crate::integrate::BresseTrajectory,
    t_start: f64,
) -> Option<f64> {
    if traj.failure.is_some() {
        return None;
    }
    let mut r = 0.0f64;
    let mut seen = false;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        if *t >= t_start {
            let n2 = norm_hl_sq(params, grid, s);
            if !n2.is_finite() {
                return None;
            }
            r = r.max(n2.sqrt());
            seen = true;
        }
    }
    if seen {
        Some(r)
    } else {
        None
    }
}

/// Estimate the eventual radius sup over the ensemble of
/// limsup_t |S(t) y| in the energy norm, for each curvature in `ells`, and
/// check that the radii agree across curvatures within 25%.
///
/// The initial ensemble is shared across curvatures. Diverged runs are
/// excluded and counted per curvature.
pub fn absorbing_radius(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    cfg: &StepperConfig,
    ells: &[f64],
    protocol: &AbsorbingProtocol,
) -> Result<AbsorbingReport> {
    if ells.is_empty() {
        return Err(CoreError::Precondition("need at least one curvature".into()));
    }
    let cap = params.curvature_cap();
    for &ell in ells {
        if ell >= cap {
            return Err(CoreError::OutOfRegime { what: "ell", value: ell, cap });
        }
    }
    if protocol.ensemble == 0 || protocol.ic_energies.is_empty() {
        return Err(CoreError::Precondition("empty ensemble".into()));
    }

    // identical initial states across curvatures: energies are normalized
    // with the flat-beam coefficients
    let flat = params.with_ell(0.0)?;
    let energies: Vec<f64> = (0..protocol.ensemble)
        .map(|i| protocol.ic_energies[i % protocol.ic_energies.len()])
        .collect();
    let ensemble = energy_ensemble(&flat, grid, protocol.seed, &energies);

    let per_ell: Vec<Result<EllRadius>> = ells
        .par_iter()
        .map(|&ell| {
            let p = params.with_ell(ell)?;
            let ops = crate::disc::assemble(&p, grid)?;
            // probe run fixes the time scales
            let probe = simulate(&ensemble[0], protocol.max_time, &ops, forcing, damping, cfg, protocol.stride)?;
            let shift = p.length * forcing.m_f;
            let series: Vec<(f64, f64)> =
                probe.times.iter().zip(&probe.reports).map(|(t, r)| (*t, r.e_total + shift)).collect();
            let fit = fit_decay(&series)?;
            let alpha = fit.alpha.max(1e-3);
            let transient = (protocol.settle_factor / alpha).min(0.8 * protocol.max_time).max(cfg.dt);
            let horizon = (transient + protocol.window_factor / alpha).min(protocol.max_time);

            let radii: Vec<Option<f64>> = ensemble
                .par_iter()
                .map(|ic| {
                    let traj = simulate(ic, horizon, &ops, forcing, damping, cfg, protocol.stride).ok()?;
                    tail_radius(&p, grid, &traj, transient)
                })
                .collect();
            let excluded = radii.iter().filter(|r| r.is_none()).count();
            if excluded == radii.len() {
                return Err(CoreError::Precondition("all ensemble runs diverged".into()));
            }
            let radius = radii.iter().flatten().fold(0.0f64, |a, r| a.max(*r));
            Ok(EllRadius { ell, radius, alpha: fit.alpha, transient, horizon, excluded })
        })
        .collect();

    let mut rows = Vec::with_capacity(per_ell.len());
    for r in per_ell {
        rows.push(r?);
    }
    let max = rows.iter().map(|r| r.radius).fold(0.0f64, f64::max);
    let min = rows.iter().map(|r| r.radius).fold(f64::INFINITY, f64::min);
    let spread = if max <= 1e-9 { 0.0 } else { (max - min) / min.max(1e-300) };
    Ok(AbsorbingReport { uniform_radius: max, spread, ell_uniform: spread <= 0.25, per_ell: rows })
}
