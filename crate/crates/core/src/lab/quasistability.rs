use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc::{l2p_norm, norm_hl_sq, Grid};
use crate::error::{CoreError, Result};
use crate::integrate::{simulate, StepperConfig};
use crate::lab::decay::fit_decay;
use crate::lab::ensemble::{random_state, rescale_to_energy, rescale_to_norm};
use crate::model::{BeamParams, DampingModel, ForcingModel};

/// Trajectory-pair protocol for the stabilizability inequality
/// E(t) <= gamma_B E(0) e^{-alpha_B t} + C_B sup_{s<=t} compensator(s),
/// where E is the linear energy of the difference of two runs and the
/// compensator is the squared L^{2p} size of the displacement difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasistabilityConfig {
    pub pairs: usize,
    /// Perturbation sizes, cycled through the pairs.
    pub epsilons: Vec<f64>,
    pub horizon: f64,
    pub stride: usize,
    pub seed: u64,
    /// Linear energy of the base states.
    pub base_energy: f64,
}

impl Default for QuasistabilityConfig {
    fn default() -> Self {
        Self { pairs: 10, epsilons: vec![1e-2, 1e-3], horizon: 20.0, stride: 10, seed: 2, base_energy: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairStats {
    pub epsilon: f64,
    /// Difference energy at time zero.
    pub e0: f64,
    /// Fitted decay rate of the difference energy.
    pub alpha: f64,
    /// Worst violation of the inequality with the shared fitted constants.
    pub max_violation: f64,
    /// (t, difference energy, running compensator sup); kept out of the
    /// serialized summary, used for per-pair exports.
    #[serde(skip)]
    pub rows: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasistabilityReport {
    pub gamma_b: f64,
    pub alpha_b: f64,
    pub c_b: f64,
    pub feasible: bool,
    /// Worst constraint violation across all pairs and sample times;
    /// nonpositive (up to round-off) when feasible.
    pub max_violation: f64,
    /// Exponent of the compensator norm (2p).
    pub two_p: f64,
    pub pairs: Vec<PairStats>,
}

struct PairSeries {
    epsilon: f64,
    /// (t, difference energy, running compensator sup)
    rows: Vec<(f64, f64, f64)>,
}

fn gamma_needed(constraints: &[(f64, f64, f64)], c: f64) -> f64 {
    // constraints are rows (e, a, b) requiring gamma * a + c * b >= e
    let mut g = 0.0f64;
    for &(e, a, b) in constraints {
        let lack = e - c * b;
        if a > 1e-300 {
            g = g.max(lack / a);
        } else if lack > 0.0 {
            return f64::INFINITY;
        }
    }
    g
}

/// Simulate trajectory pairs, fit shared constants (gamma_B, alpha_B, C_B)
/// making the stabilizability inequality hold at every sample time of every
/// pair, and report the fit together with the residual violations.
///
/// Requires damping declared globally Lipschitz.
pub fn quasistability_probe(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    grid: &Grid,
    cfg: &StepperConfig,
    qcfg: &QuasistabilityConfig,
) -> Result<QuasistabilityReport> {
    if !damping.globally_lipschitz {
        return Err(CoreError::Precondition(
            "the stabilizability probe requires globally Lipschitz damping".into(),
        ));
    }
    if qcfg.pairs == 0 || qcfg.epsilons.is_empty() {
        return Err(CoreError::Precondition("need at least one trajectory pair".into()));
    }
    let ops = crate::disc::assemble(params, grid)?;
    let two_p = 2.0 * forcing.p;

    let mut rng = StdRng::seed_from_u64(qcfg.seed);
    let mut jobs = Vec::new();
    for i in 0..qcfg.pairs {
        let eps = qcfg.epsilons[i % qcfg.epsilons.len()];
        let mut base = random_state(grid, &mut rng, 1.0);
        rescale_to_energy(params, grid, &mut base, qcfg.base_energy);
        let mut dir = random_state(grid, &mut rng, 1.0);
        if i % 2 == 0 {
            // velocity-only perturbation
            dir.phi.iter_mut().for_each(|v| *v = 0.0);
            dir.psi.iter_mut().for_each(|v| *v = 0.0);
            dir.w.iter_mut().for_each(|v| *v = 0.0);
        }
        rescale_to_norm(grid, &mut dir, 1.0);
        let partner = base.add_scaled(&dir, eps);
        jobs.push((eps, base, partner));
    }

    let series: Vec<Result<PairSeries>> = jobs
        .par_iter()
        .map(|(eps, base, partner)| {
            let a = simulate(base, qcfg.horizon, &ops, forcing, damping, cfg, qcfg.stride)?;
            let b = simulate(partner, qcfg.horizon, &ops, forcing, damping, cfg, qcfg.stride)?;
            if let Some(f) = a.failure.as_ref().or(b.failure.as_ref()) {
                return Err(CoreError::Precondition(format!("pair run failed at t = {}", f.t)));
            }
            let mut rows = Vec::with_capacity(a.states.len());
            let mut comp_sup = 0.0f64;
            let h = grid.h();
            for (sa, sb) in a.states.iter().zip(&b.states) {
                let diff = sa.difference(sb);
                let e = 0.5 * norm_hl_sq(params, grid, &diff);
                let comp = l2p_norm(h, &diff.phi, forcing.p).powi(2)
                    + l2p_norm(h, &diff.psi, forcing.p).powi(2)
                    + l2p_norm(h, &diff.w, forcing.p).powi(2);
                comp_sup = comp_sup.max(comp);
                rows.push((sa.t, e, comp_sup));
            }
            Ok(PairSeries { epsilon: *eps, rows })
        })
        .collect();

    let mut pairs_raw = Vec::new();
    for s in series {
        pairs_raw.push(s?);
    }

    // shared decay rate: the most conservative positive per-pair rate
    let mut alpha_b = f64::INFINITY;
    let mut any_signal = false;
    let mut per_pair_alpha = Vec::new();
    for p in &pairs_raw {
        let energy_series: Vec<(f64, f64)> = p.rows.iter().map(|r| (r.0, r.1)).collect();
        let fit = fit_decay(&energy_series)?;
        per_pair_alpha.push(fit.alpha);
        if !fit.degenerate && p.rows[0].1 > 0.0 {
            any_signal = true;
            alpha_b = alpha_b.min(fit.alpha);
        }
    }
    let alpha_b = if any_signal { 0.9 * alpha_b } else { 0.0 };

    // pooled linear constraints: e <= gamma * e0 exp(-alpha t) + c * comp
    let mut constraints = Vec::new();
    for p in &pairs_raw {
        let e0 = p.rows[0].1;
        for &(t, e, comp) in &p.rows {
            constraints.push((e, e0 * (-alpha_b * t).exp(), comp));
        }
    }
    // minimize gamma + c over the feasible half-planes: the profile
    // gamma_needed(c) is convex piecewise linear, so golden-section works
    let c_hi = constraints
        .iter()
        .filter(|(_, _, b)| *b > 1e-300)
        .map(|(e, _, b)| e / b)
        .fold(0.0f64, f64::max);
    let gr = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, c_hi.max(1e-12));
    let cost = |c: f64| c + gamma_needed(&constraints, c);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = cost(x2);
        }
    }
    let c_b = 0.5 * (lo + hi);
    let gamma_b = gamma_needed(&constraints, c_b).max(1.0);

    let violation = |rows: &[(f64, f64, f64)], e0: f64| {
        rows.iter()
            .map(|&(t, e, comp)| e - gamma_b * e0 * (-alpha_b * t).exp() - c_b * comp)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut pairs = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for (p, alpha) in pairs_raw.iter().zip(per_pair_alpha) {
        let e0 = p.rows[0].1;
        let v = violation(&p.rows, e0);
        max_violation = max_violation.max(v);
        pairs.push(PairStats { epsilon: p.epsilon, e0, alpha, max_violation: v, rows: p.rows.clone() });
    }
    let scale = constraints.iter().map(|(e, _, _)| *e).fold(0.0f64, f64::max).max(1e-300);
    let feasible = gamma_b.is_finite() && max_violation <= 1e-9 * scale;

    Ok(QuasistabilityReport { gamma_b, alpha_b, c_b, feasible, max_violation, two_p, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::make_grid;

    #[test]
    fn non_lipschitz_damping_is_rejected() {
        let params = BeamParams::default();
        let grid = make_grid(params.length, 8).unwrap();
        let cfg = StepperConfig::new(1e-2).unwrap();
        let err = quasistability_probe(
            &params,
            &ForcingModel::builtin(0.0, 0.0).unwrap(),
            &DampingModel::saturating_cubic(),
            &grid,
            &cfg,
            &QuasistabilityConfig::default(),
        );
        assert!(matches!(err, Err(CoreError::Precondition(_))));
    }

    #[test]
    fn identical_pair_is_trivially_feasible() {
        let params = BeamParams::default();
        let grid = make_grid(params.length, 12).unwrap();
        let cfg = StepperConfig::new(1e-2).unwrap();
        let qcfg = QuasistabilityConfig {
            pairs: 1,
            epsilons: vec![0.0],
            horizon: 1.0,
            stride: 5,
            ..QuasistabilityConfig::default()
        };
        let report = quasistability_probe(
            &params,
            &ForcingModel::builtin(0.0, 0.0).unwrap(),
            &DampingModel::linear(1.0).unwrap(),
            &grid,
            &cfg,
            &qcfg,
        )
        .unwrap();
        assert!(report.feasible);
        assert!(report.pairs[0].e0 <= 1e-28);
    }

    #[test]
    fn velocity_perturbed_pairs_fit_with_positive_rate() {
        let params = BeamParams::default();
        let grid = make_grid(params.length, 24).unwrap();
        let cfg = StepperConfig::new(1e-2).unwrap();
        let qcfg = QuasistabilityConfig {
            pairs: 2,
            epsilons: vec![1e-2, 1e-3],
            horizon: 12.0,
            stride: 5,
            ..QuasistabilityConfig::default()
        };
        let report = quasistability_probe(
            &params,
            &ForcingModel::builtin(0.0, 0.0).unwrap(),
            &DampingModel::clipped_cubic(1.0).unwrap(),
            &grid,
            &cfg,
            &qcfg,
        )
        .unwrap();
        assert!(report.feasible, "violation {}", report.max_violation);
        assert!(report.alpha_b > 0.0, "alpha_b = {}", report.alpha_b);
        assert_eq!(report.two_p, 6.0);
    }
}
