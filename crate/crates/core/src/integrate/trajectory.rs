use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::disc::{BresseOperators, ElasticStencil, State, TimoshenkoOperators, TimoshenkoState};
use crate::error::{CoreError, Result};
use crate::integrate::stepper::{midpoint_step, StepperConfig, SystemRef, Workspace};
use crate::model::{
    DampingModel, ForcingModel, PointDamping, PointForcing, TimoshenkoDamping, TimoshenkoForcing,
};

/// Energy bookkeeping at one sample time.
///
/// `identity_residual` is the defect of the energy identity
/// E_total(t) + cumulative dissipation - E_total(0); the kinetic and
/// elastic contributions cancel exactly under the midpoint rule, so the
/// residual measures the quadrature error of the potential term and
/// shrinks at second order in dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Linear (quadratic-form) energy, >= 0.
    pub e: f64,
    /// Linear energy plus the integrated potential.
    pub e_total: f64,
    /// Instantaneous dissipation integral, >= 0 for monotone damping.
    pub dissipation_rate: f64,
    /// Cumulative energy-identity defect.
    pub identity_residual: f64,
}

/// Why a run stopped early.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepFailure {
    pub t: f64,
    pub message: String,
}

/// Sampled states and energy reports of one run. `states`, `reports` and
/// `times` are parallel; on failure the trajectory holds everything up to
/// the last completed step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub reports: Vec<EnergyReport>,
    pub states: Vec<S>,
    pub failure: Option<StepFailure>,
}

pub type BresseTrajectory = Trajectory<State>;
pub type TimoshenkoTrajectory = Trajectory<TimoshenkoState>;

impl<S> Trajectory<S> {
    pub fn last_state(&self) -> &S {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds at least the initial state")
    }

    /// (t, E_total) series.
    pub fn total_energy_series(&self) -> Vec<(f64, f64)> {
        self.times.iter().zip(&self.reports).map(|(t, r)| (*t, r.e_total)).collect()
    }

    /// (t, E) series of the linear energy.
    pub fn linear_energy_series(&self) -> Vec<(f64, f64)> {
        self.times.iter().zip(&self.reports).map(|(t, r)| (*t, r.e)).collect()
    }

    /// Largest energy-identity defect along the run.
    pub fn max_identity_residual(&self) -> f64 {
        self.reports.iter().map(|r| r.identity_residual.abs()).fold(0.0, f64::max)
    }

    /// Columns: t, E, Etotal, dissipation_rate, identity_residual.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,E,Etotal,dissipation_rate,identity_residual")?;
        for (t, r) in self.times.iter().zip(&self.reports) {
            writeln!(out, "{},{},{},{},{}", t, r.e, r.e_total, r.dissipation_rate, r.identity_residual)?;
        }
        Ok(())
    }

    /// Count of samples violating the coercivity bound
    /// E_total >= beta0 * E - L * m_f (with a round-off allowance).
    pub fn coercivity_violations(&self, beta0: f64, length: f64, m_f: f64) -> usize {
        self.reports
            .iter()
            .filter(|r| {
                let slack = 1e-12 * (1.0 + r.e.abs() + r.e_total.abs());
                r.e_total < beta0 * r.e - length * m_f - slack
            })
            .count()
    }
}

impl Trajectory<State> {
    /// Long-format nodal snapshots: t, x, phi, psi, w, phit, psit, wt.
    pub fn write_snapshots_csv<W: Write>(&self, grid: &crate::disc::Grid, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,x,phi,psi,w,phit,psit,wt")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            for j in 0..s.n() {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    t,
                    grid.node(j),
                    s.phi[j],
                    s.psi[j],
                    s.w[j],
                    s.phit[j],
                    s.psit[j],
                    s.wt[j]
                )?;
            }
        }
        Ok(())
    }
}

struct EnergyParts<'a, const B: usize> {
    mass: [f64; B],
    h: f64,
    stencil: &'a ElasticStencil<B>,
}

impl<const B: usize> EnergyParts<'_, B> {
    fn linear_energy(&self, q: &[f64], v: &[f64]) -> f64 {
        let n = q.len() / B;
        let mut kin = 0.0;
        for node in 0..n {
            for c in 0..B {
                let s = v[B * node + c];
                kin += self.mass[c] * s * s;
            }
        }
        0.5 * self.h * kin + self.stencil.energy(self.h, q)
    }

    fn potential(&self, forcing: &impl PointForcing<B>, q: &[f64]) -> f64 {
        let n = q.len() / B;
        let mut acc = forcing.density(&[0.0; B]);
        for node in 0..n {
            let mut x = [0.0; B];
            x.copy_from_slice(&q[B * node..B * node + B]);
            acc += forcing.density(&x);
        }
        self.h * acc
    }

    fn dissipation_rate(&self, damping: &impl PointDamping<B>, v: &[f64]) -> f64 {
        let n = v.len() / B;
        let mut acc = 0.0;
        for node in 0..n {
            for c in 0..B {
                let s = v[B * node + c];
                acc += damping.eval(c, s) * s;
            }
        }
        self.h * acc
    }
}

struct RawRun {
    times: Vec<f64>,
    reports: Vec<EnergyReport>,
    snapshots: Vec<(f64, Vec<f64>, Vec<f64>)>,
    failure: Option<StepFailure>,
}

#[allow(clippy::too_many_arguments)]
fn run_simulation<const B: usize>(
    mut q: Vec<f64>,
    mut v: Vec<f64>,
    t0: f64,
    horizon: f64,
    sys: &SystemRef<B>,
    energy: &EnergyParts<B>,
    forcing: &impl PointForcing<B>,
    damping: &impl PointDamping<B>,
    cfg: &StepperConfig,
    stride: usize,
) -> Result<RawRun> {
    cfg.validate()?;
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(CoreError::InvalidParameter(format!("horizon must be nonnegative, got {horizon}")));
    }
    let stride = stride.max(1);
    let steps = (horizon / cfg.dt).ceil() as usize;

    let e0 = energy.linear_energy(&q, &v);
    let p0 = energy.potential(forcing, &q);
    let total0 = e0 + p0;
    let mut cumulative_dissipation = 0.0;

    let mut run = RawRun { times: Vec::new(), reports: Vec::new(), snapshots: Vec::new(), failure: None };
    fn record<const B: usize>(
        run: &mut RawRun,
        energy: &EnergyParts<B>,
        forcing: &impl PointForcing<B>,
        damping: &impl PointDamping<B>,
        total0: f64,
        t: f64,
        q: &[f64],
        v: &[f64],
        cum: f64,
    ) {
        let e = energy.linear_energy(q, v);
        let e_total = e + energy.potential(forcing, q);
        run.times.push(t);
        run.reports.push(EnergyReport {
            e,
            e_total,
            dissipation_rate: energy.dissipation_rate(damping, v),
            identity_residual: e_total + cum - total0,
        });
        run.snapshots.push((t, q.to_vec(), v.to_vec()));
    }
    record(&mut run, energy, forcing, damping, total0, t0, &q, &v, 0.0);

    let mut ws = Workspace::new(sys.n, sys.stiff_lower, *sys.stiff_upper);
    for step_index in 1..=steps {
        let t = t0 + step_index as f64 * cfg.dt;
        match midpoint_step(&mut q, &mut v, sys, forcing, damping, cfg, &mut ws) {
            Ok(info) => {
                cumulative_dissipation += info.dissipation_increment;
                if step_index % stride == 0 || step_index == steps {
                    record(&mut run, energy, forcing, damping, total0, t, &q, &v, cumulative_dissipation);
                }
            }
            Err(e) => {
                run.failure = Some(StepFailure { t, message: e.to_string() });
                let t_last = t - cfg.dt;
                if run.times.last().map(|lt| *lt < t_last - 0.5 * cfg.dt).unwrap_or(true) {
                    record(&mut run, energy, forcing, damping, total0, t_last, &q, &v, cumulative_dissipation);
                }
                break;
            }
        }
    }

    Ok(run)
}

fn bresse_system<'a>(ops: &'a BresseOperators) -> SystemRef<'a, 3> {
    SystemRef {
        mass: [ops.params.rho1, ops.params.rho2, ops.params.rho1],
        stiff_diag: ops.stencil().diag_block(),
        stiff_upper: ops.stencil().upper_block(),
        stiff_lower: ops.stencil().lower_block(),
        h: ops.grid.h(),
        n: ops.grid.n(),
    }
}

fn timoshenko_system<'a>(ops: &'a TimoshenkoOperators) -> SystemRef<'a, 2> {
    SystemRef {
        mass: [ops.params.rho1, ops.params.rho2],
        stiff_diag: ops.stencil().diag_block(),
        stiff_upper: ops.stencil().upper_block(),
        stiff_lower: ops.stencil().lower_block(),
        h: ops.grid.h(),
        n: ops.grid.n(),
    }
}

/// One implicit-midpoint step of the curved-beam system.
pub fn step(
    state: &State,
    ops: &BresseOperators,
    forcing: &ForcingModel,
    damping: &DampingModel,
    cfg: &StepperConfig,
) -> Result<State> {
    cfg.validate()?;
    if state.n() != ops.grid.n() {
        return Err(CoreError::Precondition("state and operators live on different grids".into()));
    }
    let sys = bresse_system(ops);
    let (mut q, mut v) = (Vec::new(), Vec::new());
    state.to_packed(&mut q, &mut v);
    let mut ws = Workspace::new(sys.n, sys.stiff_lower, *sys.stiff_upper);
    midpoint_step(&mut q, &mut v, &sys, forcing, damping, cfg, &mut ws)
        .map_err(|e| CoreError::StepFailed { t: state.t, source: Box::new(e) })?;
    Ok(State::from_packed(state.t + cfg.dt, &q, &v))
}

/// Integrate the curved-beam system over `[t0, t0 + horizon]`, sampling
/// states and energy reports every `stride` steps (the initial and final
/// states are always sampled). Step failures terminate the run and are
/// returned inside the trajectory.
pub fn simulate(
    initial: &State,
    horizon: f64,
    ops: &BresseOperators,
    forcing: &ForcingModel,
    damping: &DampingModel,
    cfg: &StepperConfig,
    stride: usize,
) -> Result<BresseTrajectory> {
    if initial.n() != ops.grid.n() {
        return Err(CoreError::Precondition("state and operators live on different grids".into()));
    }
    let sys = bresse_system(ops);
    let energy = EnergyParts { mass: sys.mass, h: sys.h, stencil: ops.stencil() };
    let (mut q, mut v) = (Vec::new(), Vec::new());
    initial.to_packed(&mut q, &mut v);
    let raw = run_simulation(q, v, initial.t, horizon, &sys, &energy, forcing, damping, cfg, stride)?;
    Ok(Trajectory {
        times: raw.times,
        reports: raw.reports,
        states: raw.snapshots.into_iter().map(|(t, q, v)| State::from_packed(t, &q, &v)).collect(),
        failure: raw.failure,
    })
}

/// Integrate the flat-beam system. The forcing must have its first two
/// components independent of the longitudinal displacement.
pub fn timoshenko_simulate(
    initial: &TimoshenkoState,
    horizon: f64,
    ops: &TimoshenkoOperators,
    forcing: &ForcingModel,
    damping: &DampingModel,
    cfg: &StepperConfig,
    stride: usize,
) -> Result<TimoshenkoTrajectory> {
    if initial.n() != ops.grid.n() {
        return Err(CoreError::Precondition("state and operators live on different grids".into()));
    }
    let flat_forcing = TimoshenkoForcing::new(forcing)?;
    let flat_damping = TimoshenkoDamping(damping);
    let sys = timoshenko_system(ops);
    let energy = EnergyParts { mass: sys.mass, h: sys.h, stencil: ops.stencil() };
    let (mut q, mut v) = (Vec::new(), Vec::new());
    initial.to_packed(&mut q, &mut v);
    let raw =
        run_simulation(q, v, initial.t, horizon, &sys, &energy, &flat_forcing, &flat_damping, cfg, stride)?;
    Ok(Trajectory {
        times: raw.times,
        reports: raw.reports,
        states: raw
            .snapshots
            .into_iter()
            .map(|(t, q, v)| TimoshenkoState::from_packed(t, &q, &v))
            .collect(),
        failure: raw.failure,
    })
}
