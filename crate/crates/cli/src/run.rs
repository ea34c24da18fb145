//! Experiment dispatch and artifact output: every run writes a resolved
//! manifest, a JSON summary and the per-run CSV files into one directory.
//! All randomness is seeded from the config, and identical configurations
//! produce byte-identical summaries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bresse_core::disc::{assemble, quad_potential};
use bresse_core::equilibria::{check_equilibrium_bound, find_equilibria, MultiStartConfig};
use bresse_core::integrate::simulate;
use bresse_core::lab::{
    fit_decay, quasistability_probe, singular_limit_experiment, upper_semicontinuity_experiment,
    HarvestProtocol, QuasistabilityConfig,
};
use bresse_core::model::analytic_constants;
use bresse_core::SampleSpec;
use serde::Serialize;

use crate::config::{check_regime, ConfigIssue, ExperimentKind, RunConfig};

#[derive(Debug)]
pub enum RunError {
    Config(Vec<ConfigIssue>),
    Numerical(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) | RunError::Io(_) => 3,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RunError::Config(issues) => serde_json::json!({
                "error": { "kind": "config", "issues": issues }
            }),
            RunError::Numerical(m) => serde_json::json!({
                "error": { "kind": "numerical", "message": m }
            }),
            RunError::Io(m) => serde_json::json!({
                "error": { "kind": "io", "message": m }
            }),
        }
    }
}

impl From<bresse_core::CoreError> for RunError {
    fn from(e: bresse_core::CoreError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut buf = serde_json::to_vec_pretty(value).map_err(|e| RunError::Io(e.to_string()))?;
    buf.push(b'\n');
    fs::write(path, buf)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    config: &'a RunConfig,
    grid_n: usize,
    grid_h: f64,
    dt: f64,
    newton_tol: f64,
    seed: u64,
    curvature_cap: f64,
    ell_sweep: Vec<f64>,
    workers: Option<usize>,
}

pub struct RunContext {
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
}

/// Run one experiment against a validated config, writing `manifest.json`,
/// `summary.json` and the experiment's CSV files into the output directory.
pub fn execute(kind: ExperimentKind, cfg: &RunConfig, ctx: &RunContext) -> Result<(), RunError> {
    if let Some(declared) = cfg.experiment.kind {
        if declared != kind {
            return Err(RunError::Config(vec![ConfigIssue {
                path: "experiment.kind".into(),
                message: format!(
                    "config declares '{}' but the '{}' command was invoked",
                    declared.name(),
                    kind.name()
                ),
            }]));
        }
    }
    let mut issues = Vec::new();
    check_regime(cfg, kind, &mut issues);
    if !issues.is_empty() {
        return Err(RunError::Config(issues));
    }

    fs::create_dir_all(&ctx.out_dir)?;
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let stepper = cfg.stepper(&params, &grid)?;
    let sweep = cfg.ell_sweep(kind);

    let manifest = Manifest {
        experiment: kind.name(),
        config: cfg,
        grid_n: grid.n(),
        grid_h: grid.h(),
        dt: stepper.dt,
        newton_tol: stepper.newton_tol,
        seed: cfg.experiment.seed,
        curvature_cap: params.curvature_cap(),
        ell_sweep: sweep.clone(),
        workers: ctx.workers,
    };
    write_json(&ctx.out_dir.join("manifest.json"), &manifest)?;
    fs::write(ctx.out_dir.join("config_resolved.toml"), cfg.emit())?;

    match kind {
        ExperimentKind::Simulate => run_simulate(cfg, ctx),
        ExperimentKind::DecayFit => run_decay_fit(cfg, ctx),
        ExperimentKind::Equilibria => run_equilibria(cfg, ctx),
        ExperimentKind::SingularLimit => run_singular_limit(cfg, ctx, &sweep),
        ExperimentKind::Semicontinuity => run_semicontinuity(cfg, ctx, &sweep),
        ExperimentKind::Quasistability => run_quasistability(cfg, ctx),
        ExperimentKind::Verify => run_verify(cfg, ctx),
    }
}

fn csv_file(dir: &Path, name: &str) -> Result<std::io::BufWriter<fs::File>, RunError> {
    Ok(std::io::BufWriter::new(fs::File::create(dir.join(name))?))
}

fn run_simulate(cfg: &RunConfig, ctx: &RunContext) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let ops = assemble(&params, &grid)?;
    let forcing = cfg.forcing()?;
    let damping = cfg.damping()?;
    let stepper = cfg.stepper(&params, &grid)?;
    let initial = cfg.initial_state(&params, &grid);

    let traj = simulate(&initial, cfg.experiment.horizon, &ops, &forcing, &damping, &stepper, cfg.experiment.stride)?;
    let mut out = csv_file(&ctx.out_dir, "trajectory.csv")?;
    traj.write_csv(&mut out)?;
    out.flush()?;
    if cfg.output.snapshots {
        let mut snap = csv_file(&ctx.out_dir, "snapshots.csv")?;
        traj.write_snapshots_csv(&grid, &mut snap)?;
        snap.flush()?;
    }

    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        samples: usize,
        final_time: f64,
        e_initial: f64,
        e_total_initial: f64,
        e_final: f64,
        e_total_final: f64,
        max_identity_residual: f64,
        failure: Option<String>,
    }
    let first = traj.reports.first().unwrap();
    let last = traj.reports.last().unwrap();
    let summary = Summary {
        experiment: "simulate",
        samples: traj.states.len(),
        final_time: traj.final_time(),
        e_initial: first.e,
        e_total_initial: first.e_total,
        e_final: last.e,
        e_total_final: last.e_total,
        max_identity_residual: traj.max_identity_residual(),
        failure: traj.failure.as_ref().map(|f| f.message.clone()),
    };
    write_json(&ctx.out_dir.join("summary.json"), &summary)?;
    if let Some(f) = traj.failure {
        return Err(RunError::Numerical(format!("run stopped at t = {}: {}", f.t, f.message)));
    }
    Ok(())
}

fn run_decay_fit(cfg: &RunConfig, ctx: &RunContext) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let ops = assemble(&params, &grid)?;
    let forcing = cfg.forcing()?;
    let damping = cfg.damping()?;
    let stepper = cfg.stepper(&params, &grid)?;
    let initial = cfg.initial_state(&params, &grid);

    let traj = simulate(&initial, cfg.experiment.horizon, &ops, &forcing, &damping, &stepper, cfg.experiment.stride)?;
    if let Some(f) = &traj.failure {
        return Err(RunError::Numerical(format!("run stopped at t = {}: {}", f.t, f.message)));
    }
    let mut out = csv_file(&ctx.out_dir, "trajectory.csv")?;
    traj.write_csv(&mut out)?;
    out.flush()?;

    // shift by L m_f so the fitted model class (nonnegative floor) applies
    let shift = params.length * forcing.m_f;
    let series: Vec<(f64, f64)> =
        traj.times.iter().zip(&traj.reports).map(|(t, r)| (*t, r.e_total + shift)).collect();
    let fit = fit_decay(&series)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        fit: bresse_core::DecayFit,
        shift: f64,
        samples: usize,
    }
    write_json(
        &ctx.out_dir.join("summary.json"),
        &Summary { experiment: "decay-fit", fit, shift, samples: series.len() },
    )?;
    Ok(())
}

fn run_equilibria(cfg: &RunConfig, ctx: &RunContext) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let forcing = cfg.forcing()?;
    let constants = analytic_constants(&params, params.ell, forcing.beta)?;
    let ms = MultiStartConfig {
        amplitudes: cfg.experiment.equilibria.amplitudes.clone(),
        modes: cfg.experiment.equilibria.modes,
        random_starts: cfg.experiment.equilibria.random_starts,
        seed: cfg.experiment.seed,
        tol: cfg.experiment.equilibria.tol,
        max_iters: cfg.experiment.equilibria.max_iters,
        dedup_tol: 1e-6,
    };
    let set = find_equilibria(&params, &forcing, &grid, &ms)?;

    #[derive(Serialize)]
    struct EquilibriumRecord<'a> {
        phi: &'a [f64],
        psi: &'a [f64],
        w: &'a [f64],
        residual_norm: f64,
        h1_seminorm_sq: f64,
        bound: bresse_core::equilibria::EquilibriumBoundReport,
    }
    #[derive(Serialize)]
    struct EquilibriaFile<'a> {
        params: &'a bresse_core::BeamParams,
        forcing_kind: &'a str,
        nodes: Vec<f64>,
        equilibria: Vec<EquilibriumRecord<'a>>,
    }
    let records: Vec<EquilibriumRecord> = set
        .equilibria
        .iter()
        .map(|eq| EquilibriumRecord {
            phi: &eq.phi,
            psi: &eq.psi,
            w: &eq.w,
            residual_norm: eq.residual_norm,
            h1_seminorm_sq: eq.h1_seminorm_sq,
            bound: check_equilibrium_bound(eq, &params, &forcing, &constants),
        })
        .collect();
    let all_bounds_pass = records.iter().all(|r| r.bound.passed);
    write_json(
        &ctx.out_dir.join("equilibria.json"),
        &EquilibriaFile {
            params: &params,
            forcing_kind: forcing.law.name(),
            nodes: grid.nodes().collect(),
            equilibria: records,
        },
    )?;

    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        count: usize,
        attempts: usize,
        failed_starts: usize,
        all_bounds_pass: bool,
        bound_rhs: f64,
    }
    write_json(
        &ctx.out_dir.join("summary.json"),
        &Summary {
            experiment: "equilibria",
            count: set.equilibria.len(),
            attempts: set.attempts,
            failed_starts: set.failures,
            all_bounds_pass,
            bound_rhs: 2.0 * forcing.m_f * params.length * constants.gamma3_weighted,
        },
    )?;
    Ok(())
}

fn run_singular_limit(cfg: &RunConfig, ctx: &RunContext, sweep: &[f64]) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let forcing = cfg.forcing()?;
    let damping = cfg.damping()?;
    let stepper = cfg.stepper(&params, &grid)?;
    let initial = cfg.initial_state(&params, &grid);

    let report = singular_limit_experiment(
        &params,
        &forcing,
        &damping,
        &grid,
        &stepper,
        sweep,
        &initial,
        cfg.experiment.horizon,
        cfg.experiment.stride,
    )?;

    let mut table = csv_file(&ctx.out_dir, "table.csv")?;
    writeln!(table, "ell,sup_error").map_err(RunError::from)?;
    for (ell, e) in &report.table {
        writeln!(table, "{ell},{e}").map_err(RunError::from)?;
    }
    table.flush()?;
    for (i, run) in report.runs.iter().enumerate() {
        let mut f = csv_file(&ctx.out_dir, &format!("trajectory_ell_{i}.csv"))?;
        run.write_csv(&mut f)?;
        f.flush()?;
    }
    if let Some(reference) = &report.reference {
        let mut f = csv_file(&ctx.out_dir, "trajectory_flat.csv")?;
        reference.write_csv(&mut f)?;
        f.flush()?;
    }

    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        table: &'a [(f64, f64)],
        strictly_decreasing: bool,
        first_to_last_ratio: Option<f64>,
    }
    let ratio = match (report.table.first(), report.table.last()) {
        (Some((_, a)), Some((_, b))) if *b > 0.0 => Some(a / b),
        _ => None,
    };
    write_json(
        &ctx.out_dir.join("summary.json"),
        &Summary {
            experiment: "singular-limit",
            table: &report.table,
            strictly_decreasing: report.strictly_decreasing,
            first_to_last_ratio: ratio,
        },
    )?;
    Ok(())
}

fn harvest_protocol(cfg: &RunConfig) -> HarvestProtocol {
    HarvestProtocol {
        ensemble: cfg.experiment.ensemble,
        seed: cfg.experiment.seed,
        ic_energy: cfg.experiment.ic_energy,
        settle_factor: cfg.experiment.settle_factor,
        window_factor: cfg.experiment.window_factor,
        stride_factor: cfg.experiment.stride_factor,
        max_time: cfg.experiment.max_time,
    }
}

fn run_semicontinuity(cfg: &RunConfig, ctx: &RunContext, sweep: &[f64]) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let forcing = cfg.forcing()?;
    let damping = cfg.damping()?;
    let stepper = cfg.stepper(&params, &grid)?;

    let report = upper_semicontinuity_experiment(
        &params,
        &forcing,
        &damping,
        &grid,
        &stepper,
        sweep,
        &harvest_protocol(cfg),
    )?;

    let mut table = csv_file(&ctx.out_dir, "table.csv")?;
    writeln!(table, "ell,semidistance").map_err(RunError::from)?;
    for (ell, d) in &report.table {
        writeln!(table, "{ell},{d}").map_err(RunError::from)?;
    }
    table.flush()?;

    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        #[serde(flatten)]
        report: &'a bresse_core::lab::SemicontinuityReport,
    }
    write_json(&ctx.out_dir.join("summary.json"), &Summary { experiment: "semicontinuity", report: &report })?;
    Ok(())
}

fn run_quasistability(cfg: &RunConfig, ctx: &RunContext) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let forcing = cfg.forcing()?;
    let damping = cfg.damping()?;
    let stepper = cfg.stepper(&params, &grid)?;
    let qcfg = QuasistabilityConfig {
        pairs: cfg.experiment.pairs,
        epsilons: cfg.experiment.epsilons.clone(),
        horizon: cfg.experiment.horizon,
        stride: cfg.experiment.stride,
        seed: cfg.experiment.seed,
        base_energy: cfg.experiment.ic_energy,
    };
    let report = quasistability_probe(&params, &forcing, &damping, &grid, &stepper, &qcfg)?;

    for (i, pair) in report.pairs.iter().enumerate() {
        let mut f = csv_file(&ctx.out_dir, &format!("pair_{i}.csv"))?;
        writeln!(f, "t,difference_energy,compensator").map_err(RunError::from)?;
        for (t, e, comp) in &pair.rows {
            writeln!(f, "{t},{e},{comp}").map_err(RunError::from)?;
        }
        f.flush()?;
    }

    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        #[serde(flatten)]
        report: &'a bresse_core::lab::QuasistabilityReport,
    }
    write_json(&ctx.out_dir.join("summary.json"), &Summary { experiment: "quasistability", report: &report })?;
    if !report.feasible {
        return Err(RunError::Numerical(format!(
            "stabilizability inequality infeasible: worst violation {}",
            report.max_violation
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct NamedCheck {
    name: String,
    passed: bool,
    detail: String,
}

fn run_verify(cfg: &RunConfig, ctx: &RunContext) -> Result<(), RunError> {
    let params = cfg.beam_params()?;
    let grid = cfg.grid_obj()?;
    let forcing = cfg.forcing()?;
    let damping = cfg.damping()?;

    let report = bresse_core::validate_hypotheses(&params, &forcing, &damping, &SampleSpec::default())?;
    let mut checks: Vec<NamedCheck> = report
        .checks
        .iter()
        .map(|c| NamedCheck {
            name: format!("hypothesis/{}", c.name),
            passed: c.passed,
            detail: format!("{} (worst margin {:.3e})", c.detail, c.worst_margin),
        })
        .collect();
    checks.extend(discretization_checks(&params, &grid)?);

    let all_passed = checks.iter().all(|c| c.passed);
    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        all_passed: bool,
        checks: &'a [NamedCheck],
    }
    write_json(
        &ctx.out_dir.join("summary.json"),
        &Summary { experiment: "verify", all_passed, checks: &checks },
    )?;
    if !all_passed {
        let failed: Vec<&str> =
            checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(RunError::Numerical(format!("checks failed: {}", failed.join(", "))));
    }
    Ok(())
}

/// Structural checks of the assembled operator on the configured grid:
/// symmetry, agreement of the quadratic form with the strain energy,
/// quadrature sanity and second-order consistency under refinement.
fn discretization_checks(
    params: &bresse_core::BeamParams,
    grid: &bresse_core::Grid,
) -> Result<Vec<NamedCheck>, RunError> {
    use std::f64::consts::PI;
    let mut checks = Vec::new();
    let ops = assemble(params, grid)?;
    let n = grid.n();

    // deterministic pseudo-random probe vectors
    let probe = |k: usize| -> Vec<f64> {
        (0..3 * n).map(|i| ((i * 2654435761 + k * 40503) % 1000) as f64 / 500.0 - 1.0).collect()
    };
    let mut sym_err = 0.0f64;
    for k in 0..20 {
        let u = probe(2 * k);
        let v = probe(2 * k + 1);
        let mut au = vec![0.0; 3 * n];
        let mut av = vec![0.0; 3 * n];
        ops.apply_stiffness(&u, &mut au);
        ops.apply_stiffness(&v, &mut av);
        let lhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = u.iter().zip(&av).map(|(a, b)| a * b).sum();
        sym_err = sym_err.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    checks.push(NamedCheck {
        name: "discretization/operator-symmetry".into(),
        passed: sym_err <= 1e-12,
        detail: format!("max relative asymmetry {sym_err:.3e}"),
    });

    let mut form_err = 0.0f64;
    for k in 0..10 {
        let q = probe(100 + k);
        let qf = ops.quadratic_form(&q);
        let en = 2.0 * ops.elastic_energy_packed(&q);
        form_err = form_err.max((qf - en).abs() / qf.abs().max(1.0));
    }
    checks.push(NamedCheck {
        name: "discretization/quadratic-form-energy".into(),
        passed: form_err <= 1e-12,
        detail: format!("max relative defect {form_err:.3e}"),
    });

    // first-mode quadrature against the half-length closed form
    let mode = grid.sine_mode(1);
    let l2 = bresse_core::disc::l2_norm_sq(grid.h(), &mode);
    let exact = grid.length() / 2.0;
    let quad_err = (l2 - exact).abs() / exact;
    checks.push(NamedCheck {
        name: "discretization/first-mode-quadrature".into(),
        passed: quad_err <= 1e-10,
        detail: format!("relative error {quad_err:.3e}"),
    });

    // zero state gives zero potential
    let zero_pot = quad_potential(&bresse_core::ForcingModel::builtin(0.0, 0.0).unwrap(), grid, &bresse_core::State::zero(grid));
    checks.push(NamedCheck {
        name: "discretization/zero-potential".into(),
        passed: zero_pot == 0.0,
        detail: format!("value {zero_pot:.3e}"),
    });

    // consistency order of the coupled stiffness between two refinements
    let l = params.length;
    let error_at = |nn: usize| -> Result<f64, RunError> {
        let g = bresse_core::make_grid(l, nn)?;
        let o = assemble(params, &g)?;
        let mut q = vec![0.0; 3 * nn];
        for (j, x) in g.nodes().enumerate() {
            q[3 * j] = (PI * x / l).sin();
            q[3 * j + 1] = (2.0 * PI * x / l).sin();
            q[3 * j + 2] = 0.7 * (PI * x / l).sin();
        }
        let mut out = vec![0.0; 3 * nn];
        o.apply_stiffness(&q, &mut out);
        let ell = params.ell;
        let (b, k, k0) = (params.b, params.k, params.k0);
        let mut worst = 0.0f64;
        for (j, x) in g.nodes().enumerate() {
            let s1 = (PI * x / l).sin();
            let c1 = (PI * x / l).cos();
            let s2 = (2.0 * PI * x / l).sin();
            let c2 = (2.0 * PI * x / l).cos();
            let k1 = PI / l;
            let k2 = 2.0 * PI / l;
            let (phi, dphi, ddphi) = (s1, k1 * c1, -k1 * k1 * s1);
            let (psi, dpsi, ddpsi) = (s2, k2 * c2, -k2 * k2 * s2);
            let (wv, dw, ddw) = (0.7 * s1, 0.7 * k1 * c1, -0.7 * k1 * k1 * s1);
            let f_phi = -k * (ddphi + dpsi + ell * dw) - k0 * ell * (dw - ell * phi);
            let f_psi = -b * ddpsi + k * (dphi + psi + ell * wv);
            let f_w = -k0 * (ddw - ell * dphi) + k * ell * (dphi + psi + ell * wv);
            worst = worst.max((out[3 * j] - f_phi).abs());
            worst = worst.max((out[3 * j + 1] - f_psi).abs());
            worst = worst.max((out[3 * j + 2] - f_w).abs());
        }
        Ok(worst)
    };
    let e1 = error_at(48)?;
    let e2 = error_at(96)?;
    let order = (e1 / e2).log2() / ((97.0f64 / 49.0).log2());
    checks.push(NamedCheck {
        name: "discretization/consistency-order".into(),
        passed: order >= 1.9,
        detail: format!("observed order {order:.3} between n=48 and n=96"),
    });

    // discrete Poincare constant on this grid approaches L/pi from above
    let c_h = grid.poincare_constant();
    let continuum = l / PI;
    let x = PI * grid.h() / (2.0 * l);
    let gap_ok = c_h > continuum && (c_h - continuum) <= continuum * x * x;
    checks.push(NamedCheck {
        name: "discretization/poincare-constant".into(),
        passed: gap_ok,
        detail: format!("discrete {c_h:.6} vs continuum {continuum:.6}"),
    });

    Ok(checks)
}
