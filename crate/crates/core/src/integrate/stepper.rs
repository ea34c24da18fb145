//! One implicit-midpoint step of the semidiscrete system
//!
//!   M q'' + A q + g(q') + f(q) = 0
//!
//! with diagonal mass M, block-tridiagonal stiffness A, pointwise damping g
//! and pointwise conservative forcing f = grad F. The nonlinear midpoint
//! equations are solved by Newton iteration on the midpoint displacement;
//! the elastic Jacobian is constant and the damping and forcing blocks are
//! refreshed every iteration.

use serde::{Deserialize, Serialize};

use crate::disc::{Block, Grid};
use crate::error::{CoreError, Result};
use crate::integrate::block_tridiag::{BlockFactor, UniformBlockTridiag};
use crate::model::{BeamParams, PointDamping, PointForcing};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    ImplicitMidpoint,
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    /// Newton stops when the residual drops below
    /// `newton_tol * (1 + initial residual)`.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub scheme: Scheme,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(CoreError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { dt, newton_tol: 1e-10, newton_max_iters: 25, scheme: Scheme::ImplicitMidpoint })
    }

    /// dt = h / (2 c_max): accuracy-motivated, since the scheme is
    /// unconditionally stable.
    pub fn default_for(params: &BeamParams, grid: &Grid) -> Self {
        let dt = grid.h() / (2.0 * params.max_wave_speed());
        Self { dt, newton_tol: 1e-10, newton_max_iters: 25, scheme: Scheme::ImplicitMidpoint }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(CoreError::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.newton_tol > 0.0) {
            return Err(CoreError::InvalidParameter("newton_tol must be positive".into()));
        }
        if self.newton_max_iters == 0 {
            return Err(CoreError::InvalidParameter("newton_max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_newton_tol(mut self, tol: f64) -> Self {
        self.newton_tol = tol;
        self
    }
}

/// Outcome of one converged step.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub iterations: usize,
    pub residual: f64,
    /// Midpoint-rule increment of the cumulative dissipation:
    /// dt * <g(v_mid), v_mid> in the h-weighted inner product.
    pub dissipation_increment: f64,
}

/// Scratch buffers reused across steps.
pub struct Workspace<const B: usize> {
    u: Vec<f64>,
    vmid: Vec<f64>,
    res: Vec<f64>,
    au: Vec<f64>,
    jac: UniformBlockTridiag<B>,
    factor: BlockFactor<B>,
}

impl<const B: usize> Workspace<B> {
    pub fn new(n: usize, lower: Block<B>, upper: Block<B>) -> Self {
        Self {
            u: vec![0.0; B * n],
            vmid: vec![0.0; B * n],
            res: vec![0.0; B * n],
            au: vec![0.0; B * n],
            jac: UniformBlockTridiag::new(n, lower, upper),
            factor: BlockFactor::default(),
        }
    }
}

/// The constant ingredients of the semidiscrete system, shared by the
/// curved and flat beams.
pub struct SystemRef<'a, const B: usize> {
    pub mass: [f64; B],
    pub stiff_diag: &'a Block<B>,
    pub stiff_upper: &'a Block<B>,
    pub stiff_lower: Block<B>,
    pub h: f64,
    pub n: usize,
}

impl<'a, const B: usize> SystemRef<'a, B> {
    fn apply_stiffness(&self, q: &[f64], out: &mut [f64]) {
        let n = self.n;
        for node in 0..n {
            let base = B * node;
            for i in 0..B {
                let mut acc = 0.0;
                for j in 0..B {
                    acc += self.stiff_diag[i][j] * q[base + j];
                    if node > 0 {
                        acc += self.stiff_lower[i][j] * q[base - B + j];
                    }
                    if node + 1 < n {
                        acc += self.stiff_upper[i][j] * q[base + B + j];
                    }
                }
                out[base + i] = acc;
            }
        }
    }
}

fn weighted_norm(h: f64, r: &[f64]) -> f64 {
    (h * r.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Advance (q, v) by one implicit-midpoint step of length dt, in place.
///
/// The midpoint displacement u solves
///   (4/dt^2) M (u - q) - (2/dt) M v + A u + g(2 (u - q)/dt) + f(u) = 0,
/// after which q <- 2u - q and v <- 2 v_mid - v with v_mid = 2 (u - q)/dt.
pub fn midpoint_step<const B: usize>(
    q: &mut [f64],
    v: &mut [f64],
    sys: &SystemRef<B>,
    forcing: &impl PointForcing<B>,
    damping: &impl PointDamping<B>,
    cfg: &StepperConfig,
    ws: &mut Workspace<B>,
) -> Result<StepInfo> {
    cfg.validate()?;
    let n = sys.n;
    let dt = cfg.dt;
    let c0 = 4.0 / (dt * dt);
    let c1 = 2.0 / dt;

    // predictor: u = q + (dt/2) v
    for i in 0..B * n {
        ws.u[i] = q[i] + 0.5 * dt * v[i];
    }

    let mass_max = sys.mass.iter().fold(0.0f64, |a, m| a.max(*m));
    let mut first_res = None;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for iter in 0..=cfg.newton_max_iters {
        // residual at current u
        for i in 0..B * n {
            ws.vmid[i] = c1 * (ws.u[i] - q[i]);
        }
        sys.apply_stiffness(&ws.u, &mut ws.au);
        for node in 0..n {
            let base = B * node;
            let mut x = [0.0; B];
            x.copy_from_slice(&ws.u[base..base + B]);
            let f = forcing.grad(&x);
            for c in 0..B {
                let i = base + c;
                ws.res[i] = c0 * sys.mass[c] * (ws.u[i] - q[i]) - c1 * sys.mass[c] * v[i]
                    + ws.au[i]
                    + damping.eval(c, ws.vmid[i])
                    + f[c];
            }
        }
        residual = weighted_norm(sys.h, &ws.res);
        let scale = 1.0 + *first_res.get_or_insert(residual);
        // Residual entries carry catastrophic cancellation of size
        // c0 |u| + c1 |v| + |A u|; below that times epsilon the iteration
        // is at its round-off floor and the state is converged.
        let floor = 1e-14
            * (c0 * mass_max * (weighted_norm(sys.h, &ws.u) + weighted_norm(sys.h, q))
                + c1 * mass_max * weighted_norm(sys.h, v)
                + weighted_norm(sys.h, &ws.au));
        iterations = iter;
        if residual <= (cfg.newton_tol * scale).max(floor) {
            break;
        }
        if iter == cfg.newton_max_iters || !residual.is_finite() {
            return Err(CoreError::NewtonDiverged { residual, iterations: iter });
        }

        // Jacobian: (4/dt^2) M + A + (2/dt) g'(v_mid) + Hess F(u)
        for node in 0..n {
            let base = B * node;
            let mut x = [0.0; B];
            x.copy_from_slice(&ws.u[base..base + B]);
            let hess = forcing.hess(&x);
            for i in 0..B {
                for j in 0..B {
                    ws.jac.diag[node][i][j] = sys.stiff_diag[i][j] + hess[i][j];
                }
                ws.jac.diag[node][i][i] +=
                    c0 * sys.mass[i] + c1 * damping.deriv(i, ws.vmid[base + i]);
            }
        }
        ws.factor.refactor(&ws.jac)?;
        for r in ws.res.iter_mut() {
            *r = -*r;
        }
        ws.factor.solve_in_place(&mut ws.res);
        for i in 0..B * n {
            ws.u[i] += ws.res[i];
        }
    }

    // dissipation increment at the converged midpoint
    for i in 0..B * n {
        ws.vmid[i] = c1 * (ws.u[i] - q[i]);
    }
    let mut diss = 0.0;
    for node in 0..n {
        let base = B * node;
        for c in 0..B {
            let s = ws.vmid[base + c];
            diss += damping.eval(c, s) * s;
        }
    }
    let dissipation_increment = dt * sys.h * diss;

    for i in 0..B * n {
        let qn = q[i];
        q[i] = 2.0 * ws.u[i] - qn;
        v[i] = 2.0 * ws.vmid[i] - v[i];
    }

    Ok(StepInfo { iterations, residual, dissipation_increment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::{assemble, make_grid, State};
    use crate::model::{DampingModel, ForcingModel};

    #[test]
    fn zero_state_is_fixed_point() {
        let grid = make_grid(std::f64::consts::PI, 16).unwrap();
        let params = BeamParams::default();
        let ops = assemble(&params, &grid).unwrap();
        let forcing = ForcingModel::builtin(0.0, 0.0).unwrap();
        let damping = DampingModel::linear(1.0).unwrap();
        let cfg = StepperConfig::new(1e-2).unwrap();
        let state = State::zero(&grid);
        let (mut q, mut v) = (Vec::new(), Vec::new());
        state.to_packed(&mut q, &mut v);
        let sys = SystemRef {
            mass: [params.rho1, params.rho2, params.rho1],
            stiff_diag: ops.stencil().diag_block(),
            stiff_upper: ops.stencil().upper_block(),
            stiff_lower: ops.stencil().lower_block(),
            h: grid.h(),
            n: grid.n(),
        };
        let mut ws = Workspace::new(grid.n(), sys.stiff_lower, *sys.stiff_upper);
        let info = midpoint_step(&mut q, &mut v, &sys, &forcing, &damping, &cfg, &mut ws).unwrap();
        assert_eq!(info.iterations, 0);
        assert!(q.iter().all(|&x| x == 0.0));
        assert!(v.iter().all(|&x| x == 0.0));
        assert_eq!(info.dissipation_increment, 0.0);
    }
}
