//! Implicit-midpoint time integration with per-step energy accounting.
//!
//! The midpoint rule conserves the quadratic energy of the linear
//! conservative system exactly; with damping and forcing the per-step
//! energy balance closes up to the potential quadrature defect, which is
//! tracked as `identity_residual`.

mod block_tridiag;
mod stepper;
mod trajectory;

pub use block_tridiag::{BlockFactor, SmallLu, UniformBlockTridiag};
pub use stepper::{midpoint_step, Scheme, StepInfo, StepperConfig, SystemRef, Workspace};
pub use trajectory::{
    simulate, step, timoshenko_simulate, BresseTrajectory, EnergyReport, StepFailure,
    TimoshenkoTrajectory, Trajectory,
};
