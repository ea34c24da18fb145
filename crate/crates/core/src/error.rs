use thiserror::Error;

/// Errors produced by the model, discretization, solver and experiment layers.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Curvature (or curvature cap) at or above pi/(2 L), where the
    /// ell-uniform constants are not defined.
    #[error("out of uniform regime: {what} = {value} must be below pi/(2 L) = {cap}")]
    OutOfRegime { what: &'static str, value: f64, cap: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { residual: f64, iterations: usize },

    #[error("singular Jacobian (pivot ratio estimate {cond_estimate:.3e})")]
    SingularJacobian { cond_estimate: f64 },

    #[error("time step failed at t = {t}: {source}")]
    StepFailed { t: f64, #[source] source: Box<CoreError> },

    #[error("degenerate input series: {0}")]
    DegenerateSeries(String),

    #[error("empty state set")]
    EmptySet,
}

pub type Result<T> = std::result::Result<T, CoreError>;
