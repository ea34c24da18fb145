//! Physical parameters, constitutive laws and the analytic constants
//! derived from them.

mod constants;
mod damping;
mod forcing;
mod hypotheses;
mod params;

pub use constants::{analytic_constants, AnalyticConstants};
pub use damping::{DampingLaw, DampingModel, PointDamping, TimoshenkoDamping};
pub use forcing::{ForcingLaw, ForcingModel, PointForcing, TimoshenkoForcing};
pub use hypotheses::{validate_hypotheses, HypothesisCheck, SampleSpec, ValidationReport};
pub use params::BeamParams;
