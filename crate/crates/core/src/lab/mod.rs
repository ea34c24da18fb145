//! Experiment layer: decay fitting, curvature-uniform absorbing radii,
//! quasi-stability probes, the vanishing-curvature limit and attractor
//! sampling with semidistance comparisons.

mod absorbing;
mod decay;
mod ensemble;
mod hausdorff;
mod limits;
mod quasistability;

pub use absorbing::{absorbing_radius, AbsorbingProtocol, AbsorbingReport, EllRadius};
pub use decay::{fit_decay, fit_decay_tail, DecayFit};
pub use ensemble::{energy_ensemble, random_state, rescale_to_energy, rescale_to_norm, seeded_random_state};
pub use hausdorff::{hausdorff_by, hausdorff_semidistance, hausdorff_semidistance_flat, StateNorm};
pub use limits::{
    harvest_flat_sample, harvest_sample, regularity_probe, singular_limit_experiment,
    upper_semicontinuity_experiment, AttractorSample, HarvestProtocol, RegularityReport,
    SemicontinuityReport, SingularLimitReport,
};
pub use quasistability::{quasistability_probe, PairStats, QuasistabilityConfig, QuasistabilityReport};
