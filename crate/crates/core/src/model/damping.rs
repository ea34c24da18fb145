use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Pointwise velocity damping on a `B`-component velocity.
pub trait PointDamping<const B: usize>: Sync {
    fn eval(&self, channel: usize, s: f64) -> f64;
    fn deriv(&self, channel: usize, s: f64) -> f64;
}

/// Scalar monotone damping laws selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DampingLaw {
    /// g = 0. Outside the admissible class; used for conservative runs.
    Off,
    /// g(s) = c s with c > 0.
    Linear { c: f64 },
    /// g(s) = s + s^3 for |s| <= s0, continued linearly with slope
    /// 1 + 3 s0^2 outside. Globally Lipschitz with slope in [1, 1 + 3 s0^2].
    ClippedCubic { s0: f64 },
    /// g(s) = s^3 / (1 + s^2). Sector-bounded for |s| > 1 with constants
    /// (1/2, 1) but g'(0) = 0, so not Lipschitz from below near zero.
    SaturatingCubic,
    /// g(s) = s^3. Violates the upper sector bound at large |s| and the
    /// two-sided slope bound near zero; kept for screening counterexamples.
    PureCubic,
}

impl DampingLaw {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            DampingLaw::Off => 0.0,
            DampingLaw::Linear { c } => c * s,
            DampingLaw::ClippedCubic { s0 } => {
                if s.abs() <= s0 {
                    s + s * s * s
                } else {
                    let sign = s.signum();
                    sign * (s0 + s0 * s0 * s0) + (1.0 + 3.0 * s0 * s0) * (s - sign * s0)
                }
            }
            DampingLaw::SaturatingCubic => s * s * s / (1.0 + s * s),
            DampingLaw::PureCubic => s * s * s,
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        match *self {
            DampingLaw::Off => 0.0,
            DampingLaw::Linear { c } => c,
            DampingLaw::ClippedCubic { s0 } => {
                if s.abs() <= s0 {
                    1.0 + 3.0 * s * s
                } else {
                    1.0 + 3.0 * s0 * s0
                }
            }
            DampingLaw::SaturatingCubic => {
                let s2 = s * s;
                (3.0 * s2 + s2 * s2) / ((1.0 + s2) * (1.0 + s2))
            }
            DampingLaw::PureCubic => 3.0 * s * s,
        }
    }

    /// Sector constants (m, M) valid for |s| > 1, and the two-sided slope
    /// bound where the law is globally Lipschitz.
    pub fn default_sector(&self) -> (f64, f64) {
        match *self {
            DampingLaw::Off => (0.0, 0.0),
            DampingLaw::Linear { c } => (c, c),
            DampingLaw::ClippedCubic { s0 } => (1.0, 1.0 + 3.0 * s0 * s0),
            DampingLaw::SaturatingCubic => (0.5, 1.0),
            DampingLaw::PureCubic => (1.0, 1.0),
        }
    }

    pub fn globally_lipschitz(&self) -> bool {
        matches!(self, DampingLaw::Linear { .. } | DampingLaw::ClippedCubic { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DampingLaw::Off => "off",
            DampingLaw::Linear { .. } => "linear",
            DampingLaw::ClippedCubic { .. } => "clipped-cubic",
            DampingLaw::SaturatingCubic => "saturating-cubic",
            DampingLaw::PureCubic => "pure-cubic",
        }
    }
}

/// Three scalar damping laws, one per channel, with their declared sector
/// constants. The declared constants are screened, not derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingModel {
    pub laws: [DampingLaw; 3],
    /// Lower sector constants m_i.
    pub m: [f64; 3],
    /// Upper sector constants M_i.
    pub big_m: [f64; 3],
    /// Claim that the two-sided slope bound m_i <= g_i' <= M_i holds for all s.
    pub globally_lipschitz: bool,
}

impl DampingModel {
    /// Same law on all three channels with its canonical sector constants.
    pub fn uniform(law: DampingLaw) -> Self {
        let (m, big_m) = law.default_sector();
        Self { laws: [law; 3], m: [m; 3], big_m: [big_m; 3], globally_lipschitz: law.globally_lipschitz() }
    }

    pub fn linear(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(CoreError::InvalidParameter(format!("linear damping coefficient must be positive, got {c}")));
        }
        Ok(Self::uniform(DampingLaw::Linear { c }))
    }

    pub fn clipped_cubic(s0: f64) -> Result<Self> {
        if !(s0 > 0.0) {
            return Err(CoreError::InvalidParameter(format!("clip point must be positive, got {s0}")));
        }
        Ok(Self::uniform(DampingLaw::ClippedCubic { s0 }))
    }

    pub fn saturating_cubic() -> Self {
        Self::uniform(DampingLaw::SaturatingCubic)
    }

    pub fn off() -> Self {
        Self::uniform(DampingLaw::Off)
    }

    /// Arbitrary combination with user-declared constants and Lipschitz
    /// claim. The claim is screened, not checked at construction.
    pub fn from_laws(laws: [DampingLaw; 3], m: [f64; 3], big_m: [f64; 3], globally_lipschitz: bool) -> Self {
        Self { laws, m, big_m, globally_lipschitz }
    }

    pub fn is_off(&self) -> bool {
        self.laws.iter().all(|l| matches!(l, DampingLaw::Off))
    }
}

impl PointDamping<3> for DampingModel {
    fn eval(&self, channel: usize, s: f64) -> f64 {
        self.laws[channel].eval(s)
    }

    fn deriv(&self, channel: usize, s: f64) -> f64 {
        self.laws[channel].deriv(s)
    }
}

/// The first two damping channels, acting on the flat-beam system.
#[derive(Debug, Clone, Copy)]
pub struct TimoshenkoDamping<'a>(pub &'a DampingModel);

impl PointDamping<2> for TimoshenkoDamping<'_> {
    fn eval(&self, channel: usize, s: f64) -> f64 {
        self.0.laws[channel].eval(s)
    }

    fn deriv(&self, channel: usize, s: f64) -> f64 {
        self.0.laws[channel].deriv(s)
    }
}
