use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Physical coefficients of the arched-beam system.
///
/// The three displacement channels are the vertical displacement, the shear
/// angle and the longitudinal displacement. `ell` is the arch curvature
/// (inverse radius); `ell = 0` uncouples the longitudinal channel and the
/// remaining two equations form the flat (Timoshenko) beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    /// Mass density of the vertical and longitudinal channels, > 0.
    pub rho1: f64,
    /// Rotational mass density of the shear channel, > 0.
    pub rho2: f64,
    /// Bending stiffness, > 0.
    pub b: f64,
    /// Shear stiffness, > 0.
    pub k: f64,
    /// Longitudinal stiffness, > 0.
    pub k0: f64,
    /// Beam length, > 0.
    pub length: f64,
    /// Arch curvature (1/length), >= 0.
    pub ell: f64,
}

impl BeamParams {
    pub fn new(rho1: f64, rho2: f64, b: f64, k: f64, k0: f64, length: f64, ell: f64) -> Result<Self> {
        let p = Self { rho1, rho2, b, k, k0, length, ell };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("b", self.b),
            ("k", self.k),
            ("k0", self.k0),
            ("length", self.length),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CoreError::InvalidParameter(format!("{name} must be strictly positive, got {v}")));
            }
        }
        if !(self.ell >= 0.0) || !self.ell.is_finite() {
            return Err(CoreError::InvalidParameter(format!("ell must be nonnegative, got {}", self.ell)));
        }
        Ok(())
    }

    /// Curvature cap pi/(2 L) of the uniform regime.
    pub fn curvature_cap(&self) -> f64 {
        PI / (2.0 * self.length)
    }

    /// True iff `ell` lies strictly below pi/(2 L), where the
    /// curvature-uniform constants and the absorbing-set estimate apply.
    pub fn uniform_regime(&self) -> bool {
        self.ell < self.curvature_cap()
    }

    pub fn min_stiffness(&self) -> f64 {
        self.b.min(self.k).min(self.k0)
    }

    /// Largest characteristic wave speed of the three channels.
    pub fn max_wave_speed(&self) -> f64 {
        (self.k / self.rho1)
            .max(self.b / self.rho2)
            .max(self.k0 / self.rho1)
            .sqrt()
    }

    /// Same coefficients with a different curvature.
    pub fn with_ell(mut self, ell: f64) -> Result<Self> {
        self.ell = ell;
        self.validate()?;
        Ok(self)
    }
}

impl Default for BeamParams {
    /// Unit coefficients on a beam of length pi, with mild curvature.
    fn default() -> Self {
        Self { rho1: 1.0, rho2: 1.0, b: 1.0, k: 1.0, k0: 1.0, length: PI, ell: 0.1 }
    }
}
