use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Pointwise conservative forcing acting on a `B`-component displacement.
///
/// `grad` must be the exact gradient of `density` and `hess` its Hessian;
/// the hypothesis screen in [`crate::model::validate_hypotheses`] checks the
/// first of these by finite differences.
pub trait PointForcing<const B: usize>: Sync {
    /// Potential density F at one point.
    fn density(&self, x: &[f64; B]) -> f64;
    /// Gradient of F.
    fn grad(&self, x: &[f64; B]) -> [f64; B];
    /// Hessian of F.
    fn hess(&self, x: &[f64; B]) -> [[f64; B]; B];
}

/// Closed-form potential laws selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ForcingLaw {
    /// F = 0.
    Zero,
    /// F(u,v,w) = |u+v|^4 - |u+v|^2 + a1 |u v|^2 + a2 |w|^3.
    ///
    /// A double well in u+v; the first two force components do not depend
    /// on w, so this law is admissible for the flat-beam limit experiments.
    DoubleWell { alpha1: f64, alpha2: f64 },
    /// F = (c/4) (u^2+v^2+w^2)^2. All components depend on w.
    IsotropicQuartic { c: f64 },
}

impl ForcingLaw {
    pub fn name(&self) -> &'static str {
        match self {
            ForcingLaw::Zero => "zero",
            ForcingLaw::DoubleWell { .. } => "double-well",
            ForcingLaw::IsotropicQuartic { .. } => "isotropic-quartic",
        }
    }
}

/// A potential F with its gradient and the constants entering the
/// lower-bound and growth hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingModel {
    pub law: ForcingLaw,
    /// Coefficient of the quadratic lower bound on F, >= 0.
    pub beta: f64,
    /// Constant offset of the lower bound, >= 0.
    pub m_f: f64,
    /// Growth exponent of the gradient, >= 1.
    pub p: f64,
    /// Whether f1 respectively f2 depend on the longitudinal displacement.
    /// Both must be false to run the flat-beam limit experiments.
    pub depends_on_w: [bool; 2],
}

impl ForcingModel {
    /// The double-well example law with coefficients `alpha1, alpha2 >= 0`.
    ///
    /// Lower-bound constants: beta = 0, m_f = 1/4; growth exponent p = 3.
    pub fn builtin(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1 >= 0.0) || !(alpha2 >= 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "double-well coefficients must be nonnegative, got alpha1 = {alpha1}, alpha2 = {alpha2}"
            )));
        }
        Ok(Self {
            law: ForcingLaw::DoubleWell { alpha1, alpha2 },
            beta: 0.0,
            m_f: 0.25,
            p: 3.0,
            depends_on_w: [false, false],
        })
    }

    pub fn zero() -> Self {
        Self { law: ForcingLaw::Zero, beta: 0.0, m_f: 0.0, p: 1.0, depends_on_w: [false, false] }
    }

    /// F = (c/4) |x|^4 with c >= 0. Used when a forcing that couples all
    /// three channels is wanted; not admissible for the flat-beam limit.
    pub fn isotropic_quartic(c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(CoreError::InvalidParameter(format!("isotropic-quartic coefficient must be nonnegative, got {c}")));
        }
        Ok(Self {
            law: ForcingLaw::IsotropicQuartic { c },
            beta: 0.0,
            m_f: 0.0,
            p: 3.0,
            depends_on_w: [true, true],
        })
    }

    /// Override the declared lower-bound coefficient. The result may fail the
    /// hypothesis screen; intended for constructing counterexamples.
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    /// True iff f1 and f2 are independent of w, the compatibility condition
    /// for the flat-beam limit.
    pub fn w_independent(&self) -> bool {
        !self.depends_on_w[0] && !self.depends_on_w[1]
    }
}

impl PointForcing<3> for ForcingModel {
    fn density(&self, x: &[f64; 3]) -> f64 {
        let [u, v, w] = *x;
        match self.law {
            ForcingLaw::Zero => 0.0,
            ForcingLaw::DoubleWell { alpha1, alpha2 } => {
                let z = u + v;
                let z2 = z * z;
                z2 * z2 - z2 + alpha1 * (u * v) * (u * v) + alpha2 * w.abs().powi(3)
            }
            ForcingLaw::IsotropicQuartic { c } => {
                let s = u * u + v * v + w * w;
                0.25 * c * s * s
            }
        }
    }

    fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        let [u, v, w] = *x;
        match self.law {
            ForcingLaw::Zero => [0.0; 3],
            ForcingLaw::DoubleWell { alpha1, alpha2 } => {
                let z = u + v;
                let base = 4.0 * z * z * z - 2.0 * z;
                [
                    base + 2.0 * alpha1 * u * v * v,
                    base + 2.0 * alpha1 * u * u * v,
                    3.0 * alpha2 * w.abs() * w,
                ]
            }
            ForcingLaw::IsotropicQuartic { c } => {
                let s = c * (u * u + v * v + w * w);
                [s * u, s * v, s * w]
            }
        }
    }

    fn hess(&self, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let [u, v, w] = *x;
        match self.law {
            ForcingLaw::Zero => [[0.0; 3]; 3],
            ForcingLaw::DoubleWell { alpha1, alpha2 } => {
                let z = u + v;
                let base = 12.0 * z * z - 2.0;
                let duu = base + 2.0 * alpha1 * v * v;
                let duv = base + 4.0 * alpha1 * u * v;
                let dvv = base + 2.0 * alpha1 * u * u;
                let dww = 6.0 * alpha2 * w.abs();
                [[duu, duv, 0.0], [duv, dvv, 0.0], [0.0, 0.0, dww]]
            }
            ForcingLaw::IsotropicQuartic { c } => {
                let s = u * u + v * v + w * w;
                let mut h = [[0.0; 3]; 3];
                let xv = [u, v, w];
                for i in 0..3 {
                    for j in 0..3 {
                        h[i][j] = 2.0 * c * xv[i] * xv[j];
                    }
                    h[i][i] += c * s;
                }
                h
            }
        }
    }
}

/// View of a three-channel forcing restricted to the flat beam, evaluated at
/// zero longitudinal displacement. Construction requires w-independence of
/// the first two force components, which makes the restriction exact.
#[derive(Debug, Clone, Copy)]
pub struct TimoshenkoForcing<'a>(&'a ForcingModel);

impl<'a> TimoshenkoForcing<'a> {
    pub fn new(forcing: &'a ForcingModel) -> Result<Self> {
        if !forcing.w_independent() {
            return Err(CoreError::Precondition(format!(
                "forcing law '{}' has force components depending on the longitudinal displacement; \
                 the flat-beam system requires f1 and f2 independent of w",
                forcing.law.name()
            )));
        }
        Ok(Self(forcing))
    }

    pub fn inner(&self) -> &ForcingModel {
        self.0
    }
}

impl PointForcing<2> for TimoshenkoForcing<'_> {
    fn density(&self, x: &[f64; 2]) -> f64 {
        self.0.density(&[x[0], x[1], 0.0])
    }

    fn grad(&self, x: &[f64; 2]) -> [f64; 2] {
        let g = self.0.grad(&[x[0], x[1], 0.0]);
        [g[0], g[1]]
    }

    fn hess(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        let h = self.0.hess(&[x[0], x[1], 0.0]);
        [[h[0][0], h[0][1]], [h[1][0], h[1][1]]]
    }
}
