use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::params::BeamParams;

/// Closed-form norm-equivalence and coercivity constants, uniform in the
/// curvature over `[0, ell0]` as long as `ell0 < pi/(2 L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticConstants {
    /// Energy norm squared <= gamma1 * standard norm squared.
    pub gamma1: f64,
    /// Standard norm squared <= gamma2 * energy norm squared.
    pub gamma2: f64,
    /// Gradient-sum bound: |phi_x|^2 + |psi_x|^2 + |w_x|^2 is bounded by
    /// gamma3 times the unweighted strain-sum; equals
    /// max{1 + 4 L^2/pi^2, 2} / (1 - 4 ell0^2 L^2 / pi^2).
    pub gamma3: f64,
    /// gamma3 divided by min{b, k, k0}: the constant in front of the
    /// stiffness-weighted strain combination.
    pub gamma3_weighted: f64,
    /// Coercivity prefactor 1 - 2 beta gamma3_w L^2 / pi^2, in (0, 1].
    pub beta0: f64,
    /// Curvature cap the constants are uniform under.
    pub ell0: f64,
}

/// Compute the curvature-uniform constants for curvatures up to `ell0`.
///
/// `beta` is the quadratic lower-bound coefficient of the forcing; it must
/// stay below pi^2 / (2 gamma3_w L^2) for the coercivity prefactor to be
/// positive.
pub fn analytic_constants(params: &BeamParams, ell0: f64, beta: f64) -> Result<AnalyticConstants> {
    params.validate()?;
    let length = params.length;
    let cap = params.curvature_cap();
    if !(ell0 >= 0.0) || !ell0.is_finite() {
        return Err(CoreError::InvalidParameter(format!("ell0 must be nonnegative, got {ell0}")));
    }
    if ell0 >= cap {
        return Err(CoreError::OutOfRegime { what: "ell0", value: ell0, cap });
    }
    if params.ell > ell0 {
        return Err(CoreError::Precondition(format!(
            "params.ell = {} exceeds the requested cap ell0 = {ell0}",
            params.ell
        )));
    }
    if !(beta >= 0.0) {
        return Err(CoreError::InvalidParameter(format!("beta must be nonnegative, got {beta}")));
    }

    let l2pi2 = length * length / (PI * PI);
    let prefactor = 1.0 - 4.0 * ell0 * ell0 * l2pi2;
    debug_assert!(prefactor > 0.0);
    let gamma3 = (1.0 + 4.0 * l2pi2).max(2.0) / prefactor;
    let gamma3_weighted = gamma3 / params.min_stiffness();

    // Discrete first-difference quotients obey the Poincare bound with a
    // constant slightly above L/pi; the 1.25 padding keeps gamma1 valid for
    // every interior-node count >= 1.
    let poin2 = 1.25 * l2pi2;
    let gamma1 = params
        .rho1
        .max(params.rho2)
        .max(3.0 * params.k + 2.0 * params.k0 * ell0 * ell0 * poin2)
        .max(params.b + 3.0 * params.k * poin2)
        .max(2.0 * params.k0 + 3.0 * params.k * ell0 * ell0 * poin2);

    let gamma2 = (1.0 / params.rho1.min(params.rho2)).max(gamma3_weighted);

    let beta0 = 1.0 - 2.0 * beta * gamma3_weighted * l2pi2;
    if beta0 <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "beta = {beta} is at or above the admissible cap pi^2/(2 gamma3 L^2) = {}",
            PI * PI / (2.0 * gamma3_weighted * length * length)
        )));
    }

    Ok(AnalyticConstants { gamma1, gamma2, gamma3, gamma3_weighted, beta0, ell0 })
}

impl AnalyticConstants {
    /// Admissible upper bound on the forcing lower-bound coefficient.
    pub fn beta_cap(&self, length: f64) -> f64 {
        PI * PI / (2.0 * self.gamma3_weighted * length * length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_l(length: f64) -> BeamParams {
        BeamParams::new(1.0, 1.0, 1.0, 1.0, 1.0, length, 0.0).unwrap()
    }

    #[test]
    fn gamma3_closed_form_on_unit_circle_length() {
        // L = pi, ell0 = 0.25: prefactor 1 - 4 (0.25)^2 = 0.75,
        // coefficient max{1 + 4, 2} = 5, so gamma3 = 20/3.
        let c = analytic_constants(&params_l(PI), 0.25, 0.0).unwrap();
        assert!((c.gamma3 - 20.0 / 3.0).abs() < 1e-14, "gamma3 = {}", c.gamma3);
    }

    #[test]
    fn gamma3_at_zero_cap() {
        let length = 2.0;
        let c = analytic_constants(&params_l(length), 0.0, 0.0).unwrap();
        let expect = (1.0 + 4.0 * length * length / (PI * PI)).max(2.0);
        assert!((c.gamma3 - expect).abs() < 1e-14);
        // short beam: the max saturates at 2
        let c2 = analytic_constants(&params_l(0.5), 0.0, 0.0).unwrap();
        assert!((c2.gamma3 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn beta_zero_gives_unit_prefactor() {
        let c = analytic_constants(&params_l(PI), 0.25, 0.0).unwrap();
        assert_eq!(c.beta0, 1.0);
    }

    #[test]
    fn beta_near_cap_shrinks_prefactor() {
        let p = params_l(PI);
        let c0 = analytic_constants(&p, 0.25, 0.0).unwrap();
        let cap = c0.beta_cap(p.length);
        let c = analytic_constants(&p, 0.25, 0.9 * cap).unwrap();
        assert!(c.beta0 > 0.0 && c.beta0 < 0.2, "beta0 = {}", c.beta0);
        assert!(analytic_constants(&p, 0.25, cap).is_err());
    }

    #[test]
    fn rejects_cap_at_or_above_regime() {
        let p = params_l(PI);
        let err = analytic_constants(&p, 0.5, 0.0).unwrap_err();
        assert!(matches!(err, CoreError::OutOfRegime { .. }));
    }

    #[test]
    fn rejects_ell_above_cap() {
        let p = BeamParams::new(1.0, 1.0, 1.0, 1.0, 1.0, PI, 0.3).unwrap();
        assert!(analytic_constants(&p, 0.2, 0.0).is_err());
        assert!(analytic_constants(&p, 0.3, 0.0).is_ok());
    }

    #[test]
    fn gamma2_formula() {
        let p = BeamParams::new(0.5, 2.0, 1.0, 1.0, 1.0, PI, 0.0).unwrap();
        let c = analytic_constants(&p, 0.25, 0.0).unwrap();
        assert!((c.gamma2 - (1.0 / 0.5f64).max(c.gamma3_weighted)).abs() < 1e-14);
    }
}
