use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::constants::analytic_constants;
use crate::model::damping::DampingModel;
use crate::model::forcing::{ForcingModel, PointForcing};
use crate::model::params::BeamParams;

/// Where and how densely the pointwise hypotheses are sampled.
///
/// The hypotheses are stated for all reals; sampling a box makes the check a
/// screen, not a proof. Displacement points are a Halton low-discrepancy
/// sequence in the box; velocity samples are a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub box_lo: [f64; 3],
    pub box_hi: [f64; 3],
    /// Number of displacement samples.
    pub count: usize,
    /// Symmetric velocity range for the damping checks.
    pub velocity_range: f64,
    /// Number of velocity samples (uniform grid, includes both signs).
    pub velocity_count: usize,
    /// Central finite-difference step for the gradient check.
    pub fd_step: f64,
    /// Relative tolerance of the gradient check.
    pub grad_tol: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            box_lo: [-2.0; 3],
            box_hi: [2.0; 3],
            count: 10_000,
            velocity_range: 3.0,
            velocity_count: 2001,
            fd_step: 1e-5,
            grad_tol: 1e-6,
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 || self.velocity_count < 2 {
            return Err(CoreError::Precondition("sampling spec must request at least one sample per check".into()));
        }
        for i in 0..3 {
            if !(self.box_lo[i] < self.box_hi[i]) {
                return Err(CoreError::Precondition(format!("sample box is empty in component {i}")));
            }
        }
        Ok(())
    }

    fn displacement_samples(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.count).map(move |i| {
            let mut x = [0.0; 3];
            for (d, base) in [2u64, 3, 5].into_iter().enumerate() {
                let t = halton(i as u64 + 1, base);
                x[d] = self.box_lo[d] + t * (self.box_hi[d] - self.box_lo[d]);
            }
            x
        })
    }

    fn velocity_samples(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.velocity_count;
        (0..n).map(move |i| -self.velocity_range + 2.0 * self.velocity_range * i as f64 / (n - 1) as f64)
    }
}

/// Radical-inverse of `index` in the given base, in (0, 1).
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// One screened hypothesis: signed margin >= 0 means the sampled inequality
/// held everywhere, with `witness` the worst sample seen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    /// Smallest slack observed; negative on failure.
    pub worst_margin: f64,
    pub witness: Option<Vec<f64>>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Tracker {
    worst: f64,
    witness: Option<Vec<f64>>,
}

impl Tracker {
    fn new() -> Self {
        Self { worst: f64::INFINITY, witness: None }
    }

    fn observe(&mut self, margin: f64, witness: &[f64]) {
        if margin < self.worst {
            self.worst = margin;
            self.witness = Some(witness.to_vec());
        }
    }

    fn into_check(self, name: &str, detail: String) -> HypothesisCheck {
        let worst = if self.worst.is_finite() { self.worst } else { 0.0 };
        HypothesisCheck { name: name.into(), passed: worst >= 0.0, worst_margin: worst, witness: self.witness, detail }
    }
}

/// Screen the forcing and damping hypotheses on a sample set.
///
/// Failures are reported, never thrown; a clean report is necessary but not
/// sufficient since only finitely many points are inspected.
pub fn validate_hypotheses(
    params: &BeamParams,
    forcing: &ForcingModel,
    damping: &DampingModel,
    samples: &SampleSpec,
) -> Result<ValidationReport> {
    samples.validate()?;
    let mut checks = Vec::new();

    // Gradient consistency: central differences of F reproduce the forces.
    {
        let mut tr = Tracker::new();
        let h = samples.fd_step;
        for x in samples.displacement_samples() {
            let g = forcing.grad(&x);
            for i in 0..3 {
                let mut a = x;
                let mut b = x;
                a[i] += h;
                b[i] -= h;
                let fd = (forcing.density(&a) - forcing.density(&b)) / (2.0 * h);
                let rel = (fd - g[i]).abs() / g[i].abs().max(1.0);
                tr.observe(samples.grad_tol - rel, &x);
            }
        }
        checks.push(tr.into_check(
            "gradient-consistency",
            format!("central differences vs declared gradient, relative tolerance {:.1e}", samples.grad_tol),
        ));
    }

    // Quadratic lower bound on the potential.
    {
        let mut tr = Tracker::new();
        for x in samples.displacement_samples() {
            let q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let bound = -forcing.beta * q - forcing.m_f;
            tr.observe(forcing.density(&x) - bound, &x);
        }
        checks.push(tr.into_check(
            "potential-lower-bound",
            format!("F >= -beta |x|^2 - m_f with beta = {}, m_f = {}", forcing.beta, forcing.m_f),
        ));
    }

    // Same lower bound on grad F . x - F.
    {
        let mut tr = Tracker::new();
        for x in samples.displacement_samples() {
            let g = forcing.grad(&x);
            let gap = g[0] * x[0] + g[1] * x[1] + g[2] * x[2] - forcing.density(&x);
            let q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            tr.observe(gap + forcing.beta * q + forcing.m_f, &x);
        }
        checks.push(tr.into_check("gradient-potential-gap", "grad F . x - F >= -beta |x|^2 - m_f".into()));
    }

    // Admissible beta against the curvature-uniform constant.
    {
        let check = match analytic_constants(params, params.ell, 0.0) {
            Ok(c) => {
                let cap = c.beta_cap(params.length);
                HypothesisCheck {
                    name: "beta-cap".into(),
                    passed: forcing.beta < cap,
                    worst_margin: cap - forcing.beta,
                    witness: None,
                    detail: format!("beta = {} against cap pi^2/(2 gamma3 L^2) = {cap}", forcing.beta),
                }
            }
            Err(e) => HypothesisCheck {
                name: "beta-cap".into(),
                passed: false,
                worst_margin: f64::NEG_INFINITY,
                witness: None,
                detail: format!("not evaluable: {e}"),
            },
        };
        checks.push(check);
    }

    // Growth screen: reports the empirical constant bounding the Hessian
    // magnitude by 1 + sum |x_i|^{p-1} on the box. The box is far too small
    // to certify the exponent itself, so the pass condition is finiteness;
    // the fitted constant is informational.
    {
        let p = forcing.p;
        let mut c_f: f64 = 0.0;
        let mut finite = true;
        for x in samples.displacement_samples() {
            let h = forcing.hess(&x);
            let mag = h.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            if !mag.is_finite() {
                finite = false;
                break;
            }
            let weight = 1.0 + x.iter().fold(0.0f64, |a, v| a + v.abs().powf(p - 1.0));
            c_f = c_f.max(mag / weight);
        }
        checks.push(HypothesisCheck {
            name: "growth-constant".into(),
            passed: finite,
            worst_margin: if finite { 0.0 } else { f64::NEG_INFINITY },
            witness: None,
            detail: format!("empirical growth constant {c_f:.3e} at declared exponent p = {p} (sampled box only)"),
        });
    }

    // Damping: zero at the origin, increasing on samples.
    {
        let mut tr = Tracker::new();
        for (i, law) in damping.laws.iter().enumerate() {
            tr.observe(-law.eval(0.0).abs(), &[i as f64, 0.0]);
            let mut prev: Option<f64> = None;
            for s in samples.velocity_samples() {
                let g = law.eval(s);
                if let Some(pg) = prev {
                    // strict increase between consecutive sample points
                    tr.observe(g - pg - f64::MIN_POSITIVE, &[i as f64, s]);
                }
                prev = Some(g);
            }
        }
        checks.push(tr.into_check("damping-monotone", "g_i(0) = 0 and g_i increasing on sampled points".into()));
    }

    // Sector bounds for |s| > 1.
    {
        let mut tr = Tracker::new();
        for (i, law) in damping.laws.iter().enumerate() {
            for s in samples.velocity_samples().filter(|s| s.abs() > 1.0) {
                let prod = law.eval(s) * s;
                tr.observe(prod - damping.m[i] * s * s, &[i as f64, s]);
                tr.observe(damping.big_m[i] * s * s - prod, &[i as f64, s]);
            }
        }
        checks.push(tr.into_check("damping-sector", "m_i s^2 <= g_i(s) s <= M_i s^2 for sampled |s| > 1".into()));
    }

    // Two-sided slope bound on all samples, only when claimed.
    if damping.globally_lipschitz {
        let mut tr = Tracker::new();
        for (i, law) in damping.laws.iter().enumerate() {
            for s in samples.velocity_samples() {
                let d = law.deriv(s);
                tr.observe(d - damping.m[i], &[i as f64, s]);
                tr.observe(damping.big_m[i] - d, &[i as f64, s]);
            }
        }
        checks.push(tr.into_check("damping-lipschitz", "m_i <= g_i'(s) <= M_i on all sampled s".into()));
    }

    Ok(ValidationReport { checks })
}
