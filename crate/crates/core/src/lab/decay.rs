use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Least-squares fit of an energy series to C e^{-alpha t} + floor with
/// nonnegative rate and floor. `gamma` is the prefactor relative to the
/// first sample, gamma = C / E(0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub gamma: f64,
    pub alpha: f64,
    pub floor: f64,
    pub rmse: f64,
    /// Set when the series carries no signal (constant zero).
    pub degenerate: bool,
}

fn profiled_cost(series: &[(f64, f64)], alpha: f64) -> (f64, f64, f64) {
    // optimal (c, floor) for fixed alpha, then the residual sum of squares
    let n = series.len() as f64;
    let (mut saa, mut sa, mut sae, mut se) = (0.0, 0.0, 0.0, 0.0);
    for &(t, e) in series {
        let a = (-alpha * t).exp();
        saa += a * a;
        sa += a;
        sae += a * e;
        se += e;
    }
    let det = saa * n - sa * sa;
    let (mut c, mut floor) = if det.abs() > 1e-300 {
        ((sae * n - sa * se) / det, (saa * se - sa * sae) / det)
    } else {
        (0.0, se / n)
    };
    if floor < 0.0 {
        floor = 0.0;
        c = if saa > 0.0 { sae / saa } else { 0.0 };
    }
    if c < 0.0 {
        c = 0.0;
        floor = (se / n).max(0.0);
    }
    let mut rss = 0.0;
    for &(t, e) in series {
        let r = e - c * (-alpha * t).exp() - floor;
        rss += r * r;
    }
    (rss, c, floor)
}

fn log_domain_rate(series: &[(f64, f64)], floor: f64) -> Option<f64> {
    let zmax = series.iter().map(|&(_, e)| e - floor).fold(f64::NEG_INFINITY, f64::max);
    if !(zmax > 0.0) {
        return None;
    }
    let mut pts: Vec<(f64, f64)> = series
        .iter()
        .filter_map(|&(t, e)| {
            let z = e - floor;
            if z > 1e-3 * zmax {
                Some((t, z.ln()))
            } else {
                None
            }
        })
        .collect();
    if pts.len() < 5 {
        pts = series
            .iter()
            .filter_map(|&(t, e)| {
                let z = e - floor;
                if z > 0.0 {
                    Some((t, z.ln()))
                } else {
                    None
                }
            })
            .collect();
    }
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let det = stt * n - st * st;
    if det.abs() < 1e-300 {
        return None;
    }
    Some((-(sty * n - st * sy) / det).max(0.0))
}

/// Fit a decay series by alternating minimization: a log-domain rate
/// estimate after floor subtraction, then the exact linear solve for the
/// prefactor and floor, five rounds, followed by a deterministic
/// golden-section polish of the profiled rate. No black-box optimizer.
pub fn fit_decay(series: &[(f64, f64)]) -> Result<DecayFit> {
    if series.len() < 20 {
        return Err(CoreError::Precondition(format!(
            "decay fit needs at least 20 samples, got {}",
            series.len()
        )));
    }
    for pair in series.windows(2) {
        if !(pair[1].0 > pair[0].0) {
            return Err(CoreError::Precondition("sample times must be strictly increasing".into()));
        }
    }
    if series.iter().any(|&(t, e)| !t.is_finite() || !e.is_finite()) {
        return Err(CoreError::DegenerateSeries("series contains non-finite values".into()));
    }

    let e0 = series[0].1;
    let emax = series.iter().map(|&(_, e)| e.abs()).fold(0.0, f64::max);
    if emax < 1e-300 {
        return Ok(DecayFit { gamma: 0.0, alpha: 0.0, floor: 0.0, rmse: 0.0, degenerate: true });
    }
    let emin = series.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    let espread = series.iter().map(|&(_, e)| e).fold(f64::NEG_INFINITY, f64::max) - emin;
    if espread <= 1e-12 * emax {
        // constant signal: all floor, no decay
        let floor = (series.iter().map(|&(_, e)| e).sum::<f64>() / series.len() as f64).max(0.0);
        return Ok(DecayFit { gamma: 0.0, alpha: 0.0, floor, rmse: 0.0, degenerate: false });
    }

    let mut floor = emin.max(0.0);
    let mut alpha = 0.0;
    for _ in 0..5 {
        if let Some(a) = log_domain_rate(series, floor) {
            alpha = a;
        }
        let (_, _, f) = profiled_cost(series, alpha);
        floor = f;
    }

    // golden-section polish of the profiled cost around the rate estimate
    let (mut lo, mut hi) = if alpha > 0.0 { (0.25 * alpha, 4.0 * alpha) } else { (0.0, 1.0 / span(series)) };
    let gr = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let mut f1 = profiled_cost(series, x1).0;
    let mut f2 = profiled_cost(series, x2).0;
    for _ in 0..200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = profiled_cost(series, x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = profiled_cost(series, x2).0;
        }
    }
    let polished = 0.5 * (lo + hi);
    if profiled_cost(series, polished).0 <= profiled_cost(series, alpha).0 {
        alpha = polished;
    }
    let (rss, c, floor) = profiled_cost(series, alpha);
    let rmse = (rss / series.len() as f64).sqrt();
    let gamma = if e0.abs() > 1e-300 { c / e0 } else { 0.0 };
    Ok(DecayFit { gamma, alpha, floor, rmse, degenerate: false })
}

fn span(series: &[(f64, f64)]) -> f64 {
    (series.last().unwrap().0 - series[0].0).max(1e-300)
}

/// Refit on the tail half of a series; used to judge stationarity of a fit.
pub fn fit_decay_tail(series: &[(f64, f64)]) -> Result<DecayFit> {
    let start = series.len() / 2;
    fit_decay(&series[start..])
}
