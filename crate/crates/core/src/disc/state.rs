use serde::{Deserialize, Serialize};

use crate::disc::grid::Grid;
use crate::error::{CoreError, Result};

/// Phase-space point of the curved-beam system: three nodal displacement
/// fields and three nodal velocity fields on a Dirichlet grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub w: Vec<f64>,
    pub phit: Vec<f64>,
    pub psit: Vec<f64>,
    pub wt: Vec<f64>,
}

/// Phase-space point of the flat-beam system: vertical displacement and
/// shear angle with their velocities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimoshenkoState {
    pub t: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub phit: Vec<f64>,
    pub psit: Vec<f64>,
}

fn check_fields(fields: &[&[f64]], t: f64) -> Result<usize> {
    let n = fields[0].len();
    for f in fields {
        if f.len() != n {
            return Err(CoreError::InvalidParameter("state fields must share one length".into()));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidParameter("state fields must be finite".into()));
        }
    }
    if !t.is_finite() || t < 0.0 {
        return Err(CoreError::InvalidParameter(format!("state time must be finite and nonnegative, got {t}")));
    }
    Ok(n)
}

impl State {
    pub fn zero(grid: &Grid) -> Self {
        let z = vec![0.0; grid.n()];
        Self { t: 0.0, phi: z.clone(), psi: z.clone(), w: z.clone(), phit: z.clone(), psit: z.clone(), wt: z }
    }

    pub fn new(
        t: f64,
        phi: Vec<f64>,
        psi: Vec<f64>,
        w: Vec<f64>,
        phit: Vec<f64>,
        psit: Vec<f64>,
        wt: Vec<f64>,
    ) -> Result<Self> {
        check_fields(&[&phi, &psi, &w, &phit, &psit, &wt], t)?;
        Ok(Self { t, phi, psi, w, phit, psit, wt })
    }

    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn displacements(&self) -> [&[f64]; 3] {
        [&self.phi, &self.psi, &self.w]
    }

    pub fn velocities(&self) -> [&[f64]; 3] {
        [&self.phit, &self.psit, &self.wt]
    }

    /// Node-major packing (phi_i, psi_i, w_i) of displacements and velocities.
    pub fn to_packed(&self, q: &mut Vec<f64>, v: &mut Vec<f64>) {
        let n = self.n();
        q.clear();
        v.clear();
        q.reserve(3 * n);
        v.reserve(3 * n);
        for i in 0..n {
            q.extend_from_slice(&[self.phi[i], self.psi[i], self.w[i]]);
            v.extend_from_slice(&[self.phit[i], self.psit[i], self.wt[i]]);
        }
    }

    pub fn from_packed(t: f64, q: &[f64], v: &[f64]) -> Self {
        let n = q.len() / 3;
        debug_assert_eq!(q.len(), 3 * n);
        debug_assert_eq!(v.len(), 3 * n);
        let mut s = Self {
            t,
            phi: Vec::with_capacity(n),
            psi: Vec::with_capacity(n),
            w: Vec::with_capacity(n),
            phit: Vec::with_capacity(n),
            psit: Vec::with_capacity(n),
            wt: Vec::with_capacity(n),
        };
        for i in 0..n {
            s.phi.push(q[3 * i]);
            s.psi.push(q[3 * i + 1]);
            s.w.push(q[3 * i + 2]);
            s.phit.push(v[3 * i]);
            s.psit.push(v[3 * i + 1]);
            s.wt.push(v[3 * i + 2]);
        }
        s
    }

    /// Drop the longitudinal channel: (phi, psi, phi_t, psi_t).
    pub fn project(&self) -> TimoshenkoState {
        TimoshenkoState {
            t: self.t,
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            phit: self.phit.clone(),
            psit: self.psit.clone(),
        }
    }

    /// Componentwise difference, keeping the time of `self`.
    pub fn difference(&self, other: &Self) -> Self {
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self {
            t: self.t,
            phi: sub(&self.phi, &other.phi),
            psi: sub(&self.psi, &other.psi),
            w: sub(&self.w, &other.w),
            phit: sub(&self.phit, &other.phit),
            psit: sub(&self.psit, &other.psit),
            wt: sub(&self.wt, &other.wt),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for f in [&mut self.phi, &mut self.psi, &mut self.w, &mut self.phit, &mut self.psit, &mut self.wt] {
            for v in f.iter_mut() {
                *v *= factor;
            }
        }
    }

    /// self + eps * other.
    pub fn add_scaled(&self, other: &Self, eps: f64) -> Self {
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + eps * y).collect();
        Self {
            t: self.t,
            phi: add(&self.phi, &other.phi),
            psi: add(&self.psi, &other.psi),
            w: add(&self.w, &other.w),
            phit: add(&self.phit, &other.phit),
            psit: add(&self.psit, &other.psit),
            wt: add(&self.wt, &other.wt),
        }
    }
}

impl TimoshenkoState {
    pub fn zero(grid: &Grid) -> Self {
        let z = vec![0.0; grid.n()];
        Self { t: 0.0, phi: z.clone(), psi: z.clone(), phit: z.clone(), psit: z }
    }

    pub fn new(t: f64, phi: Vec<f64>, psi: Vec<f64>, phit: Vec<f64>, psit: Vec<f64>) -> Result<Self> {
        check_fields(&[&phi, &psi, &phit, &psit], t)?;
        Ok(Self { t, phi, psi, phit, psit })
    }

    pub fn n(&self) -> usize {
        self.phi.len()
    }

    /// Embed into the curved-beam phase space with zero longitudinal channel.
    pub fn lift(&self) -> State {
        let z = vec![0.0; self.n()];
        State {
            t: self.t,
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            w: z.clone(),
            phit: self.phit.clone(),
            psit: self.psit.clone(),
            wt: z,
        }
    }

    pub fn to_packed(&self, q: &mut Vec<f64>, v: &mut Vec<f64>) {
        let n = self.n();
        q.clear();
        v.clear();
        for i in 0..n {
            q.extend_from_slice(&[self.phi[i], self.psi[i]]);
            v.extend_from_slice(&[self.phit[i], self.psit[i]]);
        }
    }

    pub fn from_packed(t: f64, q: &[f64], v: &[f64]) -> Self {
        let n = q.len() / 2;
        let mut s = Self {
            t,
            phi: Vec::with_capacity(n),
            psi: Vec::with_capacity(n),
            phit: Vec::with_capacity(n),
            psit: Vec::with_capacity(n),
        };
        for i in 0..n {
            s.phi.push(q[2 * i]);
            s.psi.push(q[2 * i + 1]);
            s.phit.push(v[2 * i]);
            s.psit.push(v[2 * i + 1]);
        }
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y): (&f64, &f64)| x - y).collect();
        Self {
            t: self.t,
            phi: sub(&self.phi, &other.phi),
            psi: sub(&self.psi, &other.psi),
            phit: sub(&self.phit, &other.phit),
            psit: sub(&self.psit, &other.psit),
        }
    }
}
