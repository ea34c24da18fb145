use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Uniform Dirichlet grid on (0, L): `n` interior nodes at x_j = j h with
/// h = L/(n+1). Boundary values are identically zero and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    h: f64,
    length: f64,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(CoreError::InvalidParameter(format!("length must be positive, got {length}")));
        }
        if n < 2 {
            return Err(CoreError::InvalidParameter(format!("need at least 2 interior nodes, got {n}")));
        }
        Ok(Self { n, h: length / (n + 1) as f64, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Interior node coordinate, j in 0..n.
    pub fn node(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    /// Nodal values of sin(m pi x / L).
    pub fn sine_mode(&self, m: usize) -> Vec<f64> {
        self.nodes().map(|x| (m as f64 * PI * x / self.length).sin()).collect()
    }

    /// Exact constant of the discrete Poincare inequality
    /// |u| <= c |u_x| on this grid; approaches L/pi from above as h -> 0.
    pub fn poincare_constant(&self) -> f64 {
        self.h / (2.0 * (PI * self.h / (2.0 * self.length)).sin())
    }
}

/// Build a uniform Dirichlet grid; fails for fewer than two interior nodes.
pub fn make_grid(length: f64, n: usize) -> Result<Grid> {
    Grid::new(length, n)
}
