//! Block-tridiagonal linear algebra for the implicit solves. Blocks are
//! tiny (2x2 or 3x3), so the factorization is a block Thomas sweep with
//! partially pivoted Gaussian elimination inside each pivot block.

use crate::disc::Block;
use crate::error::{CoreError, Result};

pub fn mat_mul<const B: usize>(a: &Block<B>, b: &Block<B>) -> Block<B> {
    let mut c = [[0.0; B]; B];
    for i in 0..B {
        for l in 0..B {
            let ail = a[i][l];
            for j in 0..B {
                c[i][j] += ail * b[l][j];
            }
        }
    }
    c
}

pub fn mat_sub<const B: usize>(a: &Block<B>, b: &Block<B>) -> Block<B> {
    let mut c = *a;
    for i in 0..B {
        for j in 0..B {
            c[i][j] -= b[i][j];
        }
    }
    c
}

pub fn transpose<const B: usize>(a: &Block<B>) -> Block<B> {
    let mut t = [[0.0; B]; B];
    for i in 0..B {
        for j in 0..B {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// LU factorization with partial pivoting of one block.
#[derive(Debug, Clone, Copy)]
pub struct SmallLu<const B: usize> {
    lu: Block<B>,
    perm: [usize; B],
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl<const B: usize> SmallLu<B> {
    pub fn factor(a: &Block<B>) -> Option<Self> {
        let mut lu = *a;
        let mut perm = [0usize; B];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for col in 0..B {
            let mut pivot_row = col;
            let mut best = lu[col][col].abs();
            for r in col + 1..B {
                if lu[r][col].abs() > best {
                    best = lu[r][col].abs();
                    pivot_row = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            if pivot_row != col {
                lu.swap(col, pivot_row);
                perm.swap(col, pivot_row);
            }
            let piv = lu[col][col];
            min_pivot = min_pivot.min(piv.abs());
            max_pivot = max_pivot.max(piv.abs());
            for r in col + 1..B {
                let m = lu[r][col] / piv;
                lu[r][col] = m;
                for c in col + 1..B {
                    lu[r][c] -= m * lu[col][c];
                }
            }
        }
        Some(Self { lu, perm, min_pivot, max_pivot })
    }

    pub fn solve_vec(&self, b: &[f64; B]) -> [f64; B] {
        let mut y = [0.0; B];
        for i in 0..B {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[i][j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..B).rev() {
            let mut s = y[i];
            for j in i + 1..B {
                s -= self.lu[i][j] * y[j];
            }
            y[i] = s / self.lu[i][i];
        }
        y
    }

    /// Solve A X = RHS column by column.
    pub fn solve_mat(&self, rhs: &Block<B>) -> Block<B> {
        let mut x = [[0.0; B]; B];
        for col in 0..B {
            let mut b = [0.0; B];
            for row in 0..B {
                b[row] = rhs[row][col];
            }
            let y = self.solve_vec(&b);
            for row in 0..B {
                x[row][col] = y[row];
            }
        }
        x
    }
}

/// Block-tridiagonal matrix whose off-diagonal blocks are constant along
/// the band. The diagonal varies node by node.
#[derive(Debug, Clone)]
pub struct UniformBlockTridiag<const B: usize> {
    pub lower: Block<B>,
    pub upper: Block<B>,
    pub diag: Vec<Block<B>>,
}

impl<const B: usize> UniformBlockTridiag<B> {
    pub fn new(n: usize, lower: Block<B>, upper: Block<B>) -> Self {
        Self { lower, upper, diag: vec![[[0.0; B]; B]; n] }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n();
        for node in 0..n {
            let base = B * node;
            for i in 0..B {
                let mut acc = 0.0;
                for j in 0..B {
                    acc += self.diag[node][i][j] * x[base + j];
                    if node > 0 {
                        acc += self.lower[i][j] * x[base - B + j];
                    }
                    if node + 1 < n {
                        acc += self.upper[i][j] * x[base + B + j];
                    }
                }
                out[base + i] = acc;
            }
        }
    }
}

/// Factorization produced by the block Thomas sweep.
#[derive(Debug, Clone)]
pub struct BlockFactor<const B: usize> {
    mult: Vec<Block<B>>,
    pivots: Vec<SmallLu<B>>,
    upper: Block<B>,
    /// Ratio of the largest to the smallest scalar pivot seen.
    pub pivot_ratio: f64,
}

impl<const B: usize> Default for BlockFactor<B> {
    fn default() -> Self {
        Self { mult: Vec::new(), pivots: Vec::new(), upper: [[0.0; B]; B], pivot_ratio: 0.0 }
    }
}

impl<const B: usize> BlockFactor<B> {
    /// Factor `m`, reusing this factor's buffers.
    pub fn refactor(&mut self, m: &UniformBlockTridiag<B>) -> Result<()> {
        let n = m.n();
        self.upper = m.upper;
        self.mult.clear();
        self.pivots.clear();
        self.mult.reserve(n);
        self.pivots.reserve(n);

        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        let mut schur = m.diag[0];
        let singular = |max: f64, min: f64| CoreError::SingularJacobian {
            cond_estimate: if min > 0.0 { max / min } else { f64::INFINITY },
        };
        for node in 0..n {
            let lu = SmallLu::factor(&schur).ok_or_else(|| singular(max_pivot, 0.0))?;
            min_pivot = min_pivot.min(lu.min_pivot);
            max_pivot = max_pivot.max(lu.max_pivot);
            self.pivots.push(lu);
            if node + 1 < n {
                // W = lower * inv(schur):  schur^T W^T = lower^T
                let lut = SmallLu::factor(&transpose(&schur)).ok_or_else(|| singular(max_pivot, 0.0))?;
                let wt = lut.solve_mat(&transpose(&m.lower));
                let w = transpose(&wt);
                schur = mat_sub(&m.diag[node + 1], &mat_mul(&w, &m.upper));
                self.mult.push(w);
            }
        }
        self.pivot_ratio = if min_pivot > 0.0 { max_pivot / min_pivot } else { f64::INFINITY };
        if !self.pivot_ratio.is_finite() || self.pivot_ratio > 1e15 {
            return Err(singular(max_pivot, min_pivot));
        }
        Ok(())
    }

    /// Solve M x = rhs in place.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.pivots.len();
        debug_assert_eq!(rhs.len(), B * n);
        // forward: rhs_i -= W_i rhs_{i-1}
        for node in 1..n {
            let w = &self.mult[node - 1];
            let (prev, cur) = rhs.split_at_mut(B * node);
            let prev = &prev[B * (node - 1)..];
            for i in 0..B {
                let mut acc = cur[i];
                for j in 0..B {
                    acc -= w[i][j] * prev[j];
                }
                cur[i] = acc;
            }
        }
        // backward: x_i = solve(schur_i, rhs_i - U x_{i+1})
        for node in (0..n).rev() {
            let mut b = [0.0; B];
            for i in 0..B {
                b[i] = rhs[B * node + i];
            }
            if node + 1 < n {
                for i in 0..B {
                    for j in 0..B {
                        b[i] -= self.upper[i][j] * rhs[B * (node + 1) + j];
                    }
                }
            }
            let x = self.pivots[node].solve_vec(&b);
            rhs[B * node..B * node + B].copy_from_slice(&x);
        }
    }
}
