use crate::disc::grid::Grid;
use crate::disc::state::{State, TimoshenkoState};
use crate::error::Result;
use crate::model::BeamParams;

/// Dense B x B block, row-major.
pub type Block<const B: usize> = [[f64; B]; B];

/// One strain of the elastic energy, defined on the midpoint of each grid
/// cell as `left . q_j + right . q_{j+1}` (boundary nodes enter as zero).
/// The elastic energy is (h/2) sum over cells of weight * strain^2.
#[derive(Debug, Clone, Copy)]
pub struct StrainSpec<const B: usize> {
    pub weight: f64,
    pub left: [f64; B],
    pub right: [f64; B],
}

/// Constant-coefficient elastic operator on a uniform Dirichlet grid,
/// stored as the two distinct blocks of its block-tridiagonal matrix.
/// Symmetry holds by construction: the operator is the gradient of the
/// cell-sum energy with respect to the h-weighted inner product.
#[derive(Debug, Clone)]
pub struct ElasticStencil<const B: usize> {
    strains: Vec<StrainSpec<B>>,
    diag: Block<B>,
    upper: Block<B>,
}

impl<const B: usize> ElasticStencil<B> {
    pub fn new(strains: Vec<StrainSpec<B>>) -> Self {
        let mut diag = [[0.0; B]; B];
        let mut upper = [[0.0; B]; B];
        for s in &strains {
            for i in 0..B {
                for j in 0..B {
                    diag[i][j] += s.weight * (s.left[i] * s.left[j] + s.right[i] * s.right[j]);
                    upper[i][j] += s.weight * s.left[i] * s.right[j];
                }
            }
        }
        Self { strains, diag, upper }
    }

    pub fn diag_block(&self) -> &Block<B> {
        &self.diag
    }

    pub fn upper_block(&self) -> &Block<B> {
        &self.upper
    }

    pub fn lower_block(&self) -> Block<B> {
        let mut l = [[0.0; B]; B];
        for i in 0..B {
            for j in 0..B {
                l[i][j] = self.upper[j][i];
            }
        }
        l
    }

    /// out = A q for node-major packed q of length B*n.
    pub fn apply(&self, q: &[f64], out: &mut [f64]) {
        let n = q.len() / B;
        debug_assert_eq!(q.len(), B * n);
        debug_assert_eq!(out.len(), B * n);
        let lower = self.lower_block();
        for node in 0..n {
            let base = B * node;
            for i in 0..B {
                let mut acc = 0.0;
                for j in 0..B {
                    acc += self.diag[i][j] * q[base + j];
                    if node > 0 {
                        acc += lower[i][j] * q[base - B + j];
                    }
                    if node + 1 < n {
                        acc += self.upper[i][j] * q[base + B + j];
                    }
                }
                out[base + i] = acc;
            }
        }
    }

    /// Elastic energy (h/2) sum over cells of weight * strain^2, evaluated
    /// directly from the strain definitions.
    pub fn energy(&self, h: f64, q: &[f64]) -> f64 {
        let n = q.len() / B;
        let zero = [0.0; B];
        let mut total = 0.0;
        for cell in 0..=n {
            let left: &[f64] = if cell == 0 { &zero } else { &q[B * (cell - 1)..B * cell] };
            let right: &[f64] = if cell == n { &zero } else { &q[B * cell..B * (cell + 1)] };
            for s in &self.strains {
                let mut e = 0.0;
                for i in 0..B {
                    e += s.left[i] * left[i] + s.right[i] * right[i];
                }
                total += s.weight * e * e;
            }
        }
        0.5 * h * total
    }

    /// Midpoint values of one strain over all n+1 cells.
    pub fn strain_values(&self, which: usize, q: &[f64]) -> Vec<f64> {
        let n = q.len() / B;
        let s = &self.strains[which];
        let zero = [0.0; B];
        (0..=n)
            .map(|cell| {
                let left: &[f64] = if cell == 0 { &zero } else { &q[B * (cell - 1)..B * cell] };
                let right: &[f64] = if cell == n { &zero } else { &q[B * cell..B * (cell + 1)] };
                (0..B).map(|i| s.left[i] * left[i] + s.right[i] * right[i]).sum()
            })
            .collect()
    }
}

/// Coupled stiffness of the curved-beam system together with the first and
/// second difference operators it is built from.
#[derive(Debug, Clone)]
pub struct BresseOperators {
    pub params: BeamParams,
    pub grid: Grid,
    stencil: ElasticStencil<3>,
}

/// Assemble the curved-beam stiffness on a grid. At zero curvature the
/// longitudinal channel decouples exactly from the other two.
pub fn assemble(params: &BeamParams, grid: &Grid) -> Result<BresseOperators> {
    params.validate()?;
    let h = grid.h();
    let ell = params.ell;
    let strains = vec![
        // bending: psi_x
        StrainSpec { weight: params.b, left: [0.0, -1.0 / h, 0.0], right: [0.0, 1.0 / h, 0.0] },
        // shear: phi_x + psi + ell w (midpoint average for the 0th-order part)
        StrainSpec { weight: params.k, left: [-1.0 / h, 0.5, 0.5 * ell], right: [1.0 / h, 0.5, 0.5 * ell] },
        // stretch: w_x - ell phi
        StrainSpec { weight: params.k0, left: [-0.5 * ell, 0.0, -1.0 / h], right: [-0.5 * ell, 0.0, 1.0 / h] },
    ];
    Ok(BresseOperators { params: *params, grid: *grid, stencil: ElasticStencil::new(strains) })
}

impl BresseOperators {
    pub fn stencil(&self) -> &ElasticStencil<3> {
        &self.stencil
    }

    pub fn apply_stiffness(&self, q: &[f64], out: &mut [f64]) {
        self.stencil.apply(q, out);
    }

    /// Elastic part of the energy norm:
    /// (1/2)(b |psi_x|^2 + k |phi_x + psi + ell w|^2 + k0 |w_x - ell phi|^2).
    pub fn elastic_energy_packed(&self, q: &[f64]) -> f64 {
        self.stencil.energy(self.grid.h(), q)
    }

    pub fn elastic_energy(&self, state: &State) -> f64 {
        let (mut q, mut v) = (Vec::new(), Vec::new());
        state.to_packed(&mut q, &mut v);
        self.elastic_energy_packed(&q)
    }

    /// Quadratic form <A q, q> in the h-weighted inner product; equals twice
    /// the elastic energy to round-off.
    pub fn quadratic_form(&self, q: &[f64]) -> f64 {
        let mut aq = vec![0.0; q.len()];
        self.apply_stiffness(q, &mut aq);
        self.grid.h() * q.iter().zip(&aq).map(|(a, b)| a * b).sum::<f64>()
    }

    /// First differences on cell midpoints, with Dirichlet extension: n+1
    /// values (u_{j+1} - u_j)/h for j = 0..n.
    pub fn dx_midpoints(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let h = self.grid.h();
        (0..=n)
            .map(|j| {
                let left = if j == 0 { 0.0 } else { u[j - 1] };
                let right = if j == n { 0.0 } else { u[j] };
                (right - left) / h
            })
            .collect()
    }

    /// Standard second difference with Dirichlet extension.
    pub fn dxx(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let h2 = self.grid.h() * self.grid.h();
        (0..n)
            .map(|j| {
                let left = if j == 0 { 0.0 } else { u[j - 1] };
                let right = if j + 1 == n { 0.0 } else { u[j + 1] };
                (right - 2.0 * u[j] + left) / h2
            })
            .collect()
    }
}

/// Stiffness of the flat-beam system (two coupled channels).
#[derive(Debug, Clone)]
pub struct TimoshenkoOperators {
    pub params: BeamParams,
    pub grid: Grid,
    stencil: ElasticStencil<2>,
}

pub fn assemble_timoshenko(params: &BeamParams, grid: &Grid) -> Result<TimoshenkoOperators> {
    params.validate()?;
    let h = grid.h();
    let strains = vec![
        StrainSpec { weight: params.b, left: [0.0, -1.0 / h], right: [0.0, 1.0 / h] },
        StrainSpec { weight: params.k, left: [-1.0 / h, 0.5], right: [1.0 / h, 0.5] },
    ];
    Ok(TimoshenkoOperators { params: *params, grid: *grid, stencil: ElasticStencil::new(strains) })
}

impl TimoshenkoOperators {
    pub fn stencil(&self) -> &ElasticStencil<2> {
        &self.stencil
    }

    pub fn apply_stiffness(&self, q: &[f64], out: &mut [f64]) {
        self.stencil.apply(q, out);
    }

    pub fn elastic_energy_packed(&self, q: &[f64]) -> f64 {
        self.stencil.energy(self.grid.h(), q)
    }

    pub fn elastic_energy(&self, state: &TimoshenkoState) -> f64 {
        let (mut q, mut v) = (Vec::new(), Vec::new());
        state.to_packed(&mut q, &mut v);
        self.elastic_energy_packed(&q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::grid::make_grid;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn params(ell: f64) -> BeamParams {
        BeamParams::new(1.0, 1.2, 1.5, 2.0, 1.0, std::f64::consts::PI, ell).unwrap()
    }

    #[test]
    fn operator_is_symmetric_in_weighted_inner_product() {
        let grid = make_grid(std::f64::consts::PI, 17).unwrap();
        let ops = assemble(&params(0.3), &grid).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let n3 = 3 * grid.n();
        for _ in 0..50 {
            let u: Vec<f64> = (0..n3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut au = vec![0.0; n3];
            let mut av = vec![0.0; n3];
            ops.apply_stiffness(&u, &mut au);
            ops.apply_stiffness(&v, &mut av);
            let lhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rhs: f64 = u.iter().zip(&av).map(|(a, b)| a * b).sum();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() / scale < 1e-12, "asymmetry {lhs} vs {rhs}");
        }
    }

    #[test]
    fn quadratic_form_matches_strain_energy() {
        let grid = make_grid(std::f64::consts::PI, 23).unwrap();
        let ops = assemble(&params(0.25), &grid).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let q: Vec<f64> = (0..3 * grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let qf = ops.quadratic_form(&q);
            let en = 2.0 * ops.elastic_energy_packed(&q);
            assert!((qf - en).abs() <= 1e-12 * qf.abs().max(1.0), "{qf} vs {en}");
        }
    }

    #[test]
    fn zero_curvature_decouples_longitudinal_channel() {
        let grid = make_grid(2.0, 12).unwrap();
        let ops = assemble(&params(0.0), &grid).unwrap();
        // coupling entries of the blocks vanish identically
        let d = ops.stencil().diag_block();
        let u = ops.stencil().upper_block();
        for b in [d, u] {
            for i in 0..2 {
                assert_eq!(b[i][2], 0.0);
                assert_eq!(b[2][i], 0.0);
            }
        }
        // a pure longitudinal state produces no transverse force
        let n = grid.n();
        let mut q = vec![0.0; 3 * n];
        for i in 0..n {
            q[3 * i + 2] = (i as f64 + 1.0).sin();
        }
        let mut out = vec![0.0; 3 * n];
        ops.apply_stiffness(&q, &mut out);
        for i in 0..n {
            assert_eq!(out[3 * i], 0.0);
            assert_eq!(out[3 * i + 1], 0.0);
        }
    }

    #[test]
    fn quadratic_form_of_pure_shear_mode() {
        // With only psi nonzero the energy reduces to
        // b |psi_x|^2 + k |avg(psi)|^2 in the midpoint quadrature.
        let grid = make_grid(std::f64::consts::PI, 31).unwrap();
        let p = params(0.37);
        let ops = assemble(&p, &grid).unwrap();
        let psi = grid.sine_mode(1);
        let n = grid.n();
        let mut q = vec![0.0; 3 * n];
        for i in 0..n {
            q[3 * i + 1] = psi[i];
        }
        let h = grid.h();
        let mut dsum = 0.0;
        let mut msum = 0.0;
        for j in 0..=n {
            let left = if j == 0 { 0.0 } else { psi[j - 1] };
            let right = if j == n { 0.0 } else { psi[j] };
            dsum += ((right - left) / h) * ((right - left) / h);
            msum += 0.25 * (left + right) * (left + right);
        }
        let expect = p.b * h * dsum + p.k * h * msum;
        let got = ops.quadratic_form(&q);
        assert!((got - expect).abs() < 1e-12 * expect, "{got} vs {expect}");
    }

    #[test]
    fn flat_system_matches_curved_at_zero_curvature() {
        let grid = make_grid(1.7, 9).unwrap();
        let p = params(0.0);
        let curved = assemble(&p, &grid).unwrap();
        let flat = assemble_timoshenko(&p, &grid).unwrap();
        let n = grid.n();
        let mut rng = StdRng::seed_from_u64(3);
        let q2: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut q3 = vec![0.0; 3 * n];
        for i in 0..n {
            q3[3 * i] = q2[2 * i];
            q3[3 * i + 1] = q2[2 * i + 1];
        }
        let mut out2 = vec![0.0; 2 * n];
        let mut out3 = vec![0.0; 3 * n];
        flat.apply_stiffness(&q2, &mut out2);
        curved.apply_stiffness(&q3, &mut out3);
        for i in 0..n {
            assert!((out2[2 * i] - out3[3 * i]).abs() < 1e-14);
            assert!((out2[2 * i + 1] - out3[3 * i + 1]).abs() < 1e-14);
        }
        assert!((flat.elastic_energy_packed(&q2) - curved.elastic_energy_packed(&q3)).abs() < 1e-13);
    }
}
