use crate::disc::{dist_h, dist_h0, dist_hl, Grid, State, TimoshenkoState};
use crate::error::{CoreError, Result};
use crate::model::BeamParams;

/// Norm used to compare phase-space points of the curved system.
#[derive(Debug, Clone, Copy)]
pub enum StateNorm<'a> {
    /// Standard norm: gradients plus velocities, unweighted.
    Standard,
    /// Energy norm with the given coefficients.
    Energy(&'a BeamParams),
}

/// One-sided Hausdorff semidistance sup_{a in A} inf_{b in B} d(a, b) over
/// finite sets. Not symmetric.
pub fn hausdorff_by<T>(a: &[T], b: &[T], dist: impl Fn(&T, &T) -> f64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(CoreError::EmptySet);
    }
    let mut sup = 0.0f64;
    for x in a {
        let mut inf = f64::INFINITY;
        for y in b {
            let d = dist(x, y);
            if d < inf {
                inf = d;
            }
        }
        if inf > sup {
            sup = inf;
        }
    }
    Ok(sup)
}

/// Semidistance between sets of curved-beam states in the selected norm.
pub fn hausdorff_semidistance(
    a: &[State],
    b: &[State],
    grid: &Grid,
    norm: StateNorm<'_>,
) -> Result<f64> {
    match norm {
        StateNorm::Standard => hausdorff_by(a, b, |x, y| dist_h(grid, x, y)),
        StateNorm::Energy(params) => hausdorff_by(a, b, |x, y| dist_hl(params, grid, x, y)),
    }
}

/// Semidistance between sets of flat-beam states.
pub fn hausdorff_semidistance_flat(
    a: &[TimoshenkoState],
    b: &[TimoshenkoState],
    grid: &Grid,
) -> Result<f64> {
    hausdorff_by(a, b, |x, y| dist_h0(grid, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::make_grid;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn point(grid: &Grid, rng: &mut StdRng) -> State {
        let mut s = State::zero(grid);
        for f in [&mut s.phi, &mut s.psi, &mut s.w, &mut s.phit, &mut s.psit, &mut s.wt] {
            for v in f.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        s
    }

    #[test]
    fn subset_gives_zero() {
        let grid = make_grid(1.0, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        let b: Vec<State> = (0..10).map(|_| point(&grid, &mut rng)).collect();
        let a: Vec<State> = b[2..5].to_vec();
        let d = hausdorff_semidistance(&a, &b, &grid, StateNorm::Standard).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn singletons_give_plain_distance() {
        let grid = make_grid(1.0, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(6);
        let x = point(&grid, &mut rng);
        let y = point(&grid, &mut rng);
        let d = hausdorff_semidistance(std::slice::from_ref(&x), std::slice::from_ref(&y), &grid, StateNorm::Standard)
            .unwrap();
        assert!((d - dist_h(&grid, &x, &y)).abs() == 0.0);
    }

    #[test]
    fn asymmetric_witness_pair() {
        // A = {0}, B = {0, far}: d(A, B) = 0 but d(B, A) > 0.
        let grid = make_grid(1.0, 6).unwrap();
        let zero = State::zero(&grid);
        let mut far = State::zero(&grid);
        far.phi = grid.sine_mode(1);
        let a = vec![zero.clone()];
        let b = vec![zero, far];
        let dab = hausdorff_semidistance(&a, &b, &grid, StateNorm::Standard).unwrap();
        let dba = hausdorff_semidistance(&b, &a, &grid, StateNorm::Standard).unwrap();
        assert_eq!(dab, 0.0);
        assert!(dba > 0.1);
    }

    #[test]
    fn empty_sets_are_rejected() {
        let grid = make_grid(1.0, 6).unwrap();
        let x = vec![State::zero(&grid)];
        assert!(hausdorff_semidistance(&x, &[], &grid, StateNorm::Standard).is_err());
        assert!(hausdorff_semidistance(&[], &x, &grid, StateNorm::Standard).is_err());
    }

    #[test]
    fn matches_independent_quadratic_scan() {
        let grid = make_grid(2.0, 8).unwrap();
        let params = BeamParams::default();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let a: Vec<State> = (0..30).map(|_| point(&grid, &mut rng)).collect();
            let b: Vec<State> = (0..25).map(|_| point(&grid, &mut rng)).collect();
            let fast = hausdorff_semidistance(&a, &b, &grid, StateNorm::Energy(&params)).unwrap();
            // plain reimplementation: index loops, explicit accumulators
            let mut sup = 0.0f64;
            for i in 0..a.len() {
                let mut inf = f64::INFINITY;
                for j in 0..b.len() {
                    let d = dist_hl(&params, &grid, &a[i], &b[j]);
                    inf = if d < inf { d } else { inf };
                }
                sup = if inf > sup { inf } else { sup };
            }
            assert_eq!(fast, sup);
        }
    }
}
