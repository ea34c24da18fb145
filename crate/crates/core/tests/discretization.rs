//! Property tests of the spatial discretization: norm equivalence with the
//! closed-form constants, second-order consistency of the coupled stiffness
//! under grid refinement, and the discrete Poincare inequality with its
//! spectral-floor counterpart.

use std::f64::consts::PI;

use bresse_core::disc::{
    assemble, h1_seminorm_sq, l2_norm_sq, make_grid, norm_h_sq, norm_hl_sq, State,
};
use bresse_core::integrate::{BlockFactor, UniformBlockTridiag};
use bresse_core::model::analytic_constants;
use bresse_core::BeamParams;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_state(grid: &bresse_core::Grid, rng: &mut StdRng) -> State {
    let mut s = State::zero(grid);
    for f in [&mut s.phi, &mut s.psi, &mut s.w, &mut s.phit, &mut s.psit, &mut s.wt] {
        for v in f.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    s
}

#[test]
fn norm_equivalence_constants_hold_on_random_states() {
    let params = BeamParams::default();
    let ell0 = 0.45 * params.curvature_cap();
    let constants = analytic_constants(&params, ell0, 0.0).unwrap();
    let grid = make_grid(params.length, 40).unwrap();
    let mut rng = StdRng::seed_from_u64(101);
    for &ell in &[0.0, 0.5 * ell0, ell0] {
        let p = params.with_ell(ell).unwrap();
        for _ in 0..200 {
            let s = random_state(&grid, &mut rng);
            let h_sq = norm_h_sq(&grid, &s);
            let hl_sq = norm_hl_sq(&p, &grid, &s);
            assert!(
                hl_sq <= constants.gamma1 * h_sq * (1.0 + 1e-12),
                "gamma1 violated at ell = {ell}: {hl_sq} vs {}",
                constants.gamma1 * h_sq
            );
            assert!(
                h_sq <= constants.gamma2 * hl_sq * (1.0 + 1e-12),
                "gamma2 violated at ell = {ell}: {h_sq} vs {}",
                constants.gamma2 * hl_sq
            );
        }
    }
}

#[test]
fn gradient_sum_bounded_by_weighted_strains() {
    // |phi_x|^2 + |psi_x|^2 + |w_x|^2
    //   <= gamma3_w (b |psi_x|^2 + k |phi_x+psi+ell w|^2 + k0 |w_x-ell phi|^2)
    let params = BeamParams::default();
    let ell0 = 0.45 * params.curvature_cap();
    let constants = analytic_constants(&params, ell0, 0.0).unwrap();
    let grid = make_grid(params.length, 48).unwrap();
    let mut rng = StdRng::seed_from_u64(55);
    for &ell in &[0.0, 0.5 * ell0, ell0] {
        let p = params.with_ell(ell).unwrap();
        let ops = assemble(&p, &grid).unwrap();
        for _ in 0..200 {
            let s = random_state(&grid, &mut rng);
            let h = grid.h();
            let grads = h1_seminorm_sq(h, &s.phi) + h1_seminorm_sq(h, &s.psi) + h1_seminorm_sq(h, &s.w);
            let strains = 2.0 * ops.elastic_energy(&s);
            assert!(
                grads <= constants.gamma3_weighted * strains * (1.0 + 1e-12),
                "ell = {ell}: {grads} vs {}",
                constants.gamma3_weighted * strains
            );
        }
    }
}

#[test]
fn stiffness_is_second_order_consistent() {
    // manufactured smooth fields against the analytic elastic force
    let params = BeamParams::new(1.0, 1.2, 1.5, 2.0, 1.0, PI, 0.3).unwrap();
    let (b, k, k0, ell, l) = (params.b, params.k, params.k0, params.ell, params.length);
    let phi = |x: f64| (PI * x / l).sin() + 0.4 * (3.0 * PI * x / l).sin();
    let dphi = |x: f64| (PI / l) * (PI * x / l).cos() + 0.4 * (3.0 * PI / l) * (3.0 * PI * x / l).cos();
    let ddphi = |x: f64| {
        -(PI / l) * (PI / l) * (PI * x / l).sin()
            - 0.4 * (3.0 * PI / l) * (3.0 * PI / l) * (3.0 * PI * x / l).sin()
    };
    let psi = |x: f64| (2.0 * PI * x / l).sin();
    let dpsi = |x: f64| (2.0 * PI / l) * (2.0 * PI * x / l).cos();
    let ddpsi = |x: f64| -(2.0 * PI / l) * (2.0 * PI / l) * (2.0 * PI * x / l).sin();
    let w = |x: f64| 0.7 * (PI * x / l).sin();
    let dw = |x: f64| 0.7 * (PI / l) * (PI * x / l).cos();
    let ddw = |x: f64| -0.7 * (PI / l) * (PI / l) * (PI * x / l).sin();

    // continuum force components of the coupled elastic operator
    let f_phi = |x: f64| -k * (ddphi(x) + dpsi(x) + ell * dw(x)) - k0 * ell * (dw(x) - ell * phi(x));
    let f_psi = |x: f64| -b * ddpsi(x) + k * (dphi(x) + psi(x) + ell * w(x));
    let f_w = |x: f64| -k0 * (ddw(x) - ell * dphi(x)) + k * ell * (dphi(x) + psi(x) + ell * w(x));

    let error_at = |n: usize| -> f64 {
        let grid = make_grid(l, n).unwrap();
        let ops = assemble(&params, &grid).unwrap();
        let mut q = vec![0.0; 3 * n];
        for (j, x) in grid.nodes().enumerate() {
            q[3 * j] = phi(x);
            q[3 * j + 1] = psi(x);
            q[3 * j + 2] = w(x);
        }
        let mut out = vec![0.0; 3 * n];
        ops.apply_stiffness(&q, &mut out);
        let mut worst = 0.0f64;
        for (j, x) in grid.nodes().enumerate() {
            worst = worst.max((out[3 * j] - f_phi(x)).abs());
            worst = worst.max((out[3 * j + 1] - f_psi(x)).abs());
            worst = worst.max((out[3 * j + 2] - f_w(x)).abs());
        }
        worst
    };

    let e64 = error_at(64);
    let e128 = error_at(128);
    let e256 = error_at(256);
    let order1 = (e64 / e128).log2() / ((129.0f64 / 65.0).log2());
    let order2 = (e128 / e256).log2() / ((257.0f64 / 129.0).log2());
    assert!(order1 >= 1.9, "order between n=64 and n=128: {order1}");
    assert!(order2 >= 1.9, "order between n=128 and n=256: {order2}");
}

#[test]
fn discrete_poincare_inequality() {
    let l = PI;
    let grid = make_grid(l, 200).unwrap();
    let h = grid.h();
    let c_exact = grid.poincare_constant();
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..300 {
        let u: Vec<f64> = (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l2 = l2_norm_sq(h, &u).sqrt();
        let semi = h1_seminorm_sq(h, &u).sqrt();
        assert!(l2 <= c_exact * semi * (1.0 + 1e-12));
        // random rough vectors sit far below the continuum constant
        assert!(l2 <= (l / PI) * semi);
    }
    // first sine mode: the ratio meets the discrete constant and sits within
    // O(h^2) of the continuum one
    let mode = grid.sine_mode(1);
    let ratio = l2_norm_sq(h, &mode).sqrt() / h1_seminorm_sq(h, &mode).sqrt();
    assert!((ratio - c_exact).abs() <= 1e-10 * c_exact);
    let continuum = l / PI;
    assert!(ratio > continuum);
    let x = PI * h / (2.0 * l);
    assert!((ratio - continuum).abs() <= continuum * x * x, "gap {} vs O(h^2) {}", ratio - continuum, continuum * x * x);
}

#[test]
fn second_difference_spectral_floor() {
    // smallest eigenvalue of the Dirichlet second-difference operator via
    // inverse power iteration, compared against the continuum pi^2/L^2
    let l = 2.0;
    for n in [32usize, 64, 128] {
        let grid = make_grid(l, n).unwrap();
        let h = grid.h();
        let mut m = UniformBlockTridiag::<1>::new(n, [[-1.0 / (h * h)]], [[-1.0 / (h * h)]]);
        for d in m.diag.iter_mut() {
            *d = [[2.0 / (h * h)]];
        }
        let mut factor = BlockFactor::default();
        factor.refactor(&m).unwrap();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            factor.solve_in_place(&mut v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            let mut av = vec![0.0; n];
            m.apply(&v, &mut av);
            lambda = v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>();
        }
        let continuum = PI * PI / (l * l);
        let x = PI * h / (2.0 * l);
        assert!(lambda <= continuum + 1e-9);
        assert!(
            lambda >= continuum * (1.0 - x * x / 2.0),
            "n = {n}: lambda {lambda} below floor {}",
            continuum * (1.0 - x * x / 2.0)
        );
    }
}
