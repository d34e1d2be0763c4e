mod common;

use std::sync::Arc;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rotsplit::schemes::{method_step, srkn_step, std2_step, strang_wrap, StepStats};
use rotsplit::spectral::rot_step;
use rotsplit::{
    b_flow, dissipative_nonlinear_flow, integrate, Method, NonlinearTerm, PotentialFn, Problem, SplittingScheme,
    WaveFunction,
};
use rotsplit_core::{decompose_step, MagnusOrder, QuadraticHamiltonian};

fn problem(g: f64, lambda: f64) -> Problem {
    Problem::new(
        QuadraticHamiltonian::modulated_trap(4.0, 0.1),
        NonlinearTerm::cubic(g).with_damping(lambda),
        MagnusOrder::Four,
    )
    .unwrap()
}

fn random_state(grid: &Arc<rotsplit::Grid>, rng: &mut impl Rng, amp: f64) -> WaveFunction {
    let values = (0..grid.spec.len())
        .map(|_| Complex64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
        .collect();
    WaveFunction::from_values(grid.clone(), values).unwrap()
}

fn worst(a: &WaveFunction, b: &WaveFunction) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn thousand_steps_keep_the_norm() {
    let grid = square_grid(10.0, 128);
    let psi0 = vortex(&grid);
    let (_, diag) = integrate(&psi0, Method::Rot2, &problem(0.0, 0.0), 0.0, 3.0, 1000).unwrap();
    assert_eq!(diag.norms.len(), 1001);
    assert!(diag.norm_drift() <= 1e-9, "{}", diag.norm_drift());
    assert_eq!(diag.fft_count, 6000);
}

#[test]
fn b_flows_keep_the_modulus() {
    let grid = square_grid(8.0, 64);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let v: PotentialFn = Arc::new(|x, y, t| (x * y).sin() + t);
    let term = NonlinearTerm::cubic(50.0).with_potential(v);
    for _ in 0..5 {
        let mut psi = random_state(&grid, &mut rng, 2.0);
        let before: Vec<f64> = psi.values.iter().map(|z| z.norm()).collect();
        b_flow(&mut psi, &term, rng.gen_range(0.0..3.0), rng.gen_range(-0.5..0.5)).unwrap();
        for (z, m) in psi.values.iter().zip(&before) {
            assert!((z.norm() - m).abs() <= 1e-13, "{} vs {m}", z.norm());
        }
    }
}

#[test]
fn damped_flow_matches_fine_ode_integration() {
    // (i - lambda) u' = (g |u|^2 + V) u per grid point, RK4 with 10^4 substeps
    let (g, lambda, h) = (1.0, 0.02, 0.1);
    let grid = square_grid(4.0, 16);
    let v: PotentialFn = Arc::new(|x, _, _| x * x / 2.0);
    let term = NonlinearTerm::cubic(g).with_potential(v).with_damping(lambda);
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let psi0 = random_state(&grid, &mut rng, 1.5);
    let mut psi = psi0.clone();
    dissipative_nonlinear_flow(&mut psi, &term, 0.0, h).unwrap();
    let denom = Complex64::new(-lambda, 1.0);
    let ny = grid.spec.ny;
    let mut max_err: f64 = 0.0;
    for (i, &u0) in psi0.values.iter().enumerate() {
        let pot = grid.x[i / ny].powi(2) / 2.0;
        let f = |u: Complex64| (g * u.norm_sqr() + pot) * u / denom;
        let n = 10_000;
        let dt = h / n as f64;
        let mut u = u0;
        for _ in 0..n {
            let k1 = f(u);
            let k2 = f(u + k1 * (dt / 2.0));
            let k3 = f(u + k2 * (dt / 2.0));
            let k4 = f(u + k3 * dt);
            u += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0);
        }
        max_err = max_err.max((u - psi.values[i]).norm());
    }
    assert!(max_err <= 1e-10, "{max_err:e}");
}

#[test]
fn rot2_is_time_reversible() {
    let grid = square_grid(10.0, 64);
    let psi0 = vortex(&grid);
    let p = problem(1.0, 0.0);
    let mut psi = psi0.clone();
    let mut stats = StepStats::default();
    strang_wrap(&mut psi, &p, 0.4, 0.1, &mut stats).unwrap();
    strang_wrap(&mut psi, &p, 0.5, -0.1, &mut stats).unwrap();
    assert!(worst(&psi, &psi0) < 1e-10, "{}", worst(&psi, &psi0));
}

#[test]
fn std2_is_time_reversible() {
    let grid = square_grid(10.0, 64);
    let psi0 = vortex(&grid);
    let p = problem(1.0, 0.0);
    let mut psi = psi0.clone();
    std2_step(&mut psi, &p, 0.4, 0.1).unwrap();
    std2_step(&mut psi, &p, 0.5, -0.1).unwrap();
    assert!(worst(&psi, &psi0) < 1e-10);
}

#[test]
fn strang_scheme_reproduces_rot2_bitwise() {
    let grid = square_grid(10.0, 64);
    let psi0 = vortex(&grid);
    let p = problem(3.0, 0.0);
    let (mut a, mut b) = (psi0.clone(), psi0.clone());
    let mut stats = StepStats::default();
    strang_wrap(&mut a, &p, 0.2, 0.07, &mut stats).unwrap();
    srkn_step(&mut b, &SplittingScheme::strang(), &p, 0.2, 0.07, &mut stats).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn without_interaction_rot2_is_one_decomposition_step() {
    let grid = square_grid(10.0, 64);
    let psi0 = vortex(&grid);
    let p = problem(0.0, 0.0);
    let mut a = psi0.clone();
    strang_wrap(&mut a, &p, 0.2, 0.07, &mut StepStats::default()).unwrap();
    let mut b = psi0.clone();
    rot_step(&mut b, &decompose_step(&p.h_a, 0.2, 0.07, MagnusOrder::Four).unwrap()).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn single_step_integration_is_one_method_call() {
    let grid = square_grid(10.0, 32);
    let psi0 = vortex(&grid);
    let p = problem(1.0, 0.0);
    for m in Method::ALL {
        let (a, diag) = integrate(&psi0, m, &p, 0.125, 0.375, 1).unwrap();
        let mut b = psi0.clone();
        method_step(m, &mut b, &p, 0.125, 0.25, &mut StepStats::default()).unwrap();
        assert_eq!(a.values, b.values, "{m}");
        assert_eq!(diag.norms.len(), 2);
    }
}

#[test]
fn transform_counts_per_step() {
    let grid = square_grid(10.0, 32);
    let psi0 = vortex(&grid);
    let p = problem(1.0, 0.0);
    for (m, per_step) in [(Method::Rot2, 6), (Method::Std2, 6), (Method::Y4Std, 18), (Method::Y4Rot, 18), (Method::Bm4Rot, 36)] {
        let (_, diag) = integrate(&psi0, m, &p, 0.0, 1.0, 7).unwrap();
        assert_eq!(diag.fft_count, 7 * per_step, "{m}");
    }
}

#[test]
fn damping_decreases_the_norm_every_step() {
    let grid = square_grid(10.0, 64);
    let psi0 = vortex(&grid);
    let p = problem(1.0, 0.02);
    for m in [Method::Rot2, Method::Std2] {
        let (_, diag) = integrate(&psi0, m, &p, 0.0, 1.0, 20).unwrap();
        assert!(diag.norm_strictly_decreasing(), "{m}: {:?}", diag.norms);
    }
}

#[test]
fn damping_rejects_negative_substeps() {
    let grid = square_grid(10.0, 32);
    let psi0 = vortex(&grid);
    let p = problem(1.0, 0.02);
    for m in [Method::Y4Std, Method::Y4Rot, Method::Bm4Rot] {
        assert!(integrate(&psi0, m, &p, 0.0, 1.0, 4).is_err(), "{m}");
    }
    let mut psi = psi0.clone();
    let err = srkn_step(&mut psi, &SplittingScheme::bm4(), &p, 0.0, 0.1, &mut StepStats::default());
    assert!(err.is_err());
}

#[test]
fn eigenstate_evolution_through_integrate() {
    // isotropic autonomous trap: the vortex is an eigenstate with E = 2 + Omega
    let omega = 0.1;
    let grid = square_grid(10.0, 128);
    let psi0 = vortex(&grid);
    let p = Problem::new(QuadraticHamiltonian::autonomous(1.0, 1.0, omega), NonlinearTerm::default(), MagnusOrder::Four).unwrap();
    let t = 1.7;
    let (psi, _) = integrate(&psi0, Method::Rot2, &p, 0.0, t, 5).unwrap();
    let phase = Complex64::new(0.0, -(2.0 + omega) * t).exp();
    let mut want = psi0.clone();
    want.values.iter_mut().for_each(|v| *v *= phase);
    assert!(psi.distance(&want).unwrap() < 1e-8);
}

#[test]
fn linear_drive_moves_the_centre_classically() {
    // constant force xi_x x on an isotropic trap: the centre follows
    // x(t) = -xi/omega^2 (1 - cos(omega t)) with omega = 1 (no rotation)
    let xi = 0.3;
    let drive: rotsplit_core::magnus::CoefficientFn = Arc::new(move |_| xi);
    let h_a = QuadraticHamiltonian::autonomous(1.0, 1.0, 0.0).with_linear(Some(drive), None);
    let p = Problem::new(h_a, NonlinearTerm::default(), MagnusOrder::Four).unwrap();
    let grid = square_grid(10.0, 64);
    let mut psi0 = WaveFunction::from_fn(grid.clone(), |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0));
    psi0.normalize().unwrap();
    let t = 1.3;
    let (psi, _) = integrate(&psi0, Method::Rot2, &p, 0.0, t, 4).unwrap();
    let ny = grid.spec.ny;
    let dxdy = grid.spec.dx() * grid.spec.dy();
    let centre: f64 = psi.values.iter().enumerate().map(|(i, v)| grid.x[i / ny] * v.norm_sqr() * dxdy).sum();
    let want = -xi * (1.0 - t.cos());
    assert!((centre - want).abs() < 1e-10, "{centre} vs {want}");
}
