mod common;

use common::*;
use rotsplit::spectral::rot_step;
use rotsplit_core::{decompose_step, MagnusOrder, QuadraticHamiltonian};

const STEPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[test]
fn autonomous_step_matches_dense_exponential() {
    // Magnus and decomposition are exact here; what is left is the
    // discrete-commutator defect of the grid
    let grid = square_grid(7.0, 32);
    let psi0 = vortex(&grid);
    let h_a = QuadraticHamiltonian::autonomous(4.0, 3.0, 0.1);
    let dense = DenseHamiltonian::new(&grid, 0.1);
    for h in STEPS {
        let c = decompose_step(&h_a, 0.0, h, MagnusOrder::Four).unwrap();
        let mut psi = psi0.clone();
        rot_step(&mut psi, &c).unwrap();
        let want = dense.exp_frozen((4.0, 3.0), h, (h * 400.0).ceil() as usize, &psi0.values);
        let diff = l2(&grid, &psi.values, &want);
        assert!(diff < 1e-8, "h = {h}: {diff:e}");
    }
}

#[test]
fn modulated_step_error_is_fifth_order() {
    let grid = square_grid(7.0, 32);
    let psi0 = vortex(&grid);
    let h_a = QuadraticHamiltonian::modulated_trap(4.0, 0.1);
    let dense = DenseHamiltonian::new(&grid, 0.1);
    let errs: Vec<f64> = STEPS
        .iter()
        .map(|&h| {
            let c = decompose_step(&h_a, 0.3, h, MagnusOrder::Four).unwrap();
            let mut psi = psi0.clone();
            rot_step(&mut psi, &c).unwrap();
            let want = dense.exp_magnus(&h_a, 0.3, h, 16, &psi0.values);
            l2(&grid, &psi.values, &want)
        })
        .collect();
    let p = slope(&STEPS, &errs);
    assert!((p - 5.0).abs() <= 0.3, "slope {p}, errors {errs:?}");
}

#[test]
fn second_order_magnus_step_is_third_order() {
    let grid = square_grid(7.0, 32);
    let psi0 = vortex(&grid);
    let h_a = QuadraticHamiltonian::modulated_trap(4.0, 0.1);
    let dense = DenseHamiltonian::new(&grid, 0.1);
    let errs: Vec<f64> = STEPS
        .iter()
        .map(|&h| {
            let c = decompose_step(&h_a, 0.3, h, MagnusOrder::Two).unwrap();
            let mut psi = psi0.clone();
            rot_step(&mut psi, &c).unwrap();
            let want = dense.exp_magnus(&h_a, 0.3, h, 16, &psi0.values);
            l2(&grid, &psi.values, &want)
        })
        .collect();
    let p = slope(&STEPS, &errs);
    assert!((p - 3.0).abs() <= 0.3, "slope {p}, errors {errs:?}");
}
