use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rotsplit::spectral::rot_step;
use rotsplit::{b_flow, Direction, Grid, GridSpec, NonlinearTerm, PotentialFn, Snapshot, WaveFunction};
use rotsplit_core::DecompCoefficients;

fn state(n: usize, values: &[(f64, f64)]) -> WaveFunction {
    let grid = Grid::new(GridSpec::square(6.0, n).unwrap()).unwrap();
    WaveFunction::from_values(grid, values.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn b_flow_keeps_pointwise_modulus(v in values(16), g in -60.0..60.0f64, c in 0.0..3.0f64, t in 0.0..5.0f64, h in -0.5..0.5f64) {
        let pot: PotentialFn = Arc::new(move |x, y, t| c * (x * x + y * y) / 2.0 + (t * x).sin());
        let term = NonlinearTerm::cubic(g).with_potential(pot);
        let mut psi = state(16, &v);
        let before = psi.clone();
        b_flow(&mut psi, &term, t, h).unwrap();
        for (a, b) in psi.values.iter().zip(&before.values) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-13);
        }
    }

    #[test]
    fn rot_step_is_unitary(v in values(16), c in prop::array::uniform10(-1.0..1.0f64)) {
        let coeffs = DecompCoefficients {
            f0: Complex64::from(c[0]),
            f1: Complex64::from(c[1]),
            g1: Complex64::from(c[2]),
            e1: Complex64::from(c[3]),
            f2: Complex64::from(c[4]),
            g2: Complex64::from(c[5]),
            e2: Complex64::from(c[6]),
            f3: Complex64::from(c[7]),
            g3: Complex64::from(c[8]),
            e3: Complex64::from(c[9]),
            t: 0.0,
            h: 0.0,
            residual: 0.0,
        };
        let mut psi = state(16, &v);
        let norm = psi.norm();
        rot_step(&mut psi, &coeffs).unwrap();
        prop_assert!((psi.norm() - norm).abs() <= 1e-12 * norm);
    }

    #[test]
    fn transforms_round_trip(v in values(8), first_x in any::<bool>()) {
        let mut psi = state(8, &v);
        let orig = psi.clone();
        let norm = psi.norm();
        if first_x {
            psi.transform_x(Direction::Forward).unwrap();
            prop_assert!((psi.norm() - norm).abs() <= 1e-13);
            psi.transform_x(Direction::Inverse).unwrap();
        } else {
            psi.transform_y(Direction::Forward).unwrap();
            psi.transform_y(Direction::Inverse).unwrap();
        }
        prop_assert!(psi.distance(&orig).unwrap() <= 1e-13);
        prop_assert_eq!(psi.fft_count(), 2);
    }

    #[test]
    fn snapshot_round_trips(v in values(4), time in -10.0..10.0f64, comment in "[ -~]{0,40}") {
        let psi = state(4, &v);
        let snap = Snapshot::from_wave(&psi, time, comment).unwrap();
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        prop_assert_eq!(Snapshot::read_from(&buf[..]).unwrap(), snap);
    }
}

#[test]
fn snapshot_file_round_trip() {
    let v: Vec<(f64, f64)> = (0..64).map(|i| ((i as f64).sin(), (i as f64).cos())).collect();
    let psi = state(8, &v);
    let path = std::env::temp_dir().join(format!("rotsplit-snap-{}.rbec", std::process::id()));
    Snapshot::from_wave(&psi, 2.5, "final").unwrap().save(&path).unwrap();
    let back = Snapshot::load(&path).unwrap().to_wave(Some(&psi.grid)).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back.values, psi.values);
    let mut k = psi.clone();
    k.transform_x(Direction::Forward).unwrap();
    assert!(Snapshot::from_wave(&k, 0.0, "").is_err());
}
