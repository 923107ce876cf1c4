//! End-to-end runs on coarse grids.

use loewner_core::flow::{self, Scheme};
use loewner_core::radius;
use loewner_core::{CircleMap, Complex64, ConformalConjugacy, Germ, Grid, GOLDEN_MEAN};

fn moebius(a: Complex64, n: usize) -> CircleMap {
    let h = ConformalConjugacy::moebius(a).unwrap();
    CircleMap::linearizable(GOLDEN_MEAN, h, Grid::new(n)).unwrap()
}

#[test]
fn rotation_flow_is_trivial() {
    let g = CircleMap::rotation(GOLDEN_MEAN, Grid::new(32)).unwrap();
    let gt = flow::phi_exact(&g, 0.3).unwrap();
    assert!(gt.map.sup_distance(&g) < 1e-14);
}

#[test]
fn exact_flow_keeps_rotation_number_and_moves_away_from_rotation() {
    let g = moebius(Complex64::new(0.2, 0.1), 64);
    let gt = flow::phi_exact(&g, 0.2).unwrap();
    assert_eq!(gt.map.alpha(), GOLDEN_MEAN);
    assert!(gt.map.circle_residual() < 1e-10);
    // the rotation is the backward limit
    let half = flow::phi_exact(&g, 0.1).unwrap();
    assert!(flow::distance_to_rotation(&half.map) < flow::distance_to_rotation(&gt.map));
    let est = gt.map.estimate_rotation_number(5000);
    assert!((est.value - GOLDEN_MEAN).abs() < 1e-3);
}

#[test]
fn euler_converges_at_first_order() {
    let g = moebius(Complex64::new(0.15, 0.0), 64);
    let t = 0.02;
    let exact = flow::phi_exact(&g, t).unwrap().map;
    let gap = |dt: f64| {
        let states = flow::integrate_flow(&g, t, dt, Scheme::Euler).unwrap();
        states.last().unwrap().map.sup_distance(&exact)
    };
    let (coarse, fine) = (gap(0.01), gap(0.005));
    let order = (coarse / fine).log2();
    assert!((order - 1.0).abs() < 0.2, "order {order}");
}

#[test]
fn linear_germ_radius_grows_like_exp() {
    let germ = Germ::linear(GOLDEN_MEAN);
    let trace = radius::radius_trace(&germ, &[0.2, 0.3, 0.4], Grid::new(32)).unwrap();
    assert!(trace.strictly_increasing());
    let rep = radius::verify_radius_identities(&trace).unwrap();
    assert_eq!(rep.entries.len(), 1);
    assert!(rep.entries[0].residual_imag < 1e-12);
}
