use loewner_core::confmap::{self, MapOptions};
use loewner_core::measures::{self, SolveOptions};
use loewner_core::{
    serial, CircleMap, CircleMeasure, Complex64, ConformalConjugacy, Grid, HerglotzField,
    JordanCurve, GOLDEN_MEAN,
};
use proptest::prelude::*;
use std::f64::consts::TAU;

const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

fn moebius_map(a: Complex64, alpha: f64, n: usize) -> CircleMap {
    let h = ConformalConjugacy::moebius(a).unwrap();
    CircleMap::linearizable(alpha, h, Grid::new(n)).unwrap()
}

fn small_point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(GOLDEN_MEAN), Just(SILVER)]
}

/// Positive trigonometric density `1 + Σ c_k cos(kθ + φ_k)` with `Σ|c_k| < 1`.
fn trig_density() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..0.3f64, 0.0..TAU), 1..4)
}

fn density_measure(terms: &[(f64, f64)], grid: Grid) -> CircleMeasure {
    CircleMeasure::from_fn(grid, |t| {
        1.0 + terms
            .iter()
            .enumerate()
            .map(|(k, (c, p))| c * ((k as f64 + 1.0) * t + p).cos())
            .sum::<f64>()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 16,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn moebius_conjugates_preserve_the_circle(a in small_point(0.35), alpha in alpha()) {
        let g = moebius_map(a, alpha, 128);
        prop_assert!(g.circle_residual() < 1e-12);
        prop_assert!(g.schwarz_residual(1.02).unwrap() < 1e-10);
        prop_assert!(g.min_abs_derivative() > 0.0);
    }

    #[test]
    fn json_round_trip_is_exact(a in small_point(0.5), alpha in alpha()) {
        let g = moebius_map(a, alpha, 32);
        let back = serial::from_json(&serial::to_json(&g).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn inverse_undoes_the_map(a in small_point(0.4)) {
        let g = moebius_map(a, GOLDEN_MEAN, 64);
        let id = g.compose(&g.inverse().unwrap()).unwrap();
        let rot = CircleMap::rotation(0.0, g.grid()).unwrap_or_else(|_| CircleMap::rotation_unchecked(0.0, g.grid()));
        prop_assert!(id.sup_distance(&rot) < 1e-9);
    }

    #[test]
    fn oracle_measure_satisfies_the_conformal_identity(a in small_point(0.35), seed in any::<u64>()) {
        let g = moebius_map(a, GOLDEN_MEAN, 128);
        let mu = measures::conformal_measure_oracle(&g, 2.0).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(mu.density().iter().all(|f| *f > 0.0));
        prop_assert!(measures::verify_conformal(&mu, &g, 2.0, 50, seed).max_residual < 1e-9);
    }

    #[test]
    fn solver_matches_oracle(a in small_point(0.3)) {
        let g = moebius_map(a, GOLDEN_MEAN, 128);
        let oracle = measures::conformal_measure_oracle(&g, 2.0).unwrap();
        let solved = measures::conformal_measure_solve(&g, 2.0, &SolveOptions::default()).unwrap();
        prop_assert!(measures::weak_distance(&oracle, &solved, 16) < 1e-9);
    }

    #[test]
    fn newton_recovers_the_linearizer(a in small_point(0.2)) {
        let g = moebius_map(a, GOLDEN_MEAN, 128);
        let (h, beta) = g.newton_linearizer(&[], GOLDEN_MEAN + 1e-4).unwrap();
        prop_assert!((beta - GOLDEN_MEAN).abs() < 1e-11);
        let z = Complex64::cis(0.7);
        let lhs = g.eval(h.forward(z).unwrap()).unwrap();
        let rhs = h.forward(z * Complex64::cis(TAU * beta)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn herglotz_is_positive_and_linear(
        p in trig_density(),
        q in trig_density(),
        atom in 0.0..TAU,
        w in 0.0..1.0f64,
    ) {
        let grid = Grid::new(64);
        let mu = density_measure(&p, grid).with_atom(atom, 0.25).unwrap().normalized();
        let nu = density_measure(&q, grid);
        let h_mu = HerglotzField::new(&mu);
        let h_nu = HerglotzField::new(&nu);
        let mix = CircleMeasure::combination(&[(w, &mu), (1.0 - w, &nu)]).unwrap();
        let h_mix = HerglotzField::new(&mix);
        for r in [1.01, 1.5, 10.0] {
            for j in 0..16 {
                let z = Complex64::from_polar(r, TAU * j as f64 / 16.0 + 0.1);
                let a = h_mu.eval(z).unwrap();
                prop_assert!(a.re > 0.0);
                let lin = h_mix.eval(z).unwrap() - (a * w + h_nu.eval(z).unwrap() * (1.0 - w));
                prop_assert!(lin.norm() < 1e-10 * (1.0 + a.norm()));
            }
        }
        // H(∞) is the total mass
        prop_assert!((h_mu.eval(Complex64::new(1e8, 0.0)).unwrap() - 1.0).norm() < 1e-6);
    }

    #[test]
    fn weak_distance_is_a_metric(p in trig_density(), q in trig_density(), r in trig_density()) {
        let grid = Grid::new(32);
        let (a, b, c) = (density_measure(&p, grid), density_measure(&q, grid), density_measure(&r, grid));
        let d = |x: &CircleMeasure, y: &CircleMeasure| measures::weak_distance(x, y, 8);
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-15);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-15);
    }

    #[test]
    fn capacity_shifts_by_log_scale(ra in 1.0..2.0f64, rb in 0.85..1.0f64, s in 0.5..3.0f64, phi in 0.0..TAU) {
        let grid = Grid::new(128);
        let curve = JordanCurve::ellipse(ra, rb, grid).unwrap();
        let cap = confmap::capacity(&curve).unwrap();
        let scaled = confmap::capacity(&curve.scaled(Complex64::from_polar(s, phi))).unwrap();
        prop_assert!((scaled - cap - s.ln()).abs() < 1e-10);
        // ellipse capacity is log((a + b)/2)
        prop_assert!((cap - ((ra + rb) / 2.0).ln()).abs() < 1e-8);
    }

    #[test]
    fn exterior_map_lands_on_the_curve(ra in 1.0..1.6f64, rb in 0.7..1.0f64) {
        let grid = Grid::new(128);
        let curve = JordanCurve::ellipse(ra, rb, grid).unwrap();
        let phi = confmap::exterior_map(&curve, MapOptions::default()).unwrap();
        prop_assert!(phi.residual() < 1e-8);
        let w = phi.eval(Complex64::new(0.0, 2.0)).unwrap();
        prop_assert!((phi.inverse(w).unwrap() - Complex64::new(0.0, 2.0)).norm() < 1e-9);
    }
}
