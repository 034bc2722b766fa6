use proptest::prelude::*;

use toda_core::phase::systems::{self, SYSTEM_NAMES};
use toda_core::phase::{
    check_canonical, gradient_fd, poisson_bracket, ChartMap, HamiltonianSystem, MapKind, PhasePoint, PoissonStructure,
};

fn param(name: &str) -> i32 {
    match name {
        "a2_hierarchy" => 2,
        "gl" => 3,
        "a1toy_a" | "a1toy_b" | "a2_pi_lambda" => 2,
        _ => 0,
    }
}

/// Shifts coordinates named `q`, `Q`, `qt`, `lam` away from zero so every chart domain holds.
fn admissible(sys: &HamiltonianSystem<f64>, raw: &[f64]) -> Vec<f64> {
    sys.coordinate_names()
        .iter()
        .zip(raw)
        .map(|(n, x)| if n.starts_with('q') || n.starts_with('Q') || n.starts_with("lam") { 1.5 + x } else { *x })
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn structures_are_antisymmetric(raw in prop::collection::vec(-1.0f64..1.0, 9)) {
        for name in SYSTEM_NAMES {
            let sys = systems::lookup::<f64>(name, param(name)).unwrap();
            let z = admissible(&sys, &raw[..sys.dim()]);
            let m = sys.structure().matrix(&z).unwrap();
            for i in 0..sys.dim() {
                for j in 0..sys.dim() {
                    prop_assert_eq!(m[(i, j)], -m[(j, i)], "{} at ({}, {})", name, i, j);
                }
            }
        }
    }

    #[test]
    fn chart_round_trips(raw in prop::collection::vec(-1.0f64..1.0, 4)) {
        let pq = vec![raw[0], 1.5 + raw[1]];
        for map in [systems::f2_map::<f64>(), systems::deformation_map(2), systems::deformation_map(-1)] {
            let back = map.inverse(&map.forward(&pq).unwrap()).unwrap();
            prop_assert!(max_diff(&back, &pq) < 1e-12, "{}", map.name());
        }
        let e = systems::exp_map::<f64>();
        prop_assert!(max_diff(&e.inverse(&e.forward(&raw[..2]).unwrap()).unwrap(), &raw[..2]) < 1e-12);
        for map in [systems::a2_canonical_map::<f64>(), systems::a2_pi_lambda_map()] {
            let back = map.inverse(&map.forward(&raw).unwrap()).unwrap();
            prop_assert!(max_diff(&back, &raw) < 1e-12, "{}", map.name());
        }
        let proj = systems::a2_projection::<f64>();
        prop_assert!(max_diff(&proj.forward(&proj.inverse(&raw).unwrap()).unwrap(), &raw) < 1e-12);
    }

    #[test]
    fn analytic_jacobian_matches_differences(p in -1.0f64..1.0, q in 0.2f64..3.0) {
        let map = systems::f2_map::<f64>();
        let z = [p, q];
        let exact = map.jacobian(&z).unwrap();
        let fd = map.jacobian_fd(&z).unwrap();
        prop_assert!(exact.max_abs_diff(&fd) < 1e-6);
    }

    #[test]
    fn analytic_gradients_match_differences(raw in prop::collection::vec(-1.0f64..1.0, 9)) {
        for name in SYSTEM_NAMES {
            let sys = systems::lookup::<f64>(name, param(name)).unwrap();
            let z = admissible(&sys, &raw[..sys.dim()]);
            let g = sys.gradient(&z).unwrap();
            let fd = gradient_fd(&|w: &[f64]| sys.energy(w), &z).unwrap();
            prop_assert!(max_diff(&g, &fd) < 1e-6, "{}", name);
        }
    }

    #[test]
    fn energy_is_conserved_by_its_own_field(raw in prop::collection::vec(-1.0f64..1.0, 9)) {
        for name in SYSTEM_NAMES {
            let sys = systems::lookup::<f64>(name, param(name)).unwrap();
            let z = admissible(&sys, &raw[..sys.dim()]);
            let g = sys.gradient(&z).unwrap();
            let v = sys.vector_field(&z).unwrap();
            let dot: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() < 1e-9, "{}: {}", name, dot);
        }
    }
}

#[test]
fn canonical_sign_convention() {
    let s = PoissonStructure::<f64>::canonical(1);
    let z = PhasePoint::new("pq", vec![0.3, 0.7]).unwrap();
    let b = poisson_bracket(&|w: &[f64]| Ok(w[0]), &|w: &[f64]| Ok(w[1]), &s, &z).unwrap();
    assert!((b - 1.0).abs() < 1e-9);
    // Harmonic oscillator: ż = {H, z} gives q̇ = p and ṗ = -q.
    let h = systems::a1_toy_a::<f64>(0);
    let v = h.vector_field(&[0.3, 0.7]).unwrap();
    assert!((v[0] + 0.7).abs() < 1e-12 && (v[1] - 0.3).abs() < 1e-12);
}

#[test]
fn map_classification() {
    let samples: Vec<_> =
        [[0.3, 0.8], [-0.5, 1.7], [1.2, 0.4]].iter().map(|c| PhasePoint::new("pq", c.to_vec()).unwrap()).collect();
    let c = PoissonStructure::<f64>::canonical(1);
    let f2 = check_canonical(&systems::f2_map(), &c, &c, &samples).unwrap();
    assert_eq!(f2.kind, MapKind::Canonical);
    assert!(f2.max_deviation < 1e-9);
    let d = check_canonical(&systems::deformation_map(2), &c, &systems::deformed_structure(2), &samples).unwrap();
    assert_eq!(d.kind, MapKind::Poisson);
    let wrong = check_canonical(&systems::deformation_map(2), &c, &systems::deformed_structure(3), &samples).unwrap();
    assert_eq!(wrong.kind, MapKind::Neither);
    let id = check_canonical(&ChartMap::identity(2), &c, &c, &samples).unwrap();
    assert_eq!(id.max_deviation, 0.0);
}

#[test]
fn a2_maps_intertwine_structures() {
    let samples: Vec<_> = [[0.3, -0.2, 0.1, 0.5], [-1.0, 0.7, -0.4, 0.2]]
        .iter()
        .map(|c| PhasePoint::new("xi", c.to_vec()).unwrap())
        .collect();
    let c = PoissonStructure::<f64>::canonical(2);
    let canon = check_canonical(&systems::a2_canonical_map(), &c, &c, &samples).unwrap();
    assert_eq!(canon.kind, MapKind::Canonical);
    let omega = check_canonical(&systems::a2_pi_lambda_map(), &c, &systems::omega_structure(1), &samples).unwrap();
    assert_eq!(omega.kind, MapKind::Poisson);
}

#[test]
fn projection_pushes_particle_field_to_centre_of_mass_field() {
    let particles = systems::a2_particles::<f64>();
    let cm = systems::a2_cm::<f64>();
    let proj = systems::a2_projection::<f64>();
    let z = [0.4, -0.1, 0.3, 0.2, -0.5, 0.6];
    let j = proj.jacobian(&z).unwrap();
    let v = particles.vector_field(&z).unwrap();
    let pushed: Vec<f64> = (0..4).map(|a| (0..6).map(|b| j[(a, b)] * v[b]).sum()).collect();
    let w = proj.forward(&z).unwrap();
    assert!(max_diff(&pushed, &cm.vector_field(&w).unwrap()) < 1e-6);
}

#[test]
fn domain_violations_are_errors() {
    assert!(systems::a1_new_cm::<f64>().energy(&[1.0, -1.0]).is_err());
    assert!(systems::f2_map::<f64>().forward(&[1.0, 0.0]).is_err());
    assert!(systems::lookup::<f64>("gl", 1).is_err());
    assert!(systems::lookup::<f64>("nope", 0).is_err());
    assert!(PhasePoint::<f64>::new("pq", vec![f64::NAN]).is_err());
}
