use std::f64::consts::PI;

use proptest::prelude::*;

use toda_core::flow::{cross_check_flows, drift_report, integrate, integrate_ode, FlowError, IntegratorConfig, Method};
use toda_core::lax::{LaxFamily, LaxSystem};
use toda_core::phase::{systems, ChartMap};

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn rk4_is_fourth_order() {
    let sys = LaxSystem::<f64>::new(LaxFamily::A2);
    let z0 = [0.3, -0.4, 0.2, -0.1];
    let reference = integrate(&sys, &z0, &IntegratorConfig::rk4(1e-4, 2.0)).unwrap();
    let err = |h: f64| {
        let t = integrate(&sys, &z0, &IntegratorConfig::rk4(h, 2.0)).unwrap();
        dist(t.last_state(), reference.last_state())
    };
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn harmonic_toy_returns_after_one_period() {
    let sys = LaxSystem::<f64>::new(LaxFamily::A1Toy(0));
    let z0 = [0.0, 1.0];
    let traj = integrate(&sys, &z0, &IntegratorConfig::rk4(1e-3, 2.0 * PI).with_stride(100)).unwrap();
    assert!(dist(traj.last_state(), &z0) < 1e-9);
    let d = drift_report(&traj, &[2]);
    assert!(d.eigenvalue_drift < 1e-9 && d.energy_drift < 1e-9);
}

#[test]
fn dormand_prince_matches_rk4() {
    let sys = LaxSystem::<f64>::new(LaxFamily::A2);
    let z0 = [0.5, 0.1, -0.3, 0.4];
    let rk = integrate(&sys, &z0, &IntegratorConfig::rk4(1e-3, 5.0)).unwrap();
    let cfg = IntegratorConfig {
        method: Method::DormandPrince { rtol: 1e-11, atol: 1e-12, h0: 1e-2 },
        horizon: 5.0,
        stride: 1,
    };
    let dp = integrate(&sys, &z0, &cfg).unwrap();
    assert_eq!(*dp.times.last().unwrap(), 5.0);
    assert!(dist(dp.last_state(), rk.last_state()) < 1e-8);
    assert!(drift_report(&dp, &[2, 3]).max_invariant_drift() < 1e-8);
}

#[test]
fn first_hierarchy_flow_is_the_a2_flow() {
    let cfg = IntegratorConfig::rk4(1e-3, 5.0);
    let r = cross_check_flows(
        &systems::a2_hierarchy::<f64>(1),
        &systems::a2_cm(),
        &ChartMap::identity(4),
        &[0.2, -0.6, 0.3, 0.1],
        &cfg,
    )
    .unwrap();
    assert!(r.max_distance < 1e-9);
    assert_eq!(r.samples, 5001);
}

#[test]
fn particle_and_centre_of_mass_flows_agree() {
    let cfg = IntegratorConfig::rk4(1e-3, 3.0);
    let z0 = [0.4, -0.1, -0.3, 0.2, -0.5, 0.3];
    let r = cross_check_flows(&systems::a2_particles::<f64>(), &systems::a2_cm(), &systems::a2_projection(), &z0, &cfg)
        .unwrap();
    assert!(r.max_distance < 1e-9, "{}", r.max_distance);
}

#[test]
fn canonical_chart_conjugates_a2_flow() {
    let cfg = IntegratorConfig::rk4(1e-3, 3.0);
    let r = cross_check_flows(
        &systems::a2_cm::<f64>(),
        &systems::a2_qp(),
        &systems::a2_canonical_map(),
        &[0.1, 0.3, -0.2, 0.4],
        &cfg,
    )
    .unwrap();
    assert!(r.max_distance < 1e-8, "{}", r.max_distance);
}

#[test]
fn cross_check_rejects_mismatched_dimensions() {
    let cfg = IntegratorConfig::rk4(1e-3, 1.0);
    let r = cross_check_flows(&systems::a2_cm::<f64>(), &systems::a1_cm(), &ChartMap::identity(4), &[0.0; 4], &cfg);
    assert!(matches!(r, Err(FlowError::Chart(_))));
}

#[test]
fn sampling_stride() {
    let sys = LaxSystem::<f64>::new(LaxFamily::A2);
    let traj = integrate(&sys, &[0.0; 4], &IntegratorConfig::rk4(1e-2, 1.0).with_stride(30)).unwrap();
    // Steps 30, 60, 90 and the final step 100.
    assert_eq!(traj.len(), 5);
    assert_eq!(*traj.times.last().unwrap(), 1.0);
}

#[test]
fn integration_is_deterministic() {
    let sys = LaxSystem::<f64>::new(LaxFamily::GL(3));
    let z0 = [0.2, 0.5, -0.1, 0.5, -0.3, 0.4, -0.1, 0.4, 0.6];
    let cfg = IntegratorConfig::rk4(1e-2, 2.0).with_stride(10);
    assert_eq!(integrate(&sys, &z0, &cfg).unwrap().to_csv(), integrate(&sys, &z0, &cfg).unwrap().to_csv());
}

#[test]
fn generic_over_f32() {
    let sys = LaxSystem::<f32>::new(LaxFamily::A1Toy(0));
    let traj = integrate(&sys, &[0.0f32, 1.0], &IntegratorConfig::rk4(1e-2f32, 1.0)).unwrap();
    assert!(drift_report(&traj, &[2]).max_invariant_drift() < 1e-4);
}

#[test]
fn finite_time_blow_up_is_an_error() {
    let f = |z: &[f64]| -> Result<Vec<f64>, FlowError> { Ok(vec![z[0] * z[0] * z[0]]) };
    assert!(matches!(integrate_ode(&f, &[2.0], &IntegratorConfig::rk4(1e-2, 1.0)), Err(FlowError::NonFinite(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn a2_flow_is_isospectral(z0 in prop::collection::vec(-1.0f64..1.0, 4)) {
        let sys = LaxSystem::<f64>::new(LaxFamily::A2);
        let traj = integrate(&sys, &z0, &IntegratorConfig::rk4(1e-3, 5.0).with_stride(50)).unwrap();
        let d = drift_report(&traj, &[1, 2, 3]);
        prop_assert!(d.eigenvalue_drift < 1e-7 && d.max_invariant_drift() < 1e-7);
    }

    #[test]
    fn symmetric_cholesky_flow_is_isospectral(raw in prop::collection::vec(-1.0f64..1.0, 6)) {
        let n = 3;
        let mut z0 = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                z0[i * n + j] = raw[k];
                z0[j * n + i] = raw[k];
                k += 1;
            }
        }
        let sys = LaxSystem::<f64>::new(LaxFamily::GL(n));
        let traj = integrate(&sys, &z0, &IntegratorConfig::rk4(1e-3, 5.0).with_stride(50)).unwrap();
        let d = drift_report(&traj, &[1, 2, 3]);
        prop_assert!(d.max_invariant_drift() < 1e-6, "{}", d.max_invariant_drift());
        let last = traj.lax.last().unwrap();
        prop_assert!(last.is_symmetric(1e-12));
    }

    #[test]
    fn hierarchy_flows_conserve_traces(z0 in prop::collection::vec(-0.5f64..0.5, 4), m in 1u32..=4) {
        let sys = LaxSystem::<f64>::new(LaxFamily::A2Hierarchy(m));
        let traj = integrate(&sys, &z0, &IntegratorConfig::rk4(1e-3, 2.0).with_stride(100)).unwrap();
        prop_assert!(drift_report(&traj, &[2, 3]).max_invariant_drift() < 1e-7);
    }
}
