//! Randomized invariants of the state, steering, and correlation layers.
//! Deterministic seeded loops cover the quantitative contracts; proptest
//! shakes the same invariants over adversarial parameter boxes.

use proptest::prelude::*;
use qsteer::sampling::{sample, sample_generic, Category, SamplerConfig};
use qsteer::state::{
    from_density_matrix, partial_trace, to_canonical, BlochState, Mat3, Side, Vec3,
};
use qsteer::steering::{
    d_squared, max_distance, steer, DistanceKernel, MeasurementDirection,
};
use qsteer::{correlation_report, mutual_information};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn directions(seed: u64, count: usize) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            loop {
                let v = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if v.norm() > 1e-3 {
                    return v.normalize();
                }
            }
        })
        .collect()
}

#[test]
fn round_trip_and_marginals_on_ginibre_states() {
    let states = sample_generic(101, 1000);
    for s in &states {
        let m = s.to_density_matrix().unwrap();
        let back = from_density_matrix(&m);
        assert!((back.x - s.x).norm() < 1e-12);
        assert!((back.y - s.y).norm() < 1e-12);
        assert!((back.t - s.t).norm() < 1e-12);

        let a = partial_trace(&m, Side::Alice);
        let b = partial_trace(&m, Side::Bob);
        assert!((a.bloch - s.x).norm() < 1e-12);
        assert!((b.bloch - s.y).norm() < 1e-12);

        // Entropy ranges for the full state and the marginals.
        assert!((0.0..=2.0 + 1e-12).contains(&m.entropy()));
        assert!((0.0..=1.0 + 1e-12).contains(&a.entropy()));
    }
}

#[test]
fn steer_barycenter_parity_and_kernel_agreement() {
    let states = sample_generic(202, 1000);
    let dirs = directions(303, 1000);
    for (s, n) in states.iter().zip(dirs.iter()) {
        let dir = MeasurementDirection::new(*n).unwrap();
        let pair = steer(s, &dir).unwrap();

        // Unrecorded measurements cannot move Alice's marginal.
        let bary = pair.x_tilde[0] * pair.p[0] + pair.x_tilde[1] * pair.p[1];
        assert!((bary - s.x).norm() < 1e-10);
        assert!((pair.p[0] + pair.p[1] - 1.0).abs() < 1e-12);
        assert!(pair.x_tilde[0].norm() <= 1.0 + 1e-10);
        assert!(pair.x_tilde[1].norm() <= 1.0 + 1e-10);

        let k = DistanceKernel::from_state(s);
        let v = d_squared(&k, &dir).unwrap();
        let v_neg = d_squared(&k, &MeasurementDirection::new(-*n).unwrap()).unwrap();
        assert!((v - v_neg).abs() <= 1e-15, "parity violated: {v} vs {v_neg}");
        assert!(
            (v - pair.distance_squared()).abs() < 1e-10,
            "kernel vs steered distance: {v} vs {}",
            pair.distance_squared()
        );
    }
}

#[test]
fn canonical_form_is_physical_with_zero_bob_vector() {
    let states = sample_generic(404, 1000);
    for s in &states {
        let c = to_canonical(s).unwrap();
        assert!(c.y.norm() <= 1e-10);
        assert!(c.to_density_matrix().is_ok());
    }
}

#[test]
fn filtering_preserves_the_steering_ellipsoid() {
    // Steered points of the original state lie on the canonical ellipsoid:
    // |(T_can)^-1 (x_tilde - x_can)| = 1 for nondegenerate T_can.
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0;
    let mut index = 0;
    while checked < 1000 {
        index += 1;
        let s = &sample_generic(600 + index, 1)[0];
        let c = to_canonical(s).unwrap();
        let svd = c.t.svd(false, false);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smin < 0.05 {
            continue;
        }
        let inv = c.t.try_inverse().expect("nondegenerate T_can");
        let n = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if n.norm() < 1e-3 {
            continue;
        }
        let dir = MeasurementDirection::new(n).unwrap();
        let pair = steer(s, &dir).unwrap();
        for xt in pair.x_tilde {
            let r = (inv * (xt - c.x)).norm();
            assert!((r - 1.0).abs() < 1e-8, "ellipsoid residual {r}");
        }
        checked += 1;
    }
}

#[test]
fn max_distance_value_is_bounded_and_consistent() {
    let states = sample_generic(707, 300);
    for s in &states {
        let r = max_distance(s).unwrap();
        assert!((0.0..=4.0 + 1e-9).contains(&r.value), "value {}", r.value);
        let k = DistanceKernel::from_state(s);
        let at_n = d_squared(&k, &r.n_star).unwrap();
        assert!((r.value - at_n).abs() < 1e-10);
        // Sign convention of the reported direction.
        let n = r.n_star.unit();
        assert!(n.z > 0.0 || (n.z == 0.0 && (n.x > 0.0 || (n.x == 0.0 && n.y >= 0.0))));
    }
}

#[test]
fn x_state_regime_formulas_are_continuous_at_boundaries() {
    // x = 0, T = diag(t1, 0, t3): both interior-window edges in y^2 are
    // physically reachable, and D^2_max must be continuous across them.
    let (t1, t3) = (0.25, 0.15);
    let m1: f64 = t1 * t1;
    let m3: f64 = t3 * t3;
    let lower = (m1 - m3) / (2.0 * m1);
    let upper = (m1 - m3) / (m1 + m3);
    for boundary in [lower, upper] {
        let mut values = Vec::new();
        for eps in [-1e-9, 1e-9] {
            let y3 = (boundary + eps).sqrt();
            let s = BlochState::new(
                Vec3::zeros(),
                Vec3::new(0.0, 0.0, y3),
                Mat3::from_diagonal(&Vec3::new(t1, 0.0, t3)),
            );
            assert!(s.min_eigenvalue() > -1e-12, "boundary state not physical");
            values.push(max_distance(&s).unwrap().value);
        }
        assert!(
            (values[0] - values[1]).abs() < 1e-8,
            "jump at boundary {boundary}: {values:?}"
        );
    }
}

#[test]
fn mutual_information_splits_into_classical_and_quantum_parts() {
    for s in sample_generic(808, 60) {
        let r = correlation_report(&s).unwrap();
        assert!((r.mutual_info - mutual_information(&s)).abs() < 1e-12);
        assert!((r.discord + r.classical_corr - r.mutual_info).abs() < 1e-9);
        assert!(r.discord >= -1e-9);
        assert!(r.classical_corr >= -1e-9);
        assert!(r.discord <= r.q_star + 1e-9);
    }
}

#[test]
fn category_samplers_cover_their_predicates() {
    for category in Category::ALL {
        let states = sample(&SamplerConfig {
            seed: 42,
            category,
            count: 50,
        })
        .unwrap();
        assert_eq!(states.len(), 50);
        for s in &states {
            assert!(s.min_eigenvalue() >= -1e-10, "{category}: not physical");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bell_diagonal_tetrahedron_round_trips(
        t1 in -1.0..1.0f64, t2 in -1.0..1.0f64, t3 in -1.0..1.0f64
    ) {
        let s = BlochState::new(
            Vec3::zeros(),
            Vec3::zeros(),
            Mat3::from_diagonal(&Vec3::new(t1, t2, t3)),
        );
        let physical = [
            1.0 - t1 - t2 - t3,
            1.0 - t1 + t2 + t3,
            1.0 + t1 - t2 + t3,
            1.0 + t1 + t2 - t3,
        ]
        .iter()
        .all(|&e| e >= 0.0);
        match s.to_density_matrix() {
            Ok(m) => {
                prop_assert!(physical || [t1, t2, t3].iter().any(|t| t.abs() < 1e-9));
                let back = from_density_matrix(&m);
                prop_assert!((back.t - s.t).norm() < 1e-12);
            }
            Err(_) => prop_assert!(!physical),
        }
    }

    #[test]
    fn d_squared_parity_holds_everywhere(
        seed in 0u64..10_000,
        nx in -1.0..1.0f64, ny in -1.0..1.0f64, nz in -1.0..1.0f64
    ) {
        prop_assume!(Vec3::new(nx, ny, nz).norm() > 1e-3);
        let s = &sample_generic(seed, 1)[0];
        let k = DistanceKernel::from_state(s);
        let n = Vec3::new(nx, ny, nz).normalize();
        let plus = d_squared(&k, &MeasurementDirection::new(n).unwrap()).unwrap();
        let minus = d_squared(&k, &MeasurementDirection::new(-n).unwrap()).unwrap();
        prop_assert!((plus - minus).abs() <= 1e-15);
    }

    #[test]
    fn steered_points_stay_in_the_bloch_ball(
        seed in 0u64..10_000,
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..(2.0 * std::f64::consts::PI)
    ) {
        let s = &sample_generic(seed, 1)[0];
        let dir = MeasurementDirection::from_angles(theta, phi);
        let pair = steer(s, &dir).unwrap();
        prop_assert!(pair.x_tilde[0].norm() <= 1.0 + 1e-10);
        prop_assert!(pair.x_tilde[1].norm() <= 1.0 + 1e-10);
        prop_assert!((pair.p[0] + pair.p[1] - 1.0).abs() < 1e-12);
    }
}
