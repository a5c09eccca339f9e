use proptest::prelude::*;
use riskplan_core::costs::{energy_cost, hull_point_cost, safety_cost, sdf_point_cost, time_cost, SafetyParams};
use riskplan_core::environment::{DomainBox, Environment, ObstaclePrimitive, OrientedHull, DEFAULT_VOXEL_BUDGET};
use riskplan_core::nurbs::TrajectorySamples;
use riskplan_core::power::{fit_quadric, PowerSample};
use riskplan_core::Vec3;

fn params() -> SafetyParams {
    SafetyParams::default()
}

fn model() -> riskplan_core::power::PowerQuadricModel {
    let axes = [
        (Vec3::x(), 610.0),
        (-Vec3::x(), 590.0),
        (Vec3::y(), 620.0),
        (-Vec3::y(), 600.0),
        (Vec3::z(), 800.0),
        (-Vec3::z(), 480.0),
    ];
    fit_quadric(&axes.map(|(d, p)| PowerSample::new(d, p).unwrap())).unwrap()
}

fn path() -> impl Strategy<Value = (Vec<Vec3>, Vec<f64>)> {
    (3usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec((1.0..19.0f64, -5.0..5.0f64, 0.5..7.5f64).prop_map(|(x, y, z)| Vec3::new(x, y, z)), n),
            prop::collection::vec(0.2..3.0f64, n),
        )
    })
}

#[test]
fn corrected_branch_is_continuous() {
    let p = SafetyParams { r_sdf_min: 1.0, r_sdf_max: 5.0, ..params() };
    assert!((p.lambda() - 1.25).abs() < 1e-15);
    let n = 10_000;
    let grid: Vec<f64> = (0..=n).map(|i| 6.0 * i as f64 / n as f64).collect();
    let mut max_jump: f64 = 0.0;
    // jumps at the branch points themselves
    for r in [p.r_sdf_min, p.r_sdf_max] {
        let eps = 1e-12;
        max_jump = max_jump.max((sdf_point_cost(r - eps, &p) - sdf_point_cost(r + eps, &p)).abs());
    }
    assert!(max_jump < 1e-9, "jump {max_jump}");
    // and non-increasing, with steps bounded by the slope at r_min
    let slope = p.lambda() / (p.r_sdf_min * p.r_sdf_min);
    for w in grid.windows(2) {
        let (a, b) = (sdf_point_cost(w[0], &p), sdf_point_cost(w[1], &p));
        assert!(b <= a + 1e-15);
        assert!(a - b <= slope * (w[1] - w[0]) + 1e-12);
    }
}

#[test]
fn strict_branch_is_discontinuous() {
    let p = SafetyParams { strict_paper_sdf_branch: true, ..params() };
    let eps = 1e-9;
    assert!((sdf_point_cost(1.0 + eps, &p) - 0.25).abs() < 1e-6);
    assert!((sdf_point_cost(5.0 - eps, &p) + 0.75).abs() < 1e-6);
}

#[test]
fn overlapping_hulls_sum() {
    let a = OrientedHull::axis_aligned(Vec3::zeros(), Vec3::new(1.0, 1.0, 1.0)).unwrap();
    let b = OrientedHull::axis_aligned(Vec3::new(0.5, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0)).unwrap();
    assert_eq!(hull_point_cost(&Vec3::new(0.2, 0.0, 0.0), &[a, b], 2.0), 2.0);
    // 1 m outside a, 0.5 m outside b
    let p = Vec3::new(0.0, 2.0, 0.0);
    assert!((hull_point_cost(&p, &[a, b], 2.0) - (0.5 + 0.5)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn doubling_speed_halves_time_and_energy((pos, speeds) in path()) {
        let m = model();
        let s1 = TrajectorySamples::from_points(pos.clone(), speeds.clone());
        let s2 = TrajectorySamples::from_points(pos, speeds.iter().map(|v| 2.0 * v).collect());
        prop_assert_eq!(time_cost(&s2, 0.1), time_cost(&s1, 0.1) / 2.0);
        prop_assert_eq!(energy_cost(&s2, &m, 0.1).unwrap(), energy_cost(&s1, &m, 0.1).unwrap() / 2.0);
    }

    #[test]
    fn time_and_energy_additive((pos, speeds) in path(), cut in 1usize..100) {
        let cut = 1 + cut % (pos.len() - 1);
        let m = model();
        let whole = TrajectorySamples::from_points(pos.clone(), speeds.clone());
        let head = TrajectorySamples::from_points(pos[..=cut].to_vec(), speeds[..=cut].to_vec());
        let tail = TrajectorySamples::from_points(pos[cut..].to_vec(), speeds[cut..].to_vec());
        let t = time_cost(&head, 0.1) + time_cost(&tail, 0.1);
        prop_assert!((t - time_cost(&whole, 0.1)).abs() <= 1e-9 * t);
        let e = energy_cost(&head, &m, 0.1).unwrap() + energy_cost(&tail, &m, 0.1).unwrap();
        prop_assert!((e - energy_cost(&whole, &m, 0.1).unwrap()).abs() <= 1e-9 * e);
    }

    #[test]
    fn safety_invariant_under_reversal((pos, speeds) in path()) {
        let domain = DomainBox::new(Vec3::new(0.0, -6.0, 0.0), Vec3::new(20.0, 6.0, 8.0), 2.0).unwrap();
        let env = Environment::build(
            domain,
            vec![ObstaclePrimitive::Box { min: Vec3::new(9.0, -2.0, 0.0), max: Vec3::new(11.0, 2.0, 6.0) }],
            vec![OrientedHull::axis_aligned(Vec3::new(15.0, 3.0, 3.0), Vec3::new(0.5, 0.5, 3.0)).unwrap()],
            0.5,
            DEFAULT_VOXEL_BUDGET,
        ).unwrap();
        let fwd = TrajectorySamples::from_points(pos.clone(), speeds.clone());
        let rev = TrajectorySamples::from_points(pos.into_iter().rev().collect(), speeds.into_iter().rev().collect());
        let (a, b) = (safety_cost(&fwd, &env, &params()).unwrap(), safety_cost(&rev, &env, &params()).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn hull_cost_zero_iff_far(x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64, yaw in 0.0..6.3f64) {
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Vector3::z_axis(), yaw).into_inner();
        let h = [
            OrientedHull::new(Vec3::new(0.5, 0.0, 0.0), Vec3::new(1.0, 0.5, 2.0), rot).unwrap(),
            OrientedHull::axis_aligned(Vec3::new(-2.0, 1.0, 0.0), Vec3::new(0.5, 0.5, 0.5)).unwrap(),
        ];
        let p = Vec3::new(x, y, z);
        let cost = hull_point_cost(&p, &h, 2.0);
        let far = h.iter().all(|h| h.signed_distance(&p) >= 2.0);
        prop_assert_eq!(cost == 0.0, far);
        // continuity: a 1e-7 move changes the cost by at most 2 * 1e-7 / r_ch_max per hull
        let q = p + Vec3::new(1e-7, -1e-7, 1e-7);
        prop_assert!((hull_point_cost(&q, &h, 2.0) - cost).abs() <= 2.0 * 2.0 * 1.8e-7 / 2.0);
    }
}
