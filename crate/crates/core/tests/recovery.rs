use std::f64::consts::{PI, TAU};

use planar_clusters::cluster::{p_epsilon, rescaled_energy, triple_point_angle, validate_cluster};
use planar_clusters::numeric::loglog_slope;
use planar_clusters::point::{Point, RigidMotion};
use planar_clusters::recovery::{
    build_recovery, build_recovery_with, interface_chord, interface_curvature, predicted_recovery_energy,
    solve_double_bubble, structure_report, RecoveryMode,
};
use planar_clusters::sticky::lattice_enumerate_max_contacts;
use planar_clusters::{Cluster, DiskConfiguration, Error, Segment};
use proptest::prelude::*;

fn pair() -> DiskConfiguration {
    DiskConfiguration::chain(&[1.0, 1.0]).unwrap()
}

fn triangle() -> DiskConfiguration {
    let h = 3f64.sqrt();
    DiskConfiguration::new(
        vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, h)],
        vec![1.0; 3],
    )
    .unwrap()
}

/// (Σ 2πr_i − P_ε)/ε^{3/2} for the built cluster.
fn ratio(d: &DiskConfiguration, eps: f64, mode: RecoveryMode) -> f64 {
    let c = build_recovery_with(d, eps, mode).unwrap().cluster;
    let p0: f64 = d.radii.iter().map(|r| TAU * r).sum();
    (p0 - p_epsilon(&c, eps).unwrap()) / eps.powf(1.5)
}

#[test]
fn two_unit_disks() {
    let eps = 1e-4;
    let c = build_recovery(&pair(), eps).unwrap();
    assert!((rescaled_energy(&c, eps, &[1.0, 1.0]).unwrap() + 1.0).abs() < 0.02);
    // equal radii give a straight dent
    let dent = c.interface_segments(1, 2);
    assert_eq!(dent.len(), 1);
    assert_eq!(c.segments()[dent[0]].curvature(), Some(0.0));
}

#[test]
fn chain_of_three_hits_the_weight_sum() {
    let d = DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap();
    let target = 4.0 / 3.0 * 8.0 / 3.0;
    let r = ratio(&d, 1e-4, RecoveryMode::Auto);
    assert!((r / target - 1.0).abs() < 0.05, "{r} vs {target}");
}

#[test]
fn predicted_energy() {
    let apart = DiskConfiguration::new(vec![Point::ORIGIN, Point::new(5.0, 0.0)], vec![1.0, 2.0]).unwrap();
    assert!((predicted_recovery_energy(&apart, 0.1).unwrap() - 3.0 * TAU).abs() < 1e-14);
    let p = predicted_recovery_energy(&pair(), 0.01).unwrap();
    assert!((p - (2.0 * TAU - 4.0 / 3.0 * 1e-3)).abs() < 1e-14);
}

#[test]
fn residual_constant_stays_bounded() {
    for d in [pair(), DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap(), triangle()] {
        let c: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eps| {
                let built = build_recovery(&d, eps).unwrap();
                let res = p_epsilon(&built, eps).unwrap() - predicted_recovery_energy(&d, eps).unwrap();
                res.abs() / eps.powf(2.5)
            })
            .collect();
        let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
        assert!(hi < 10.0 && hi / lo < 3.0, "fitted constants {c:?}");
    }
}

#[test]
fn scaling_ratio_converges_linearly() {
    let d = DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap();
    let target = 4.0 / 3.0 * 8.0 / 3.0;
    for eps in [1e-3, 2e-3, 5e-3, 1e-2] {
        let r = ratio(&d, eps, RecoveryMode::Auto);
        assert!((r - target).abs() <= 1.0 * eps, "ε = {eps}: {r}");
    }
}

#[test]
fn chambers_approach_their_disks() {
    for d in [DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap(), triangle()] {
        let c = build_recovery(&d, 1e-6).unwrap();
        for (i, (&center, &r)) in d.centers.iter().zip(&d.radii).enumerate() {
            let dev = c
                .segments()
                .iter()
                .filter(|s| s.touches(i + 1))
                .flat_map(|s| s.sample(64))
                .map(|p| (p.distance(center) - r).abs())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-4, "chamber {} deviates by {dev}", i + 1);
        }
    }
}

#[test]
fn radial_mode_builds_and_fits_areas() {
    let d = DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap();
    for eps in [1e-4, 1e-3, 1e-2] {
        let b = build_recovery_with(&d, eps, RecoveryMode::Radial).unwrap();
        assert_eq!(b.plan.mode, RecoveryMode::Radial);
        let diag = validate_cluster(&b.cluster, 128);
        assert!(diag.ok(), "{:?}", diag.failures());
        assert!(structure_report(&b.cluster, &d, eps).unwrap().ok(1e-9));
    }
}

#[test]
fn close_dents_are_rejected() {
    // two small disks touch the big one 0.21 rad apart but not each other
    let big = 10.0;
    let at = |t: f64| Point::polar(t) * (big + 1.0);
    let d = DiskConfiguration::new(vec![Point::ORIGIN, at(0.0), at(0.21)], vec![big, 1.0, 1.0]).unwrap();
    assert!(build_recovery_with(&d, 1e-4, RecoveryMode::Radial).is_ok());
    match build_recovery_with(&d, 0.1, RecoveryMode::Radial) {
        Err(Error::Construction(msg)) => assert!(msg.contains("chamber 1"), "{msg}"),
        other => panic!("expected a construction error, got {other:?}"),
    }
}

#[test]
fn relabeling_keeps_the_geometry() {
    let d = DiskConfiguration::chain(&[1.0, 2.0, 0.5]).unwrap();
    let perm = [2, 0, 1];
    let (a, b) = (build_recovery(&d, 1e-3).unwrap(), build_recovery(&d.permuted(&perm), 1e-3).unwrap());
    assert!((p_epsilon(&a, 1e-3).unwrap() - p_epsilon(&b, 1e-3).unwrap()).abs() < 1e-12);
    for (new, &old) in perm.iter().enumerate() {
        let (x, y) = (a.chamber_area(old + 1).unwrap(), b.chamber_area(new + 1).unwrap());
        assert!((x - y).abs() < 1e-12);
    }
    assert_eq!(interface_curvature(1.0, 2.0), -interface_curvature(2.0, 1.0));
    assert_eq!(interface_chord(1.0, 2.0, 0.1), interface_chord(2.0, 1.0, 0.1));
}

#[test]
fn lattice_ground_states_recover() {
    let eps = 1e-4;
    for cfg in lattice_enumerate_max_contacts(6).unwrap().configurations {
        let d = cfg.disks;
        let c = build_recovery(&d, eps).unwrap();
        let r = rescaled_energy(&c, eps, &d.radii).unwrap();
        assert!((r + 9.0).abs() < 0.05 * 9.0, "{r}");
        assert!(structure_report(&c, &d, eps).unwrap().ok(1e-9));
    }
}

#[test]
fn double_bubble_equal_areas() {
    for eps in [1e-3, 0.1, 1.0] {
        let db = solve_double_bubble(eps, PI, PI).unwrap();
        assert!(db.kappa_12.abs() < 1e-12);
        assert!((db.kappa_01 - db.kappa_02).abs() < 1e-12);
        assert!(db.curvature_balance().abs() < 1e-12);
        for (a, m) in db.areas.iter().zip([PI, PI]) {
            assert!(((a - m) / m).abs() < 1e-12);
        }
        let measured = db.cluster.chamber_areas().unwrap();
        assert!(((measured[0] - PI) / PI).abs() < 1e-12);
    }
}

#[test]
fn double_bubble_unequal_areas() {
    for (m1, m2) in [(1.0, 1000.0), (5.0, 0.5), (PI, 2.0)] {
        for eps in [1e-3, 0.3, 1.0] {
            let db = solve_double_bubble(eps, m1, m2).unwrap();
            assert!(db.curvature_balance().abs() < 1e-9 * db.kappa_01.abs().max(1.0));
            let a = db.cluster.chamber_areas().unwrap();
            assert!(((a[0] - m1) / m1).abs() < 1e-12 && ((a[1] - m2) / m2).abs() < 1e-12);
            assert!(validate_cluster(&db.cluster, 128).ok());
        }
    }
    assert!(solve_double_bubble(0.0, PI, PI).is_err());
    assert!(solve_double_bubble(0.1, -1.0, PI).is_err());
}

#[test]
fn double_bubble_expansion() {
    let r: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&e: &f64| (2.0 * TAU - solve_double_bubble(e, PI, PI).unwrap().p_eps) / e.powf(1.5))
        .collect();
    let gaps: Vec<f64> = r.iter().map(|v| (v - 4.0 / 3.0).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    assert!(gaps[2] / (4.0 / 3.0) < 0.02);
}

#[test]
fn double_bubble_angles() {
    let eps = 0.02;
    let db = solve_double_bubble(eps, PI, 1.7).unwrap();
    let th = triple_point_angle(eps).unwrap();
    let [ext, c1, c2] = db.vertex_angles();
    assert!((ext - 2.0 * th).abs() < 1e-9);
    assert!((c1 - (PI - th)).abs() < 1e-9);
    assert!((c2 - (PI - th)).abs() < 1e-9);
}

#[test]
fn structure_of_recovery_and_double_bubble() {
    let d = DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap();
    for eps in [1e-5, 1e-3] {
        let rep = structure_report(&build_recovery(&d, eps).unwrap(), &d, eps).unwrap();
        assert!(rep.ok(1e-9), "{:?}", rep.failures(1e-9));
    }
    let eps = 1e-3;
    let db = solve_double_bubble(eps, PI, PI).unwrap();
    let rep = structure_report(&db.cluster, &pair(), eps).unwrap();
    let ratio = rep.contacts[0].chord.unwrap() / interface_chord(1.0, 1.0, eps);
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    assert!(rep.topology_ok());
}

#[test]
fn vertex_with_two_exterior_arcs_is_flagged() {
    // two triangles touching at a single point
    let p = |x: f64, y: f64| Point::new(x, y);
    let segs = vec![
        Segment::line(p(0.0, 0.0), p(-1.0, 1.0), 0, 1),
        Segment::line(p(-1.0, 1.0), p(-1.0, -1.0), 0, 1),
        Segment::line(p(-1.0, -1.0), p(0.0, 0.0), 0, 1),
        Segment::line(p(0.0, 0.0), p(1.0, -1.0), 0, 2),
        Segment::line(p(1.0, -1.0), p(1.0, 1.0), 0, 2),
        Segment::line(p(1.0, 1.0), p(0.0, 0.0), 0, 2),
    ];
    let c = Cluster::new(2, segs, None).unwrap();
    let d = DiskConfiguration::new(vec![p(-1.0, 0.0), p(1.0, 0.0)], vec![1.0, 1.0]).unwrap();
    let rep = structure_report(&c, &d, 1e-3).unwrap();
    assert!(!rep.topology_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recovery_areas_are_exact(
        radii in prop::collection::vec(0.3f64..3.0, 2..5),
        log_eps in -5.0f64..-2.0,
        angle in -PI..PI,
    ) {
        let eps = 10f64.powf(log_eps);
        let d = DiskConfiguration::chain(&radii).unwrap().transformed(&RigidMotion::new(angle, Point::new(1.0, -2.0)));
        let c = build_recovery(&d, eps).unwrap();
        for (i, r) in radii.iter().enumerate() {
            let t = PI * r * r;
            prop_assert!(((c.chamber_area(i + 1).unwrap() - t) / t).abs() <= 1e-9);
        }
        let rep = structure_report(&c, &d, eps).unwrap();
        prop_assert!(rep.ok(1e-9), "{:?}", rep.failures(1e-9));
        prop_assert!(p_epsilon(&c, eps).unwrap() < radii.iter().map(|r| TAU * r).sum::<f64>());
    }
}

#[test]
fn residual_slope_over_two_decades() {
    let eps: Vec<f64> = (0..=8).map(|k| 10f64.powf(-4.0 + 0.25 * k as f64)).collect();
    for d in [pair(), DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap()] {
        let res: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let c = build_recovery(&d, e).unwrap();
                (p_epsilon(&c, e).unwrap() - predicted_recovery_energy(&d, e).unwrap()).abs()
            })
            .collect();
        let slope = loglog_slope(&eps, &res).unwrap();
        assert!(slope >= 2.3, "slope {slope}");
    }
}
