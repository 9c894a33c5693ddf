use std::f64::consts::{FRAC_PI_2, PI, TAU};

use planar_clusters::cluster::{disk_segments, p_epsilon};
use planar_clusters::isoperimetry::{
    cluster_lower_bound, curvature_deficit_bound, dented_disk, g_alpha, g_alpha_rewritten, ideal_curvature,
    isop_fuzz, isoperimetric_deficit, optimal_chord, optimal_chord_leading, optimal_interface_curvature,
    replace_arcs, series_residuals, superposition_bound, FuzzSpec, MarkedChamber,
};
use planar_clusters::numeric::loglog_slope;
use planar_clusters::point::Point;
use planar_clusters::recovery::{build_recovery, solve_double_bubble};
use planar_clusters::{ChordArc, Cluster, DiskConfiguration, Segment};

fn square(side: f64) -> Cluster {
    let p = [(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)].map(|(x, y)| Point::new(x, y));
    Cluster::new(1, (0..4).map(|k| Segment::line(p[k], p[(k + 1) % 4], 1, 0)).collect(), None).unwrap()
}

fn triangle() -> DiskConfiguration {
    let h = 3f64.sqrt();
    DiskConfiguration::new(vec![Point::ORIGIN, Point::new(2.0, 0.0), Point::new(1.0, h)], vec![1.0; 3]).unwrap()
}

/// The disk of area 4π cut into four quadrants of area π.
fn quadrants() -> Cluster {
    let mut segs = Vec::new();
    for k in 0..4 {
        let (a, b) = (k as f64 * FRAC_PI_2, (k + 1) as f64 * FRAC_PI_2);
        let (pa, pb) = (Point::polar(a) * 2.0, Point::polar(b) * 2.0);
        // quadrant k+1 sits counterclockwise of spoke k
        segs.push(Segment::line(Point::ORIGIN, pa, k + 1, 1 + (k + 3) % 4));
        segs.push(Segment::arc(pa, pb, 0.5, k + 1, 0));
    }
    Cluster::new(4, segs, None).unwrap()
}

#[test]
fn ideal_curvature_values() {
    assert!((ideal_curvature(PI).unwrap() - 1.0).abs() < 1e-15);
    assert!((ideal_curvature(4.0 * PI).unwrap() - 0.5).abs() < 1e-15);
    assert!(ideal_curvature(0.0).is_err());
    let d = DiskConfiguration::chain(&[1.0, 2.0, 0.5]).unwrap();
    let c = build_recovery(&d, 1e-3).unwrap();
    for (i, r) in d.radii.iter().enumerate() {
        let k = ideal_curvature(c.chamber_area(i + 1).unwrap()).unwrap();
        assert!((k - 1.0 / r).abs() < 1e-9 / r);
    }
}

#[test]
fn deficit_values() {
    assert!(isoperimetric_deficit(&Cluster::disk(Point::new(3.0, 1.0), 2.0).unwrap(), 1).unwrap().abs() < 1e-12);
    let sq = isoperimetric_deficit(&square(1.0), 1).unwrap();
    assert!((sq - (4.0 - 2.0 * PI.sqrt())).abs() < 1e-14);
    assert!((sq - 0.45509).abs() < 1e-5);
}

#[test]
fn recovery_chamber_deficit_scales_like_eps_three_halves() {
    let d = DiskConfiguration::chain(&[1.0, 1.0]).unwrap();
    let eps = [1e-4, 1e-3, 1e-2];
    let deficits: Vec<f64> = eps
        .iter()
        .map(|&e| isoperimetric_deficit(&build_recovery(&d, e).unwrap(), 1).unwrap())
        .collect();
    assert!(deficits.iter().all(|v| *v > 0.0));
    let slope = loglog_slope(&eps, &deficits).unwrap();
    assert!((slope - 1.5).abs() < 0.1, "slope {slope}");
}

#[test]
fn replacement_identities() {
    let (c, marked) = dented_disk(&[0.1, 0.15], &[0.0, -1.2], &[0.5, 2.5]).unwrap();
    let mc = MarkedChamber::new(&c, 1, &marked, None).unwrap();
    let cmp = replace_arcs(&mc).unwrap();
    let ke = mc.kappa_e();
    // straight chord: ΔP = s(ℓ, κ_E) − ℓ and ΔA = A(ℓ, κ_E) plus the second dent
    let straight = ChordArc::new(0.1, ke).unwrap();
    let (bent, to) = (ChordArc::new(0.15, -1.2).unwrap(), ChordArc::new(0.15, ke).unwrap());
    let dp = (straight.length() - 0.1) + (to.length() - bent.length());
    let da = straight.segment_area() + to.segment_area() - bent.segment_area();
    assert!((cmp.delta_p - dp).abs() < 1e-15);
    assert!((cmp.delta_a - da).abs() < 1e-15);
    assert!((cmp.chamber.chamber_perimeter(1) - (mc.perimeter() + cmp.delta_p)).abs() < 1e-12);
    assert!((cmp.chamber.chamber_area(1).unwrap() - (mc.area() + cmp.delta_a)).abs() < 1e-12);
}

#[test]
fn arcs_at_ideal_curvature_change_nothing() {
    let c = Cluster::disk(Point::ORIGIN, 1.5).unwrap();
    let mc = MarkedChamber::all_arcs(&c, 1, None).unwrap();
    let r = curvature_deficit_bound(&mc).unwrap();
    assert!(r.delta_p.abs() < 1e-14 && r.delta_a.abs() < 1e-14);
    assert!(r.curvature_deficit < 1e-24);
    assert!(r.slack.abs() < 1e-12);
    assert_eq!(r.exact_holds(), Some(true));
}

#[test]
fn straight_dent_bound() {
    let l: f64 = 0.1;
    let (c, marked) = dented_disk(&[l], &[0.0], &[1.0]).unwrap();
    let r = curvature_deficit_bound(&MarkedChamber::new(&c, 1, &marked, None).unwrap()).unwrap();
    assert_eq!(r.exact_holds(), Some(true));
    assert!(r.slack > 0.0);
    assert!(r.asymptotic_residual.abs() <= 10.0 * l.powi(5));
    assert!((r.comparison_area - (r.area + r.delta_a)).abs() < 1e-12);
    assert!((r.comparison_perimeter - (r.perimeter + r.delta_p)).abs() < 1e-12);
}

#[test]
fn delta_p_series_order() {
    for l in [0.1, 0.05, 0.02] {
        for k in [-2.0, -0.5, 0.0, 1.5] {
            let (c, marked) = dented_disk(&[l], &[k], &[0.3]).unwrap();
            let r = curvature_deficit_bound(&MarkedChamber::new(&c, 1, &marked, None).unwrap()).unwrap();
            let scale = l.powi(5) * (r.kappa_e.powi(4) + k.powi(4)).max(1.0);
            assert!(r.delta_p_residual().abs() <= scale, "ℓ = {l}, κ = {k}");
        }
    }
}

#[test]
fn self_intersecting_comparison_is_inconclusive() {
    // a U shape whose notch walls bulge into each other once replaced
    let pts = [
        (0.0, 0.0),
        (3.0, 0.0),
        (3.0, 3.0),
        (1.55, 3.0),
        (1.55, 1.0),
        (1.45, 1.0),
        (1.45, 3.0),
        (0.0, 3.0),
    ]
    .map(|(x, y)| Point::new(x, y));
    let segs = (0..8).map(|k| Segment::line(pts[k], pts[(k + 1) % 8], 1, 0)).collect();
    let c = Cluster::new(1, segs, None).unwrap();
    let r = curvature_deficit_bound(&MarkedChamber::new(&c, 1, &[3, 5], None).unwrap()).unwrap();
    assert!(!r.embedded);
    assert_eq!(r.exact_holds(), None);
}

#[test]
fn fuzz_thousand_cases() {
    let cases = isop_fuzz(1000, 2024, &FuzzSpec::default()).unwrap();
    assert_eq!(cases.len(), 1000);
    for case in &cases {
        assert!(case.report.chords.iter().all(|l| *l <= 0.2));
        assert!(case.report.curvatures.iter().all(|k| k.abs() <= 2.0));
        assert_eq!(case.report.exact_holds(), Some(true), "seed {}", case.seed);
    }
}

#[test]
fn series_residual_exponents() {
    let chords = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    for kappa in [-1.5, 0.0, 2.0] {
        let res = series_residuals(kappa, &chords).unwrap();
        let dp: Vec<f64> = res.iter().map(|r| r.0.abs()).collect();
        let da: Vec<f64> = res.iter().map(|r| r.1.abs()).collect();
        let (sp, sa) = (loglog_slope(&chords, &dp).unwrap(), loglog_slope(&chords, &da).unwrap());
        assert!(sp >= 4.8 && sa >= 4.8, "κ = {kappa}: slopes {sp}, {sa}");
    }
}

#[test]
fn pair_optimizers() {
    let eps: f64 = 1e-3;
    assert!((optimal_interface_curvature(1.0, 0.5, eps) - 0.5 / (2.0 - eps)).abs() < 1e-16);
    assert!((optimal_chord_leading(1.0, 1.0, eps) - 2.0 * eps.sqrt()).abs() < 1e-16);
    // the exact minimiser agrees with the leading term to relative O(ε)
    let ratio = optimal_chord(1.0, 1.0, eps) / (2.0 * eps.sqrt());
    assert!((ratio - 1.0).abs() < eps);
    let db = solve_double_bubble(eps, PI, PI).unwrap();
    let lb = cluster_lower_bound(&db.cluster, eps).unwrap();
    assert_eq!(lb.pairs.len(), 1);
    assert!((lb.pairs[0].chord_leading / (2.0 * eps.sqrt()) - 1.0).abs() < 1e-9);
    assert!((db.chord / lb.pairs[0].chord_star - 1.0).abs() < 0.05);
}

#[test]
fn lower_bound_of_disjoint_disks_is_tight() {
    let mut segs = disk_segments(Point::ORIGIN, 1.0, 1, 0);
    segs.extend(disk_segments(Point::new(5.0, 0.0), 2.0, 2, 0));
    let c = Cluster::new(2, segs, None).unwrap();
    let lb = cluster_lower_bound(&c, 0.01).unwrap();
    assert!((lb.bound - 3.0 * TAU).abs() < 1e-12);
    assert!((p_epsilon(&c, 0.01).unwrap() - lb.bound).abs() < 1e-12);
}

#[test]
fn lower_bound_rejects_multi_arc_pairs() {
    let mut segs = disk_segments(Point::ORIGIN, 1.0, 1, 2);
    segs.extend(disk_segments(Point::ORIGIN, 2.0, 2, 0));
    let c = Cluster::new(2, segs, None).unwrap();
    assert!(cluster_lower_bound(&c, 0.01).is_err());
}

#[test]
fn recovery_pair_is_within_five_halves() {
    let d = DiskConfiguration::chain(&[1.0, 1.0]).unwrap();
    let eps: f64 = 1e-4;
    let c = build_recovery(&d, eps).unwrap();
    let gap = p_epsilon(&c, eps).unwrap() - cluster_lower_bound(&c, eps).unwrap().bound;
    assert!(gap >= 0.0 && gap <= eps.powf(2.5), "{gap:e}");
}

#[test]
fn lower_bound_tightness_slope() {
    let eps: Vec<f64> = (0..=4).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64)).collect();
    for d in [DiskConfiguration::chain(&[1.0, 2.0, 1.0]).unwrap(), triangle()] {
        let gaps: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let c = build_recovery(&d, e).unwrap();
                p_epsilon(&c, e).unwrap() - cluster_lower_bound(&c, e).unwrap().bound
            })
            .collect();
        assert!(gaps.iter().all(|g| *g > 0.0));
        let slope = loglog_slope(&eps, &gaps).unwrap();
        assert!(slope >= 2.3, "slope {slope}");
    }
}

#[test]
fn superposition_bound_values() {
    let eps: f64 = 1e-3;
    let db = solve_double_bubble(eps, PI, PI).unwrap();
    let sup = superposition_bound(&db.cluster, eps).unwrap();
    assert!((sup - (4.0 * PI - 4.0 / 3.0 * eps.powf(1.5))).abs() < 1e-14);
    let c = build_recovery(&triangle(), eps).unwrap();
    let lb = cluster_lower_bound(&c, eps).unwrap();
    let factor = (6.0 * PI - superposition_bound(&c, eps).unwrap()) / (lb.disk_perimeter - lb.bound);
    assert!((factor - 2f64.sqrt()).abs() < 1e-6, "{factor}");
    let uneven = build_recovery(&DiskConfiguration::chain(&[1.0, 1.2]).unwrap(), eps).unwrap();
    assert!(superposition_bound(&uneven, eps).is_err());
}

#[test]
fn bound_ordering_on_equal_chambers() {
    let configs = [
        DiskConfiguration::chain(&[1.0, 1.0]).unwrap(),
        DiskConfiguration::chain(&[1.0, 1.0, 1.0]).unwrap(),
        triangle(),
    ];
    for d in &configs {
        for eps in [1e-2, 3e-3, 1e-3, 1e-4] {
            let c = build_recovery(d, eps).unwrap();
            let sup = superposition_bound(&c, eps).unwrap();
            let lb = cluster_lower_bound(&c, eps).unwrap().bound;
            let p = p_epsilon(&c, eps).unwrap();
            assert!(sup <= lb && lb <= p, "{sup} {lb} {p}");
        }
    }
}

#[test]
fn g_alpha_values() {
    let disk = Cluster::disk(Point::ORIGIN, 1.0).unwrap();
    for alpha in [0.1, 0.5, 1.0, 2.0] {
        assert!((g_alpha(&disk, alpha).unwrap() - TAU).abs() < 1e-12);
    }
    let db = solve_double_bubble(0.3, PI, PI).unwrap();
    assert!((g_alpha(&db.cluster, 1.0).unwrap() - p_epsilon(&db.cluster, 1.0).unwrap()).abs() < 1e-14);
    assert!(g_alpha(&disk, 0.0).is_err() && g_alpha(&disk, 2.5).is_err());
}

#[test]
fn g_alpha_on_quadrants_and_recovery() {
    let q = quadrants();
    for a in q.chamber_areas().unwrap() {
        assert!((a - PI).abs() < 1e-12);
    }
    let alpha = 0.5;
    let p = p_epsilon(&q, 1.0).unwrap();
    let g = g_alpha(&q, alpha).unwrap();
    assert!(g >= p - 1e-12 && (g - p).abs() < 1e-12);
    assert!((g - g_alpha_rewritten(&q, alpha).unwrap()).abs() < 1e-12);
    // four tangent disks: the exterior boundary is far longer than 4π
    let h = 3f64.sqrt();
    let rhombus = DiskConfiguration::new(
        vec![Point::ORIGIN, Point::new(2.0, 0.0), Point::new(1.0, h), Point::new(3.0, h)],
        vec![1.0; 4],
    )
    .unwrap();
    let c = build_recovery(&rhombus, 1e-3).unwrap();
    let (g, p) = (g_alpha(&c, alpha).unwrap(), p_epsilon(&c, 1.0).unwrap());
    assert!(g > p);
    assert!((g - g_alpha_rewritten(&c, alpha).unwrap()).abs() < 1e-12 * g);
}
