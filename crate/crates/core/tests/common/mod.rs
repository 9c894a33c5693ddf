//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's own quadrature or arc formulas.
#![allow(dead_code)]

use std::f64::consts::PI;

use planar_clusters::isoperimetry::dented_disk;
use planar_clusters::point::{Point, RigidMotion};
use planar_clusters::recovery::{build_recovery, solve_double_bubble};
use planar_clusters::{Cluster, DiskConfiguration, Segment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Five-point Gauss–Legendre rule on [-1, 1].
fn gl5() -> ([f64; 5], [f64; 5]) {
    let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
    ([-b, -a, 0.0, a, b], [wb, wa, 128.0 / 225.0, wa, wb])
}

/// Composite five-point Gauss–Legendre with `panels` equal panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gl5();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for k in 0..5 {
            total += w[k] * f(mid + 0.5 * h * x[k]);
        }
    }
    0.5 * h * total
}

/// Arc over the chord [-ℓ/2, ℓ/2] written as a graph y(x) above the chord.
/// Returns (y, y') for |κ| > 0; the sign of κ flips the bulge.
fn arc_graph(chord: f64, kappa: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let r = 1.0 / kappa.abs();
    let s = kappa.signum();
    let base = (r * r - chord * chord / 4.0).sqrt();
    (
        move |x: f64| s * ((r * r - x * x).sqrt() - base),
        move |x: f64| -s * x / (r * r - x * x).sqrt(),
    )
}

/// (length, signed angle, signed bulge area) of the arc by quadrature over
/// its graph. Valid for |ℓκ| < 2.
pub fn arc_oracle(chord: f64, kappa: f64) -> (f64, f64, f64) {
    if kappa == 0.0 {
        return (chord, 0.0, 0.0);
    }
    let (y, dy) = arc_graph(chord, kappa);
    let h = chord / 2.0;
    let n = 400;
    let length = gauss_legendre(|x| (1.0 + dy(x).powi(2)).sqrt(), -h, h, n);
    let area = gauss_legendre(&y, -h, h, n);
    // tangent turns from atan(y'(-h)) down to atan(y'(h))
    let angle = dy(-h).atan() - dy(h).atan();
    (length, angle, area)
}

/// Points along an arc from `a` to `b` whose curvature is positive when it
/// turns counterclockwise, built from the circle centre directly.
pub fn arc_points(a: Point, b: Point, kappa: f64, n: usize) -> Vec<Point> {
    if kappa == 0.0 {
        return (0..=n).map(|k| a.lerp(b, k as f64 / n as f64)).collect();
    }
    let r = 1.0 / kappa.abs();
    let m = a.lerp(b, 0.5);
    let d = (b - a).normalized();
    let left = Point::new(-d.y, d.x);
    let half = a.distance(b) / 2.0;
    // counterclockwise arcs have their centre on the left of the chord
    let c = m + left * (kappa.signum() * (r * r - half * half).sqrt());
    let (pa, pb) = ((a - c).angle(), (b - c).angle());
    let mut sweep = pb - pa;
    if kappa > 0.0 {
        while sweep < 0.0 {
            sweep += 2.0 * PI;
        }
    } else {
        while sweep > 0.0 {
            sweep -= 2.0 * PI;
        }
    }
    (0..=n)
        .map(|k| {
            let t = pa + sweep * k as f64 / n as f64;
            c + Point::new(t.cos(), t.sin()) * r
        })
        .collect()
}

/// Shoelace area of chamber `i`, every arc sampled into `n` pieces. Radial
/// pieces are sampled through the library since they have no closed form.
pub fn polygon_area(c: &Cluster, i: usize, n: usize) -> f64 {
    let mut twice = 0.0;
    for s in c.segments().iter().filter(|s| s.touches(i)) {
        let pts = match s.curvature() {
            Some(k) => arc_points(s.start, s.end, k, n),
            None => s.sample(n),
        };
        let sign = if s.left == i { 1.0 } else { -1.0 };
        for w in pts.windows(2) {
            twice += sign * w[0].cross(w[1]);
        }
    }
    0.5 * twice
}

/// Polyline length of every segment bordering `i`.
pub fn polygon_perimeter(c: &Cluster, i: usize, n: usize) -> f64 {
    c.segments()
        .iter()
        .filter(|s| s.touches(i))
        .map(|s| {
            let pts = match s.curvature() {
                Some(k) => arc_points(s.start, s.end, k, n),
                None => s.sample(n),
            };
            pts.windows(2).map(|w| w[0].distance(w[1])).sum::<f64>()
        })
        .sum()
}

/// A `cols` × `rows` grid of jittered quadrilateral chambers whose edges are
/// arcs of random small curvature, under a random rigid motion.
pub fn random_grid_cluster<R: Rng>(rng: &mut R, cols: usize, rows: usize) -> Cluster {
    let jitter = 0.15;
    let mut node = vec![vec![Point::ORIGIN; rows + 1]; cols + 1];
    for (x, col) in node.iter_mut().enumerate() {
        for (y, p) in col.iter_mut().enumerate() {
            *p = Point::new(
                x as f64 + rng.gen_range(-jitter..jitter),
                y as f64 + rng.gen_range(-jitter..jitter),
            );
        }
    }
    let cell = |x: isize, y: isize| -> usize {
        if x < 0 || y < 0 || x >= cols as isize || y >= rows as isize {
            0
        } else {
            1 + x as usize + cols * y as usize
        }
    };
    let mut segs = Vec::new();
    // horizontal edges: chamber above on the left when walking +x
    for x in 0..cols {
        for y in 0..=rows {
            let k = rng.gen_range(-0.4..0.4);
            let (above, below) = (cell(x as isize, y as isize), cell(x as isize, y as isize - 1));
            segs.push(Segment::arc(node[x][y], node[x + 1][y], k, above, below));
        }
    }
    // vertical edges walked in -y, so the cell at +x is on the left
    for x in 0..=cols {
        for y in 0..rows {
            let k = rng.gen_range(-0.4..0.4);
            let (east, west) = (cell(x as isize, y as isize), cell(x as isize - 1, y as isize));
            segs.push(Segment::arc(node[x][y + 1], node[x][y], k, east, west));
        }
    }
    let motion = RigidMotion::new(rng.gen_range(-PI..PI), Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)));
    Cluster::new(cols * rows, segs, None)
        .expect("grid cluster")
        .transformed(&motion)
        .expect("rigid motion")
}

/// 100 clusters of four families: arc grids, double bubbles, recovery chains
/// and dented disks.
pub fn random_clusters(seed: u64) -> Vec<Cluster> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..100)
        .map(|k| match k % 4 {
            0 => {
                let (cols, rows) = (rng.gen_range(1..5), rng.gen_range(1..4));
                random_grid_cluster(&mut rng, cols, rows)
            }
            1 => {
                let eps = rng.gen_range(0.01..1.0);
                solve_double_bubble(eps, rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0))
                    .unwrap()
                    .cluster
            }
            2 => {
                let radii: Vec<f64> = (0..rng.gen_range(2..5)).map(|_| rng.gen_range(0.5..2.0)).collect();
                let d = DiskConfiguration::chain(&radii).unwrap();
                build_recovery(&d, 10f64.powf(rng.gen_range(-4.0..-2.0))).unwrap()
            }
            _ => {
                let l = rng.gen_range(0.01..0.2);
                dented_disk(&[l, l], &[rng.gen_range(-2.0..2.0), 0.5], &[0.0, PI]).unwrap().0
            }
        })
        .collect()
}
