use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{interface_chord, interface_curvature};
use crate::arc::{invert_chord_to_angle, tangent_circle_polar, ChordArc};
use crate::cluster::{disk_segments, Cluster, Segment};
use crate::error::{Error, Result};
use crate::numeric;
use crate::point::Point;
use crate::sticky::{contact_graph, DiskConfiguration};

/// How the chamber boundary between dents is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryMode {
    /// `Rounded` when its center placement succeeds, `Radial` otherwise.
    #[default]
    Auto,
    /// Each chamber is a circle of adjusted radius about an adjusted center,
    /// with every contact chord replaced by its dent arc.
    Rounded,
    /// Centers stay fixed; between dents the polar radius about the center is
    /// piecewise linear in the angle with one break at the angular midpoint,
    /// the break radius shared per chamber and solved for the area.
    Radial,
}

/// Per-contact data of a recovery construction.
#[derive(Debug, Clone, Serialize)]
pub struct ContactPlan {
    pub i: usize,
    pub j: usize,
    /// ½(1/r_j − 1/r_i), positive when the dent bulges into chamber i.
    pub kappa: f64,
    pub chord: f64,
    /// Half-angle of the dent seen from the center of chamber i (resp. j).
    pub delta_theta_i: f64,
    pub delta_theta_j: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryPlan {
    pub epsilon: f64,
    pub mode: RecoveryMode,
    pub contacts: Vec<ContactPlan>,
    /// Center about which each chamber was built.
    pub centers: Vec<Point>,
    /// Rounded: circle radius minus r_i. Radial: break radius minus r_i.
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RecoveryBuild {
    pub cluster: Cluster,
    pub plan: RecoveryPlan,
}

/// Relative tolerance on the chamber areas of a built cluster.
const AREA_TOL: f64 = 1e-9;

/// Recovery cluster for the disks `d` at weight parameter ε, in the default mode.
pub fn build_recovery(d: &DiskConfiguration, eps: f64) -> Result<Cluster> {
    build_recovery_with(d, eps, RecoveryMode::Auto).map(|b| b.cluster)
}

pub fn build_recovery_with(d: &DiskConfiguration, eps: f64, mode: RecoveryMode) -> Result<RecoveryBuild> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::domain(format!("recovery needs 0 < ε < 2, got {eps}")));
    }
    if d.is_empty() {
        return Err(Error::domain("no disks"));
    }
    let g = contact_graph(d, d.default_tol())?;
    match mode {
        RecoveryMode::Rounded => rounded(d, eps, &g.edges),
        RecoveryMode::Radial => radial(d, eps, &g.edges),
        RecoveryMode::Auto => match rounded(d, eps, &g.edges) {
            Err(Error::Construction(_)) | Err(Error::Numeric { .. }) => radial(d, eps, &g.edges),
            other => other,
        },
    }
}

fn finish(d: &DiskConfiguration, segments: Vec<Segment>, plan: RecoveryPlan) -> Result<RecoveryBuild> {
    let targets: Vec<f64> = d.radii.iter().map(|r| PI * r * r).collect();
    let cluster = Cluster::new(d.len(), segments, Some(targets.clone()))?;
    for (i, t) in targets.iter().enumerate() {
        let a = cluster.chamber_area(i + 1)?;
        if ((a - t) / t).abs() > AREA_TOL {
            return Err(Error::Construction(format!(
                "chamber {} has area {a} instead of {t}",
                i + 1
            )));
        }
    }
    Ok(RecoveryBuild { cluster, plan })
}

/// Dents around chamber `i` as (contact index, direction angle, half-angle),
/// sorted by angle, after checking that they are well separated.
fn ordered_dents(
    i: usize,
    dents: &mut [(usize, f64, f64)],
) -> Result<()> {
    dents.sort_by(|a, b| a.1.total_cmp(&b.1));
    let m = dents.len();
    if m < 2 {
        return Ok(());
    }
    for k in 0..m {
        let (a, b) = (dents[k], dents[(k + 1) % m]);
        let gap = (b.1 - a.1).rem_euclid(TAU);
        if a.2 > 0.25 * gap || b.2 > 0.25 * gap {
            return Err(Error::Construction(format!(
                "dents of chamber {} at angles {:.6} and {:.6} are too close for this ε \
                 (angular gap {gap:.3e}, half-angles {:.3e} and {:.3e})",
                i + 1,
                a.1,
                b.1,
                a.2,
                b.2
            )));
        }
    }
    Ok(())
}

/// Dent segment of contact (i, j) from `p_minus` to `p_plus`, chamber i on the left.
fn dent(i: usize, j: usize, ri: f64, rj: f64, p_minus: Point, p_plus: Point) -> Segment {
    // outward curvature seen from chamber i
    Segment::arc(p_minus, p_plus, -interface_curvature(ri, rj), i + 1, j + 1)
}

fn rounded(d: &DiskConfiguration, eps: f64, edges: &[(usize, usize)]) -> Result<RecoveryBuild> {
    let n = d.len();
    let r = &d.radii;
    let chords: Vec<f64> = edges.iter().map(|&(i, j)| interface_chord(r[i], r[j], eps)).collect();

    // circle radius per chamber from its area
    let mut rho = r.clone();
    for i in 0..n {
        let mine: Vec<(f64, f64)> = edges
            .iter()
            .zip(&chords)
            .filter_map(|(&(a, b), &l)| {
                if a == i {
                    Some((l, -interface_curvature(r[a], r[b])))
                } else if b == i {
                    Some((l, -interface_curvature(r[b], r[a])))
                } else {
                    None
                }
            })
            .collect();
        if mine.is_empty() {
            continue;
        }
        let area = |p: f64| -> f64 {
            let cut: f64 = mine
                .iter()
                .map(|&(l, k)| {
                    ChordArc { chord: l, curvature: 1.0 / p }.segment_area()
                        - ChordArc { chord: l, curvature: k }.segment_area()
                })
                .sum();
            PI * p * p - cut - PI * r[i] * r[i]
        };
        let lmax = mine.iter().map(|m| m.0).fold(0.0, f64::max);
        if mine.iter().any(|&(l, k)| (l * k).abs() > 2.0) || lmax >= r[i] {
            return Err(Error::Construction(format!("ε = {eps} too large for chamber {}", i + 1)));
        }
        let lo = (0.5 * lmax * (1.0 + 1e-12)).max(0.5 * r[i]);
        rho[i] = numeric::brent(area, lo, 2.0 * r[i], 1e-16 * r[i])?;
    }
    let half = |i: usize, l: f64| (rho[i] * rho[i] - 0.25 * l * l).sqrt();
    let dist: Vec<f64> = edges
        .iter()
        .zip(&chords)
        .map(|(&(i, j), &l)| half(i, l) + half(j, l))
        .collect();

    let centers = place_centers(d, edges, &dist)?;
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) && centers[i].distance(centers[j]) <= rho[i] + rho[j] {
                return Err(Error::Construction(format!(
                    "adjusted circles {} and {} intersect without being in contact",
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    // chord endpoints, computed once per contact and shared by both chambers
    let mut ends = Vec::with_capacity(edges.len());
    let mut contacts = Vec::with_capacity(edges.len());
    for (&(i, j), &l) in edges.iter().zip(&chords) {
        let u = (centers[j] - centers[i]).normalized();
        let mid = centers[i] + u * half(i, l);
        let nrm = u.perp() * (0.5 * l);
        ends.push((mid - nrm, mid + nrm));
        contacts.push(ContactPlan {
            i: i + 1,
            j: j + 1,
            kappa: interface_curvature(r[i], r[j]),
            chord: l,
            delta_theta_i: (0.5 * l / rho[i]).asin(),
            delta_theta_j: (0.5 * l / rho[j]).asin(),
        });
    }

    let mut segments = Vec::new();
    for (k, &(i, j)) in edges.iter().enumerate() {
        segments.push(dent(i, j, r[i], r[j], ends[k].0, ends[k].1));
    }
    for i in 0..n {
        // (first point, last point) of each dent in chamber i's counterclockwise order
        let mut dents: Vec<(usize, f64, f64)> = Vec::new();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a == i || b == i {
                let other = if a == i { b } else { a };
                let dir = (centers[other] - centers[i]).angle();
                dents.push((k, dir, (0.5 * chords[k] / rho[i]).asin()));
            }
        }
        if dents.is_empty() {
            segments.extend(disk_segments(centers[i], r[i], i + 1, 0));
            continue;
        }
        ordered_dents(i, &mut dents)?;
        let span = |k: usize| -> (Point, Point) {
            let (p, q) = ends[k];
            if edges[k].0 == i {
                (p, q)
            } else {
                (q, p)
            }
        };
        for m in 0..dents.len() {
            let from = span(dents[m].0).1;
            let to = span(dents[(m + 1) % dents.len()].0).0;
            segments.extend(circle_arcs(centers[i], rho[i], from, to, i + 1));
        }
    }
    let plan = RecoveryPlan {
        epsilon: eps,
        mode: RecoveryMode::Rounded,
        contacts,
        centers,
        offsets: rho.iter().zip(r).map(|(p, q)| p - q).collect(),
    };
    finish(d, segments, plan)
}

/// Counterclockwise arc of the circle (c, rho) from `from` to `to`, split into
/// pieces turning at most π/2.
fn circle_arcs(c: Point, rho: f64, from: Point, to: Point, chamber: usize) -> Vec<Segment> {
    let a0 = (from - c).angle();
    let mut sweep = ((to - c).angle() - a0).rem_euclid(TAU);
    if sweep < 1e-15 {
        sweep = TAU;
    }
    let pieces = (sweep / FRAC_PI_2).ceil().max(1.0) as usize;
    let mut pts = vec![from];
    for k in 1..pieces {
        pts.push(c + Point::polar(a0 + sweep * k as f64 / pieces as f64) * rho);
    }
    pts.push(to);
    pts.windows(2)
        .map(|w| Segment::arc(w[0], w[1], 1.0 / rho, chamber, 0))
        .collect()
}

/// Centers realizing the prescribed contact distances: exact propagation
/// along a spanning forest when the contact graph has no cycles, damped least
/// squares otherwise.
fn place_centers(d: &DiskConfiguration, edges: &[(usize, usize)], dist: &[f64]) -> Result<Vec<Point>> {
    let n = d.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, &(i, j)) in edges.iter().enumerate() {
        adj[i].push((j, k));
        adj[j].push((i, k));
    }
    let mut comp = vec![usize::MAX; n];
    let mut n_comp = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut q = VecDeque::from([s]);
        comp[s] = n_comp;
        while let Some(v) = q.pop_front() {
            for &(w, _) in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = n_comp;
                    q.push_back(w);
                }
            }
        }
        n_comp += 1;
    }
    if edges.len() + n_comp == n {
        let mut c = d.centers.clone();
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &(w, k) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        let u = (d.centers[w] - d.centers[v]).normalized();
                        c[w] = c[v] + u * dist[k];
                        q.push_back(w);
                    }
                }
            }
        }
        return Ok(c);
    }

    let scale = edges
        .iter()
        .zip(dist)
        .map(|(&(i, j), l)| l / (d.radii[i] + d.radii[j]))
        .sum::<f64>()
        / edges.len() as f64;
    let centroid = d.centers.iter().fold(Point::ORIGIN, |a, b| a + *b) * (1.0 / n as f64);
    let x0: Vec<f64> = d
        .centers
        .iter()
        .flat_map(|c| {
            let p = centroid + (*c - centroid) * scale;
            [p.x, p.y]
        })
        .collect();
    let residual = |x: &[f64]| {
        let mut r = Vec::with_capacity(edges.len());
        let mut jac = Vec::with_capacity(edges.len());
        for (&(i, j), &l) in edges.iter().zip(dist) {
            let dx = x[2 * i] - x[2 * j];
            let dy = x[2 * i + 1] - x[2 * j + 1];
            let h = dx.hypot(dy);
            r.push(h - l);
            let mut row = vec![0.0; 2 * n];
            row[2 * i] = dx / h;
            row[2 * i + 1] = dy / h;
            row[2 * j] = -dx / h;
            row[2 * j + 1] = -dy / h;
            jac.push(row);
        }
        (r, jac)
    };
    let rmax = d.max_radius();
    let x = numeric::levenberg_marquardt(residual, x0, 1e-14 * rmax, 200).map_err(|e| {
        Error::Construction(format!("contact distances cannot be realized exactly: {e}"))
    })?;
    Ok((0..n).map(|k| Point::new(x[2 * k], x[2 * k + 1])).collect())
}

fn radial(d: &DiskConfiguration, eps: f64, edges: &[(usize, usize)]) -> Result<RecoveryBuild> {
    let n = d.len();
    let r = &d.radii;
    let c = &d.centers;
    let mut ends = Vec::with_capacity(edges.len());
    let mut contacts = Vec::with_capacity(edges.len());
    for &(i, j) in edges {
        let l = interface_chord(r[i], r[j], eps);
        let kappa = interface_curvature(r[i], r[j]);
        let big_r = if kappa == 0.0 { f64::INFINITY } else { 1.0 / kappa };
        let dti = invert_chord_to_angle(l, r[i], big_r)?;
        let dtj = invert_chord_to_angle(l, r[j], -big_r)?;
        let rho = tangent_circle_polar(r[i], big_r, dti)?;
        let phi = (c[j] - c[i]).angle();
        ends.push((c[i] + Point::polar(phi - dti) * rho, c[i] + Point::polar(phi + dti) * rho));
        contacts.push(ContactPlan {
            i: i + 1,
            j: j + 1,
            kappa,
            chord: l,
            delta_theta_i: dti,
            delta_theta_j: dtj,
        });
    }
    let mut segments: Vec<Segment> = edges
        .iter()
        .zip(&ends)
        .map(|(&(i, j), &(p, q))| dent(i, j, r[i], r[j], p, q))
        .collect();
    let mut offsets = vec![0.0; n];
    for i in 0..n {
        let mut dents: Vec<(usize, f64, f64)> = Vec::new();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a == i {
                dents.push((k, (c[b] - c[i]).angle(), contacts[k].delta_theta_i));
            } else if b == i {
                dents.push((k, (c[a] - c[i]).angle(), contacts[k].delta_theta_j));
            }
        }
        if dents.is_empty() {
            segments.extend(disk_segments(c[i], r[i], i + 1, 0));
            continue;
        }
        ordered_dents(i, &mut dents)?;
        let span = |k: usize| -> (Point, Point) {
            let (p, q) = ends[k];
            if edges[k].0 == i {
                (p, q)
            } else {
                (q, p)
            }
        };
        let gaps: Vec<(Point, Point)> = (0..dents.len())
            .map(|m| (span(dents[m].0).1, span(dents[(m + 1) % dents.len()].0).0))
            .collect();
        let dent_area: f64 = segments
            .iter()
            .filter(|s| s.touches(i + 1))
            .map(|s| {
                let o = if s.left == i + 1 { *s } else { s.reversed() };
                0.5 * o.start.cross(o.end) + o.bulge_area()
            })
            .sum();
        let area = |delta: f64| -> f64 {
            let gap_area: f64 = gaps
                .iter()
                .flat_map(|&(a, b)| radial_gap(c[i], r[i] + delta, a, b, i + 1))
                .map(|s| 0.5 * s.start.cross(s.end) + s.bulge_area())
                .sum();
            dent_area + gap_area - PI * r[i] * r[i]
        };
        let delta = numeric::brent(area, -0.5 * r[i], 0.5 * r[i], 1e-16 * r[i])?;
        offsets[i] = delta;
        for &(a, b) in &gaps {
            segments.extend(radial_gap(c[i], r[i] + delta, a, b, i + 1));
        }
    }
    let plan = RecoveryPlan {
        epsilon: eps,
        mode: RecoveryMode::Radial,
        contacts,
        centers: c.clone(),
        offsets,
    };
    finish(d, segments, plan)
}

/// Boundary from `a` to `b` counterclockwise about `c` whose polar radius is
/// linear in the angle from |a − c| to `mid_radius` at the angular midpoint
/// and on to |b − c|, split into pieces sweeping at most π/2.
fn radial_gap(c: Point, mid_radius: f64, a: Point, b: Point, chamber: usize) -> Vec<Segment> {
    let a0 = (a - c).angle();
    let sweep = ((b - c).angle() - a0).rem_euclid(TAU);
    let sweep = if sweep < 1e-15 { TAU } else { sweep };
    let (ra, rb) = (a.distance(c), b.distance(c));
    let half = 0.5 * sweep;
    let pieces = (half / FRAC_PI_2).ceil().max(1.0) as usize;
    let mut pts = vec![a];
    let mut angles = vec![0.0];
    for k in 1..=2 * pieces - 1 {
        let t = half * k as f64 / pieces as f64;
        let rad = if k <= pieces {
            ra + (mid_radius - ra) * (t / half)
        } else {
            mid_radius + (rb - mid_radius) * ((t - half) / half)
        };
        pts.push(c + Point::polar(a0 + t) * rad);
        angles.push(t);
    }
    pts.push(b);
    angles.push(sweep);
    pts.windows(2)
        .zip(angles.windows(2))
        .map(|(p, t)| Segment::radial(p[0], p[1], c, t[1] - t[0], chamber, 0))
        .collect()
}
