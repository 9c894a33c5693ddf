//! Pairwise intersection test for the boundary curves of a cluster.

use crate::cluster::{Cluster, Segment, SegmentGeometry};
use crate::point::Point;

/// Radial pieces are checked as polylines with this many edges.
const POLYLINE_PIECES: usize = 64;

/// Arcs flatter than this (radius over bounding-box diagonal) are treated as
/// their chords.
const FLAT_RADIUS: f64 = 1e8;

/// A line or circular arc from `a` to `b`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    a: Point,
    b: Point,
    /// Supporting circle and the sign of the curvature; `None` for lines.
    circle: Option<(Point, f64, f64)>,
}

impl Piece {
    fn from_segment(s: &Segment, scale: f64) -> Vec<Piece> {
        match s.geometry {
            SegmentGeometry::Arc { curvature } => {
                let circle = s
                    .circle()
                    .filter(|(_, r)| *r < FLAT_RADIUS * scale)
                    .map(|(c, r)| (c, r, curvature.signum()));
                vec![Piece { a: s.start, b: s.end, circle }]
            }
            SegmentGeometry::RadialLinear { .. } => s
                .sample(POLYLINE_PIECES)
                .windows(2)
                .map(|w| Piece { a: w[0], b: w[1], circle: None })
                .collect(),
        }
    }

    /// Whether `q`, already on the supporting curve, lies on the piece.
    fn contains(&self, q: Point, tol: f64) -> bool {
        let d = self.b - self.a;
        match self.circle {
            None => {
                let len = d.norm();
                let t = (q - self.a).dot(d) / len;
                t >= -tol && t <= len + tol
            }
            // a minor arc with positive curvature runs to the right of its chord
            Some((_, _, sign)) => d.cross(q - self.a) * sign <= tol * d.norm(),
        }
    }

    fn point(&self, t: f64) -> Point {
        match self.circle {
            None => self.a.lerp(self.b, t),
            Some((c, r, sign)) => {
                let (u, v) = (self.a - c, self.b - c);
                let mut sweep = u.cross(v).atan2(u.dot(v));
                if sweep * sign < 0.0 {
                    sweep += sign * std::f64::consts::TAU;
                }
                c + u.rotate(t * sweep).normalized() * r
            }
        }
    }
}

enum Hits {
    Points(Vec<Point>),
    Overlap,
}

fn line_line(p: &Piece, q: &Piece, tol: f64) -> Hits {
    let (d1, d2) = (p.b - p.a, q.b - q.a);
    let den = d1.cross(d2);
    let w = q.a - p.a;
    if den.abs() <= 1e-14 * d1.norm() * d2.norm() {
        if d1.cross(w).abs() > tol * d1.norm() {
            return Hits::Points(vec![]);
        }
        // collinear: overlap of the projected intervals
        let len = d1.norm();
        let t0 = w.dot(d1) / len;
        let t1 = (q.b - p.a).dot(d1) / len;
        let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(len));
        return if hi - lo > tol { Hits::Overlap } else { Hits::Points(vec![]) };
    }
    Hits::Points(vec![p.a + d1 * (w.cross(d2) / den)])
}

fn line_circle(p: &Piece, c: Point, r: f64) -> Vec<Point> {
    let d = (p.b - p.a).normalized();
    let foot = p.a + d * (c - p.a).dot(d);
    let off = foot - c;
    let h2 = r * r - off.dot(off);
    if h2 < 0.0 {
        return vec![];
    }
    let h = h2.sqrt();
    vec![foot + d * h, foot - d * h]
}

fn circle_circle(c1: Point, r1: f64, c2: Point, r2: f64) -> Vec<Point> {
    let dist = c1.distance(c2);
    if dist > r1 + r2 || dist < (r1 - r2).abs() || dist == 0.0 {
        return vec![];
    }
    let a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let u = (c2 - c1) * (1.0 / dist);
    let m = c1 + u * a;
    vec![m + u.perp() * h, m - u.perp() * h]
}

/// Whether two pieces on the same supporting curve share an interior stretch.
fn same_curve_overlap(p: &Piece, q: &Piece, tol: f64) -> bool {
    let interior = |x: &Piece, y: &Piece| {
        [0.25, 0.5, 0.75].iter().any(|&t| {
            let z = x.point(t);
            y.contains(z, -tol) && z.distance(y.a) > tol && z.distance(y.b) > tol
        })
    };
    interior(p, q) || interior(q, p)
}

/// Second intersection of two curves through the common point `e`: the
/// reflection of `e` across the line of centers, or the second root along a
/// line. Computed this way it stays accurate when the curves are nearly
/// tangent at `e`.
fn through_shared(p: &Piece, q: &Piece, e: Point) -> Vec<Point> {
    match (p.circle, q.circle) {
        (None, None) => vec![],
        (None, Some((c, _, _))) | (Some((c, _, _)), None) => {
            let line = if p.circle.is_none() { p } else { q };
            let d = (line.b - line.a).normalized();
            vec![e - d * (2.0 * (e - c).dot(d))]
        }
        (Some((c1, _, _)), Some((c2, _, _))) => {
            let u = (c2 - c1).normalized();
            let rel = e - c1;
            vec![c1 + u * (2.0 * rel.dot(u)) - rel]
        }
    }
}

fn crosses(p: &Piece, q: &Piece, tol: f64) -> bool {
    let shared: Vec<Point> = [p.a, p.b]
        .into_iter()
        .filter(|e| e.distance(q.a) <= tol || e.distance(q.b) <= tol)
        .collect();
    let same_circle = matches!((p.circle, q.circle), (Some((c1, r1, _)), Some((c2, r2, _)))
        if c1.distance(c2) <= tol && (r1 - r2).abs() <= tol);
    let hits = if same_circle {
        if same_curve_overlap(p, q, tol) {
            Hits::Overlap
        } else {
            Hits::Points(vec![])
        }
    } else if let (Some(&e), false) = (shared.first(), p.circle.is_none() && q.circle.is_none()) {
        Hits::Points(through_shared(p, q, e))
    } else {
        match (p.circle, q.circle) {
            (None, None) => line_line(p, q, tol),
            (None, Some((c, r, _))) => Hits::Points(line_circle(p, c, r)),
            (Some((c, r, _)), None) => Hits::Points(line_circle(q, c, r)),
            (Some((c1, r1, _)), Some((c2, r2, _))) => Hits::Points(circle_circle(c1, r1, c2, r2)),
        }
    };
    let points = match hits {
        Hits::Overlap => return true,
        Hits::Points(v) => v,
    };
    points.into_iter().any(|z| {
        p.contains(z, tol) && q.contains(z, tol) && shared.iter().all(|e| e.distance(z) > tol)
    })
}

/// Points where two boundary curves of the cluster meet away from their shared
/// endpoints; empty for an embedded cluster.
pub fn self_intersections(c: &Cluster) -> Vec<(usize, usize)> {
    let scale = c.bbox_diagonal();
    let tol = 1e-9 * scale;
    let pieces: Vec<(usize, Piece)> = c
        .segments()
        .iter()
        .enumerate()
        .flat_map(|(k, s)| Piece::from_segment(s, scale).into_iter().map(move |p| (k, p)))
        .collect();
    let mut out = Vec::new();
    for (x, (k1, p)) in pieces.iter().enumerate() {
        for (k2, q) in &pieces[x + 1..] {
            if crosses(p, q, tol) {
                let pair = (*k1.min(k2), *k1.max(k2));
                if !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
    }
    out
}

pub fn is_embedded(c: &Cluster) -> bool {
    self_intersections(c).is_empty()
}
