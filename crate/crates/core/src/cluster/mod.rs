//! Planar N-clusters bounded by constant-curvature arcs.
//!
//! Chambers are numbered 1..=N; chamber 0 is the exterior and is never stored
//! explicitly. Every segment carries the chamber on its left and on its right,
//! so each chamber's boundary loops are read off with the chamber on the left.

mod energy;
mod segment;
mod validate;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, RigidMotion};

pub use energy::{
    p_epsilon, perimeter_rewriting, rescaled_energy, triple_point_angle, vertex_balance,
    weighted_perimeter, WeightMatrix,
};
pub use segment::{Segment, SegmentGeometry};
pub use validate::{validate_cluster, Diagnostics, DEFAULT_GRID};

/// Relative tolerance (of the bounding-box diagonal) for merging endpoints
/// into vertices.
pub const VERTEX_TOL: f64 = 1e-9;

/// Relative tolerance (of the bounding-box diagonal) below which a segment
/// counts as zero-length.
pub const ZERO_LENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClusterRepr", into = "ClusterRepr")]
pub struct Cluster {
    n_chambers: usize,
    segments: Vec<Segment>,
    target_areas: Option<Vec<f64>>,
    lengths: Vec<f64>,
    vertices: Vec<Point>,
    /// (start vertex, end vertex) per segment.
    ends: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct ClusterRepr {
    n_chambers: usize,
    segments: Vec<Segment>,
    #[serde(default)]
    target_areas: Option<Vec<f64>>,
}

impl TryFrom<ClusterRepr> for Cluster {
    type Error = Error;
    fn try_from(r: ClusterRepr) -> Result<Self> {
        Cluster::new(r.n_chambers, r.segments, r.target_areas)
    }
}

impl From<Cluster> for ClusterRepr {
    fn from(c: Cluster) -> Self {
        ClusterRepr {
            n_chambers: c.n_chambers,
            segments: c.segments,
            target_areas: c.target_areas,
        }
    }
}

impl Cluster {
    pub fn new(
        n_chambers: usize,
        segments: Vec<Segment>,
        target_areas: Option<Vec<f64>>,
    ) -> Result<Self> {
        if n_chambers == 0 {
            return Err(Error::domain("a cluster needs at least one chamber"));
        }
        if segments.is_empty() {
            return Err(Error::structural("cluster has no segments", None));
        }
        if let Some(t) = &target_areas {
            if t.len() != n_chambers {
                return Err(Error::domain(format!(
                    "{} target areas for {n_chambers} chambers",
                    t.len()
                )));
            }
        }
        let diag = bbox_diagonal(&segments);
        for s in &segments {
            s.check(n_chambers, ZERO_LENGTH_TOL * diag)?;
        }
        let merge = VERTEX_TOL * diag.max(f64::MIN_POSITIVE);
        let mut vertices: Vec<Point> = Vec::new();
        let mut vertex_of = |p: Point| -> usize {
            match vertices.iter().position(|v| v.distance(p) <= merge) {
                Some(i) => i,
                None => {
                    vertices.push(p);
                    vertices.len() - 1
                }
            }
        };
        let ends = segments
            .iter()
            .map(|s| (vertex_of(s.start), vertex_of(s.end)))
            .collect();
        let lengths = segments.iter().map(Segment::length).collect();
        Ok(Cluster {
            n_chambers,
            segments,
            target_areas,
            lengths,
            vertices,
            ends,
        })
    }

    /// A single chamber bounded by the circle of radius `r` about `center`,
    /// drawn as four quarter arcs.
    pub fn disk(center: Point, r: f64) -> Result<Self> {
        Cluster::new(1, disk_segments(center, r, 1, 0), None)
    }

    pub fn n_chambers(&self) -> usize {
        self.n_chambers
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn target_areas(&self) -> Option<&[f64]> {
        self.target_areas.as_deref()
    }

    pub fn with_target_areas(mut self, t: Vec<f64>) -> Result<Self> {
        if t.len() != self.n_chambers {
            return Err(Error::domain("target area count does not match chambers"));
        }
        self.target_areas = Some(t);
        Ok(self)
    }

    /// Cached length of segment `k`.
    pub fn segment_length(&self, k: usize) -> f64 {
        self.lengths[k]
    }

    /// Distinct endpoints after merging.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertex indices of the endpoints of segment `k`.
    pub fn segment_ends(&self, k: usize) -> (usize, usize) {
        self.ends[k]
    }

    /// Number of segment ends meeting at each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(a, b) in &self.ends {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Index of the vertex within the merge tolerance of `p`.
    pub fn find_vertex(&self, p: Point) -> Option<usize> {
        let tol = VERTEX_TOL * self.bbox_diagonal();
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.distance(p)))
            .filter(|(_, d)| *d <= tol.max(1e-12))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(&self.segments)
    }

    /// Bounding box (min, max) of the curves, from dense samples of each segment.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for s in &self.segments {
            for p in s.sample(64) {
                lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        (lo, hi)
    }

    fn check_chamber(&self, i: usize) -> Result<()> {
        if i > self.n_chambers {
            return Err(Error::domain(format!(
                "chamber {i} out of range 0..={}",
                self.n_chambers
            )));
        }
        Ok(())
    }

    /// Vertices where the oriented boundary of chamber `i` does not balance
    /// (in-degree != out-degree), i.e. where a loop is open.
    pub fn dangling_vertices(&self, i: usize) -> Vec<Point> {
        let mut balance: BTreeMap<usize, i64> = BTreeMap::new();
        for (s, &(a, b)) in self.segments.iter().zip(&self.ends) {
            let (from, to) = if s.left == i {
                (a, b)
            } else if s.right == i {
                (b, a)
            } else {
                continue;
            };
            *balance.entry(from).or_default() += 1;
            *balance.entry(to).or_default() -= 1;
        }
        balance
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|(k, _)| self.vertices[k])
            .collect()
    }

    /// Signed area enclosed by the boundary of chamber `i` (chamber on the left),
    /// without closure or sign checks.
    pub fn signed_area(&self, i: usize) -> f64 {
        let mut area = 0.0;
        for s in &self.segments {
            if s.left == i {
                area += 0.5 * s.start.cross(s.end) + s.bulge_area();
            } else if s.right == i {
                area += 0.5 * s.end.cross(s.start) - s.bulge_area();
            }
        }
        area
    }

    /// Area of chamber `i ∈ 1..=N`: shoelace over the vertices plus the
    /// signed bulge of every curved segment.
    pub fn chamber_area(&self, i: usize) -> Result<f64> {
        self.check_chamber(i)?;
        if i == 0 {
            return Err(Error::domain("the exterior chamber has infinite area"));
        }
        if let Some(v) = self.dangling_vertices(i).first() {
            return Err(Error::structural(
                format!("boundary of chamber {i} is not closed"),
                Some(*v),
            ));
        }
        if !self.segments.iter().any(|s| s.touches(i)) {
            return Err(Error::structural(format!("chamber {i} has no boundary"), None));
        }
        let a = self.signed_area(i);
        if !(a > 0.0) {
            return Err(Error::structural(
                format!("chamber {i} has non-positive area {a:.3e}: boundary is misoriented"),
                None,
            ));
        }
        Ok(a)
    }

    pub fn chamber_areas(&self) -> Result<Vec<f64>> {
        (1..=self.n_chambers).map(|i| self.chamber_area(i)).collect()
    }

    /// Length of the interface between chambers `i` and `j`.
    pub fn interface_length(&self, i: usize, j: usize) -> f64 {
        self.segments
            .iter()
            .zip(&self.lengths)
            .filter(|(s, _)| (s.left == i && s.right == j) || (s.left == j && s.right == i))
            .map(|(_, l)| l)
            .sum()
    }

    /// Perimeter of chamber `i` (for `i = 0`, of the exterior).
    pub fn chamber_perimeter(&self, i: usize) -> f64 {
        self.segments
            .iter()
            .zip(&self.lengths)
            .filter(|(s, _)| s.touches(i))
            .map(|(_, l)| l)
            .sum()
    }

    /// Indices of the segments separating `i` and `j`.
    pub fn interface_segments(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.segments.len())
            .filter(|&k| {
                let s = &self.segments[k];
                (s.left == i && s.right == j) || (s.left == j && s.right == i)
            })
            .collect()
    }

    /// Number of closed boundary loops of chamber `i` (connected components of
    /// its boundary graph).
    pub fn boundary_components(&self, i: usize) -> usize {
        let edges: Vec<(usize, usize)> = self
            .segments
            .iter()
            .zip(&self.ends)
            .filter(|(s, _)| s.touches(i))
            .map(|(_, e)| *e)
            .collect();
        count_components(&edges)
    }

    /// Segments of chamber `i` relabelled as a one-chamber cluster (chamber 1
    /// against the exterior).
    pub fn single_chamber(&self, i: usize) -> Result<Cluster> {
        self.check_chamber(i)?;
        let segs = self
            .segments
            .iter()
            .filter_map(|s| {
                let mut t = *s;
                if s.left == i {
                    t.left = 1;
                    t.right = 0;
                } else if s.right == i {
                    t.right = 1;
                    t.left = 0;
                } else {
                    return None;
                }
                Some(t)
            })
            .collect();
        Cluster::new(1, segs, None)
    }

    pub fn transformed(&self, m: &RigidMotion) -> Result<Cluster> {
        Cluster::new(
            self.n_chambers,
            self.segments.iter().map(|s| s.transformed(m)).collect(),
            self.target_areas.clone(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Cluster> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Four quarter arcs bounding the disk of radius `r` about `center`, with
/// `inside` on the left.
pub fn disk_segments(center: Point, r: f64, inside: usize, outside: usize) -> Vec<Segment> {
    (0..4)
        .map(|k| {
            let a = center + Point::polar(k as f64 * FRAC_PI_2) * r;
            let b = center + Point::polar((k + 1) as f64 * FRAC_PI_2) * r;
            Segment::arc(a, b, 1.0 / r, inside, outside)
        })
        .collect()
}

fn bbox_diagonal(segments: &[Segment]) -> f64 {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in segments {
        for p in [s.start, s.end] {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    let d = hi.distance(lo);
    if d.is_finite() && d > 0.0 {
        d
    } else {
        1.0
    }
}

fn count_components(edges: &[(usize, usize)]) -> usize {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent.insert(ra, rb);
        }
    }
    let keys: Vec<usize> = parent.keys().copied().collect();
    let mut roots: Vec<usize> = keys.into_iter().map(|k| find(&mut parent, k)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}
